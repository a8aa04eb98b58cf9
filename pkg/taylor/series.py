"""
절단 테일러 급수 스칼라

계수 k 는 x^(k)(t)/k! (도함수가 아니라 테일러 계수). 계수 배열은 float 이거나,
야코비안 계산 시에는 AdjointScalar 를 담은 object 배열일 수 있다.
"""
import math
from numbers import Real
from typing import Sequence

import numpy as np

from common.exceptions import InsufficientOrderError, SingularEvaluationError
from common.utils import factorials
from . import functions as fn


def _as_coeffs(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype != object:
        arr = arr.astype(float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("테일러 계수는 길이 1 이상의 1차원 배열이어야 합니다.")
    return arr


def _dot(a: np.ndarray, b: np.ndarray):
    if a.dtype != object and b.dtype != object:
        return float(np.dot(a, b))
    return sum((x * y for x, y in zip(a, b)), 0.0)


def _empty_like(a: np.ndarray, b: np.ndarray = None) -> np.ndarray:
    dtype = object if a.dtype == object or (b is not None and b.dtype == object) else float
    return np.empty(a.size, dtype=dtype)


def _checked(coeffs: np.ndarray, what: str) -> np.ndarray:
    if coeffs.dtype != object:
        finite = bool(np.all(np.isfinite(coeffs)))
    else:
        finite = all(math.isfinite(fn.primal(c)) for c in coeffs)
    if not finite:
        raise SingularEvaluationError(f"{what} 결과에 NaN/Inf 계수가 있습니다.")
    return coeffs


def _scale(coeffs: np.ndarray, c) -> np.ndarray:
    if isinstance(c, Real):
        return coeffs * float(c)
    return np.array([a * c for a in coeffs], dtype=object)


def _mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype != object and b.dtype != object:
        return np.convolve(a, b)[:a.size]
    out = _empty_like(a, b)
    for k in range(a.size):
        out[k] = _dot(a[:k + 1], b[k::-1])
    return out


def _div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if fn.primal(b[0]) == 0.0:
        raise SingularEvaluationError("상수항이 0인 급수로 나눌 수 없습니다.")
    out = _empty_like(a, b)
    for k in range(a.size):
        acc = a[k] - _dot(out[:k], b[k:0:-1]) if k else a[k]
        out[k] = acc / b[0]
    return out


class TaylorScalar:
    """
    차수 p 의 절단 테일러 급수 (x_0, ..., x_p)

    서로 다른 차수끼리의 연산 결과는 낮은 차수로 절단되고, 상수는 (c, 0, ..., 0)
    으로 승격된다.
    """

    __slots__ = ('coeffs',)
    __array_ufunc__ = None

    def __init__(self, coeffs: Sequence):
        self.coeffs = _as_coeffs(coeffs)

    # ---- 생성 -----------------------------------------------------------
    @classmethod
    def constant(cls, value, order: int) -> 'TaylorScalar':
        coeffs = np.zeros(order + 1, dtype=float if isinstance(value, Real) else object)
        if coeffs.dtype == object:
            coeffs[1:] = 0.0
        coeffs[0] = value
        return cls(coeffs)

    @classmethod
    def variable(cls, t0: float, order: int) -> 'TaylorScalar':
        """독립변수 t 를 t0 에서 전개한 급수 (t0, 1, 0, ...)"""
        coeffs = np.zeros(order + 1)
        coeffs[0] = t0
        if order >= 1:
            coeffs[1] = 1.0
        return cls(coeffs)

    @classmethod
    def from_derivatives(cls, derivatives: Sequence[float]) -> 'TaylorScalar':
        return cls(from_derivatives(derivatives))

    def constant_like(self, value: float = 0.0) -> 'TaylorScalar':
        return TaylorScalar.constant(value, self.order)

    # ---- 조회 -----------------------------------------------------------
    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def ad_depth(self) -> int:
        if self.coeffs.dtype != object:
            return 1
        return 1 + max(fn.ad_depth(c) for c in self.coeffs)

    def primal(self) -> float:
        return fn.primal(self.coeffs[0])

    def to_derivatives(self) -> np.ndarray:
        return to_derivatives(self.coeffs)

    def truncate(self, order: int) -> 'TaylorScalar':
        if order > self.order:
            raise InsufficientOrderError(f"차수 {self.order} 급수를 {order} 차로 늘릴 수 없습니다.")
        return TaylorScalar(self.coeffs[:order + 1])

    def __len__(self):
        return self.coeffs.size

    def __repr__(self):
        return f"TaylorScalar({list(self.coeffs)!r})"

    # ---- 피연산자 정렬 ----------------------------------------------------
    def _pair(self, other):
        """(self 계수, other 계수) 를 공통 차수로 맞춘다. 상위 래퍼면 None."""
        if isinstance(other, TaylorScalar):
            p = min(self.order, other.order)
            return self.coeffs[:p + 1], other.coeffs[:p + 1]
        if isinstance(other, Real) or fn.ad_depth(other) <= self.ad_depth:
            const = TaylorScalar.constant(other, self.order).coeffs
            return self.coeffs, const
        return None

    # ---- 산술 -----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Real):
            coeffs = self.coeffs.copy()
            coeffs[0] = coeffs[0] + float(other)
            return TaylorScalar(_checked(coeffs, 'add'))
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        return TaylorScalar(_checked(pair[0] + pair[1], 'add'))

    __radd__ = __add__

    def __sub__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        return TaylorScalar(_checked(pair[0] - pair[1], 'sub'))

    def __rsub__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        return TaylorScalar(_checked(pair[1] - pair[0], 'sub'))

    def __neg__(self):
        return TaylorScalar(-self.coeffs)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, TaylorScalar):
            a, b = self._pair(other)
            return TaylorScalar(_checked(_mul(a, b), 'mul'))
        if isinstance(other, Real) or fn.ad_depth(other) <= self.ad_depth:
            return TaylorScalar(_checked(_scale(self.coeffs, other), 'mul'))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TaylorScalar):
            a, b = self._pair(other)
            return TaylorScalar(_checked(_div(a, b), 'div'))
        if isinstance(other, Real) or fn.ad_depth(other) <= self.ad_depth:
            if fn.primal(other) == 0.0:
                raise SingularEvaluationError("0 으로 나눌 수 없습니다.")
            return TaylorScalar(_checked(_scale(self.coeffs, 1.0 / other), 'div'))
        return NotImplemented

    def __rtruediv__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        return TaylorScalar(_checked(_div(pair[1], pair[0]), 'div'))

    def __pow__(self, exponent):
        if isinstance(exponent, Real):
            return self.pow(exponent)
        if isinstance(exponent, TaylorScalar):
            return (exponent * self.log()).exp()
        return NotImplemented

    def __rpow__(self, base):
        if isinstance(base, Real):
            if base <= 0:
                raise SingularEvaluationError(f"밑이 양수가 아닌 거듭제곱입니다: {base}")
            return (self * math.log(base)).exp()
        return NotImplemented

    # 값 비교는 상수항 기준 (구조가 고정된 잔차 코드용)
    def __lt__(self, other):
        return self.primal() < fn.primal(other)

    def __le__(self, other):
        return self.primal() <= fn.primal(other)

    def __gt__(self, other):
        return self.primal() > fn.primal(other)

    def __ge__(self, other):
        return self.primal() >= fn.primal(other)

    # ---- 미분 연산자 -------------------------------------------------------
    def diff(self, q: int = 1) -> 'TaylorScalar':
        """
        d^q/dt^q 를 적용한 차수 p-q 급수

        b_k = a_{k+q} (k+q)!/k!
        """
        if q == 0:
            return self
        if q > self.order:
            raise InsufficientOrderError(
                f"차수 {self.order} 급수를 {q} 번 미분할 수 없습니다."
            )
        fact = factorials(self.order)
        ratios = fact[q:] / fact[:self.order - q + 1]
        tail = self.coeffs[q:]
        if tail.dtype == object:
            return TaylorScalar(np.array([c * r for c, r in zip(tail, ratios)], dtype=object))
        return TaylorScalar(tail * ratios)

    # ---- 기본 함수 (점화식) -------------------------------------------------
    def sqr(self) -> 'TaylorScalar':
        return TaylorScalar(_checked(_mul(self.coeffs, self.coeffs), 'sqr'))

    def sqrt(self) -> 'TaylorScalar':
        a = self.coeffs
        if fn.primal(a[0]) <= 0.0:
            raise SingularEvaluationError(f"sqrt 정의역 위반: 상수항 {fn.primal(a[0])}")
        out = _empty_like(a)
        out[0] = fn.sqrt(a[0])
        for k in range(1, a.size):
            acc = a[k] - _dot(out[1:k], out[k - 1:0:-1]) if k > 1 else a[k]
            out[k] = acc / (2.0 * out[0])
        return TaylorScalar(_checked(out, 'sqrt'))

    def exp(self) -> 'TaylorScalar':
        a = self.coeffs
        out = _empty_like(a)
        out[0] = fn.exp(a[0])
        weights = np.arange(a.size, dtype=float)
        for k in range(1, a.size):
            out[k] = _dot(weights[1:k + 1] * a[1:k + 1], out[k - 1::-1]) / k
        return TaylorScalar(_checked(out, 'exp'))

    def log(self) -> 'TaylorScalar':
        a = self.coeffs
        if fn.primal(a[0]) <= 0.0:
            raise SingularEvaluationError(f"log 정의역 위반: 상수항 {fn.primal(a[0])}")
        out = _empty_like(a)
        out[0] = fn.log(a[0])
        weights = np.arange(a.size, dtype=float)
        for k in range(1, a.size):
            acc = a[k]
            if k > 1:
                acc = acc - _dot(weights[1:k] * out[1:k], a[k - 1:0:-1]) / k
            out[k] = acc / a[0]
        return TaylorScalar(_checked(out, 'log'))

    def sincos(self):
        """(sin, cos) 를 함께 계산"""
        a = self.coeffs
        s = _empty_like(a)
        c = _empty_like(a)
        s[0] = fn.sin(a[0])
        c[0] = fn.cos(a[0])
        weights = np.arange(a.size, dtype=float)
        for k in range(1, a.size):
            da = weights[1:k + 1] * a[1:k + 1]
            s[k] = _dot(da, c[k - 1::-1]) / k
            c[k] = -_dot(da, s[k - 1::-1]) / k
        return TaylorScalar(_checked(s, 'sin')), TaylorScalar(_checked(c, 'cos'))

    def sin(self) -> 'TaylorScalar':
        return self.sincos()[0]

    def cos(self) -> 'TaylorScalar':
        return self.sincos()[1]

    def pow(self, exponent: float) -> 'TaylorScalar':
        if float(exponent).is_integer():
            n = int(exponent)
            if n == 0:
                return self.constant_like(1.0)
            result = self
            for _ in range(abs(n) - 1):
                result = result * self
            return result if n > 0 else 1.0 / result
        a = self.coeffs
        if fn.primal(a[0]) <= 0.0:
            raise SingularEvaluationError(f"비정수 거듭제곱의 밑이 양수가 아닙니다: {fn.primal(a[0])}")
        r = float(exponent)
        out = _empty_like(a)
        out[0] = fn.pow(a[0], r)
        for k in range(1, a.size):
            j = np.arange(1, k + 1, dtype=float)
            weights = (r + 1.0) * j - k
            out[k] = _dot(weights * a[1:k + 1], out[k - 1::-1]) / (k * a[0])
        return TaylorScalar(_checked(out, 'pow'))


def to_derivatives(coeffs: Sequence) -> np.ndarray:
    """테일러 계수 -> 도함수 (k 번째에 k! 곱)"""
    arr = _as_coeffs(coeffs)
    fact = factorials(arr.size - 1)
    if arr.dtype == object:
        return np.array([c * f for c, f in zip(arr, fact)], dtype=object)
    return arr * fact


def from_derivatives(derivatives: Sequence) -> np.ndarray:
    """도함수 -> 테일러 계수 (k 번째를 k! 로 나눔)"""
    arr = _as_coeffs(derivatives)
    fact = factorials(arr.size - 1)
    if arr.dtype == object:
        return np.array([c / f for c, f in zip(arr, fact)], dtype=object)
    return arr / fact
