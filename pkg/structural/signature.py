"""
시그니처 스칼라: 변수별 최고 미분 차수만 추적하는 추상 값
"""
from numbers import Real
from typing import Dict, Mapping

from common.exceptions import UnsupportedStructureError
from taylor import functions as fn


class SignatureScalar:
    """
    orders[j] = 이 값이 의존하는 x_j 의 최고 미분 차수 (없으면 -inf, 즉 키 없음)

    모든 산술은 max 결합, diff(q) 는 모든 차수에 q 를 더한다.
    """

    __slots__ = ('orders',)
    __array_ufunc__ = None
    ad_depth = 1

    def __init__(self, orders: Mapping[int, int] = None):
        self.orders: Dict[int, int] = dict(orders or {})

    @classmethod
    def of_variable(cls, j: int) -> 'SignatureScalar':
        return cls({j: 0})

    def constant_like(self, value: float = 0.0) -> 'SignatureScalar':
        return SignatureScalar()

    def __repr__(self):
        return f"SignatureScalar({self.orders!r})"

    def _combine(self, other):
        if isinstance(other, SignatureScalar):
            merged = dict(self.orders)
            for j, order in other.orders.items():
                if order > merged.get(j, -1):
                    merged[j] = order
            return SignatureScalar(merged)
        if isinstance(other, Real):
            return SignatureScalar(self.orders)
        if fn.ad_depth(other) > self.ad_depth:
            return NotImplemented
        raise UnsupportedStructureError(
            f"시그니처 분석 중 지원하지 않는 피연산자 타입: {type(other).__name__}"
        )

    __add__ = __radd__ = _combine
    __sub__ = __rsub__ = _combine
    __mul__ = __rmul__ = _combine
    __truediv__ = __rtruediv__ = _combine

    def __pow__(self, exponent):
        return self._combine(exponent)

    def __rpow__(self, base):
        return self._combine(base)

    def __neg__(self):
        return SignatureScalar(self.orders)

    def __pos__(self):
        return self

    def _same(self, *args):
        return SignatureScalar(self.orders)

    sin = cos = sqrt = exp = log = sqr = pow = _same

    def diff(self, q: int = 1) -> 'SignatureScalar':
        return SignatureScalar({j: order + q for j, order in self.orders.items()})

    def _data_dependent(self, *args):
        raise UnsupportedStructureError(
            "잔차 코드가 값에 따라 분기합니다. 구조(시그니처) 분석을 할 수 없습니다."
        )

    __bool__ = __lt__ = __le__ = __gt__ = __ge__ = _data_dependent
    primal = __float__ = _data_dependent
