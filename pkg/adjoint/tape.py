"""
역방향 모드 AD 테이프

AdjointScalar 는 내부 스칼라 타입(Inner)에 대해 제네릭하다. 국소 편미분은 순방향
기록 시 Inner 값으로 저장되므로, Inner 가 TaylorScalar 이면 기울기도 시간에 대한
급수로 나온다.
"""
import itertools
from numbers import Real
from typing import Any, Callable, List, Optional, Sequence, Tuple

from common.exceptions import TapeUsageError
from taylor import functions as fn

# 나중에 만든 테이프가 바깥쪽 (같은 깊이의 두 테이프가 만나면 레벨이 높은 쪽이 이긴다)
_tape_levels = itertools.count()

_ONE = 1.0
_MINUS_ONE = -1.0


class Tape:
    """
    추가 전용 연산 기록

    nodes[i] = (부모 인덱스들, 국소 편미분들). 부모는 항상 자식보다 앞에 있다.
    """

    def __init__(self):
        self.level = next(_tape_levels)
        self.nodes: List[Tuple[Tuple[int, ...], Tuple[Any, ...]]] = []
        self.inputs: List[int] = []
        self.input_values: List[Any] = []
        self.recording = True

    def __len__(self):
        return len(self.nodes)

    def _push(self, parents: Tuple[int, ...], partials: Tuple[Any, ...]) -> int:
        if not self.recording:
            raise TapeUsageError("기록이 끝난 테이프에는 연산을 추가할 수 없습니다.")
        self.nodes.append((parents, partials))
        return len(self.nodes) - 1

    def variable(self, value) -> 'AdjointScalar':
        """독립변수 등록"""
        index = self._push((), ())
        self.inputs.append(index)
        self.input_values.append(value)
        return AdjointScalar(value, self, index)

    def constant(self, value) -> 'AdjointScalar':
        """입력과 무관한 출력을 테이프 위의 값으로 올린다"""
        return AdjointScalar(value, self, self._push((), ()))

    def stop(self):
        self.recording = False


class AdjointScalar:
    """테이프 위의 값 (value: Inner, tape, index)"""

    __slots__ = ('value', 'tape', 'index')
    __array_ufunc__ = None

    def __init__(self, value, tape: Tape, index: int):
        self.value = value
        self.tape = tape
        self.index = index

    @property
    def ad_depth(self) -> int:
        return 1 + fn.ad_depth(self.value)

    def primal(self) -> float:
        return fn.primal(self.value)

    def constant_like(self, value: float = 0.0):
        return fn.constant_like(self.value, value)

    def __repr__(self):
        return f"AdjointScalar({self.value!r}, node={self.index})"

    # ---- 피연산자 분류 -----------------------------------------------------
    def _classify(self, other) -> Optional[str]:
        """'node' (같은 테이프), 'const' (상수 취급), None (상대가 바깥쪽)"""
        if isinstance(other, AdjointScalar):
            if other.tape is self.tape:
                return 'node'
            mine, theirs = self.ad_depth, other.ad_depth
            if theirs > mine or (theirs == mine and other.tape.level > self.tape.level):
                return None
            return 'const'
        if isinstance(other, Real):
            return 'const'
        depth = fn.ad_depth(other)
        # 같은 깊이의 테일러 급수는 급수 쪽이 바깥
        if depth >= self.ad_depth:
            return None
        return 'const'

    def _unary(self, value, partial) -> 'AdjointScalar':
        return AdjointScalar(value, self.tape, self.tape._push((self.index,), (partial,)))

    def _binary(self, other, value, d_self, d_other) -> 'AdjointScalar':
        index = self.tape._push((self.index, other.index), (d_self, d_other))
        return AdjointScalar(value, self.tape, index)

    # ---- 산술 -----------------------------------------------------------
    def __add__(self, other):
        kind = self._classify(other)
        if kind == 'node':
            return self._binary(other, self.value + other.value, _ONE, _ONE)
        if kind == 'const':
            return self._unary(self.value + other, _ONE)
        return NotImplemented

    def __radd__(self, other):
        kind = self._classify(other)
        if kind == 'const':
            return self._unary(other + self.value, _ONE)
        return NotImplemented

    def __sub__(self, other):
        kind = self._classify(other)
        if kind == 'node':
            return self._binary(other, self.value - other.value, _ONE, _MINUS_ONE)
        if kind == 'const':
            return self._unary(self.value - other, _ONE)
        return NotImplemented

    def __rsub__(self, other):
        kind = self._classify(other)
        if kind == 'const':
            return self._unary(other - self.value, _MINUS_ONE)
        return NotImplemented

    def __neg__(self):
        return self._unary(-self.value, _MINUS_ONE)

    def __pos__(self):
        return self

    def __mul__(self, other):
        kind = self._classify(other)
        if kind == 'node':
            return self._binary(other, self.value * other.value, other.value, self.value)
        if kind == 'const':
            return self._unary(self.value * other, other)
        return NotImplemented

    def __rmul__(self, other):
        kind = self._classify(other)
        if kind == 'const':
            return self._unary(other * self.value, other)
        return NotImplemented

    def __truediv__(self, other):
        kind = self._classify(other)
        if kind == 'node':
            quotient = self.value / other.value
            return self._binary(other, quotient, 1.0 / other.value, -quotient / other.value)
        if kind == 'const':
            return self._unary(self.value / other, 1.0 / other)
        return NotImplemented

    def __rtruediv__(self, other):
        kind = self._classify(other)
        if kind == 'const':
            quotient = other / self.value
            return self._unary(quotient, -quotient / self.value)
        return NotImplemented

    def __pow__(self, exponent):
        if isinstance(exponent, Real):
            return self.pow(exponent)
        return NotImplemented

    # 값 비교는 가장 안쪽 실수 기준
    def __lt__(self, other):
        return self.primal() < fn.primal(other)

    def __le__(self, other):
        return self.primal() <= fn.primal(other)

    def __gt__(self, other):
        return self.primal() > fn.primal(other)

    def __ge__(self, other):
        return self.primal() >= fn.primal(other)

    # ---- 기본 함수 -------------------------------------------------------
    def sqr(self):
        return self._unary(fn.sqr(self.value), 2.0 * self.value)

    def sqrt(self):
        root = fn.sqrt(self.value)
        return self._unary(root, 0.5 / root)

    def exp(self):
        value = fn.exp(self.value)
        return self._unary(value, value)

    def log(self):
        return self._unary(fn.log(self.value), 1.0 / self.value)

    def sin(self):
        return self._unary(fn.sin(self.value), fn.cos(self.value))

    def cos(self):
        return self._unary(fn.cos(self.value), -fn.sin(self.value))

    def pow(self, exponent: float):
        if exponent == 0:
            return self._unary(fn.constant_like(self.value, 1.0), 0.0)
        if exponent == 1:
            return self
        lower = fn.pow(self.value, exponent - 1)
        return self._unary(lower * self.value, exponent * lower)

    def diff(self, q: int = 1):
        raise TapeUsageError("AdjointScalar 는 시간 미분을 지원하지 않습니다. 내부 급수 값을 미분하세요.")


def _as_output(tape: Tape, output) -> AdjointScalar:
    if isinstance(output, AdjointScalar) and output.tape is tape:
        return output
    # 입력과 무관한 함수 (상수 출력)
    return AdjointScalar(output, tape, tape._push((), ()))


def record(f: Callable[[List[AdjointScalar]], Any], inputs: Sequence) -> Tuple[AdjointScalar, Tape]:
    """
    f 를 새 테이프 위에서 평가

    Args:
        f: 스칼라 함수 f(inputs_list)
        inputs: Inner 값 목록

    Returns:
        (출력 AdjointScalar, 기록이 끝난 Tape)
    """
    tape = Tape()
    args = [tape.variable(value) for value in inputs]
    output = _as_output(tape, f(args))
    tape.stop()
    return output, tape


def backprop(tape: Tape, output, seed: float = 1.0, fill_zeros: bool = True) -> List[Any]:
    """
    단일 출력 역전파

    Args:
        tape: 기록이 끝난 테이프
        output: 미분할 출력 (tape 위의 값, 상수면 모든 기울기가 0)
        seed: 출력 수반(adjoint) 초기값
        fill_zeros: 도달하지 않는 입력에 Inner 타입 0 을 채울지 (False 면 None)

    Returns:
        List: 입력 순서대로 d(output)/d(input_i) (Inner 값)
    """
    if tape.recording:
        raise TapeUsageError("기록이 끝나기 전에는 역전파할 수 없습니다. tape.stop() 을 먼저 호출하세요.")
    if isinstance(output, AdjointScalar) and output.tape is not tape:
        raise TapeUsageError("출력이 다른 테이프에 기록된 값입니다.")

    adjoints: List[Any] = [None] * len(tape.nodes)
    if isinstance(output, AdjointScalar):
        adjoints[output.index] = fn.constant_like(output.value, seed)
        last = output.index
    else:
        last = -1
    for index in range(last, -1, -1):
        adj = adjoints[index]
        if adj is None:
            continue
        parents, partials = tape.nodes[index]
        for parent, partial in zip(parents, partials):
            if partial is _ONE:
                contribution = adj
            elif partial is _MINUS_ONE:
                contribution = -adj
            else:
                contribution = adj * partial
            current = adjoints[parent]
            adjoints[parent] = contribution if current is None else current + contribution

    gradients = []
    for index, value in zip(tape.inputs, tape.input_values):
        grad = adjoints[index]
        if grad is None and fill_zeros:
            grad = fn.constant_like(value, 0.0)
        gradients.append(grad)
    return gradients
