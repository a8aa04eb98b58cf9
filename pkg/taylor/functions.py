"""
스칼라 타입에 무관한 기본 함수 모음

잔차/라그랑지안 코드는 float, TaylorScalar, AdjointScalar, SignatureScalar 중
어떤 값이 들어와도 같은 코드로 동작해야 하므로 math 대신 이 모듈을 사용한다.
"""
import math
from numbers import Real

from common.exceptions import SingularEvaluationError


def ad_depth(x) -> int:
    """중첩 깊이 (float 는 0, 래퍼 타입은 1 + 내부 깊이)"""
    return getattr(x, 'ad_depth', 0)


def primal(x) -> float:
    """가장 안쪽의 실수 값"""
    if hasattr(x, 'primal'):
        return x.primal()
    return float(x)


def constant_like(x, value: float = 0.0):
    """x 와 같은 타입/차수의 상수"""
    if hasattr(x, 'constant_like'):
        return x.constant_like(value)
    return float(value)


def _real(name, fn, x):
    try:
        result = fn(x)
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise SingularEvaluationError(f"{name}({x}) 계산 실패: {exc}") from exc
    if not math.isfinite(result):
        raise SingularEvaluationError(f"{name}({x}) 결과가 유한하지 않습니다.")
    return result


def sin(x):
    if hasattr(x, 'sin'):
        return x.sin()
    return _real('sin', math.sin, x)


def cos(x):
    if hasattr(x, 'cos'):
        return x.cos()
    return _real('cos', math.cos, x)


def sqrt(x):
    if hasattr(x, 'sqrt'):
        return x.sqrt()
    return _real('sqrt', math.sqrt, x)


def exp(x):
    if hasattr(x, 'exp'):
        return x.exp()
    return _real('exp', math.exp, x)


def log(x):
    if hasattr(x, 'log'):
        return x.log()
    if x <= 0:
        raise SingularEvaluationError(f"log({x}) 정의역 위반")
    return _real('log', math.log, x)


def sqr(x):
    if hasattr(x, 'sqr'):
        return x.sqr()
    return x * x


def pow(x, exponent):
    """x**exponent (지수는 실수 상수)"""
    if hasattr(x, 'pow'):
        return x.pow(exponent)
    return _real('pow', lambda v: math.pow(v, exponent), x)


def diff(x, q: int = 1):
    """
    시간에 대한 q 계 도함수

    Args:
        x: 급수 또는 시그니처 값 (실수 상수면 q>0 에서 0)
        q (int): 미분 횟수

    Returns:
        x 와 같은 타입의 도함수
    """
    if q < 0:
        raise ValueError("미분 횟수는 음수일 수 없습니다.")
    if hasattr(x, 'diff'):
        return x.diff(q)
    if isinstance(x, Real):
        return x if q == 0 else 0.0
    raise TypeError(f"diff 를 지원하지 않는 타입입니다: {type(x).__name__}")
