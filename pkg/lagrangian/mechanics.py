"""
라그랑지안 작성용 역학 헬퍼 (스칼라 타입 무관)
"""
from typing import Any, Sequence

from taylor import functions as fn


def dot(a: Sequence[Any], b: Sequence[Any]):
    """벡터 내적 (성분은 임의의 스칼라 타입)"""
    total = 0.0
    for x, y in zip(a, b):
        total = total + x * y
    return total


def norm_sq(a: Sequence[Any]):
    total = 0.0
    for x in a:
        total = total + fn.sqr(x)
    return total


def point_kinetic_energy(m: float, velocity: Sequence[Any]):
    return 0.5 * m * norm_sq(velocity)


def rod_kinetic_energy(m: float, r0dot: Sequence[Any], r1dot: Sequence[Any]):
    """
    균일한 강체 막대의 운동에너지

    양 끝점 속도가 r0', r1' 일 때 막대 위 속도는 끝점 속도의 선형 보간이므로
    T = m/6 (r0'.r0' + r0'.r1' + r1'.r1')

    Args:
        m (float): 막대 질량
        r0dot: 한쪽 끝 속도 벡터
        r1dot: 다른 쪽 끝 속도 벡터

    Returns:
        운동에너지 (입력과 같은 스칼라 타입)
    """
    return (m / 6.0) * (dot(r0dot, r0dot) + dot(r0dot, r1dot) + dot(r1dot, r1dot))
