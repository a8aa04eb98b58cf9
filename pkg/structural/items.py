"""
항목(item) 점과 계수 수준 평가

항목 x_{jl} 은 변수 j 의 l 계 도함수. 내부 저장은 테일러 계수 X_j[l] = x_j^(l)/l! 이다.
"""
from dataclasses import dataclass, field
from numbers import Real
from typing import List, Sequence, Tuple

import numpy as np

from adjoint.tape import AdjointScalar, Tape, backprop
from common.exceptions import ConsistencyError
from taylor.series import TaylorScalar, from_derivatives, to_derivatives


@dataclass
class ItemPoint:
    """시각 t 와 변수별 테일러 계수 배열"""

    t: float
    coeffs: List[np.ndarray] = field(default_factory=list)

    @classmethod
    def from_derivatives(cls, t: float, derivatives: Sequence[Sequence[float]]) -> 'ItemPoint':
        return cls(float(t), [from_derivatives(row) for row in derivatives])

    def derivatives(self) -> List[np.ndarray]:
        return [to_derivatives(row) for row in self.coeffs]

    def copy(self) -> 'ItemPoint':
        return ItemPoint(self.t, [row.copy() for row in self.coeffs])

    def truncated(self, orders: Sequence[int]) -> 'ItemPoint':
        """변수 j 를 차수 orders[j] 로 자르고 모자라면 0 으로 채운다"""
        rows = []
        for row, order in zip(self.coeffs, orders):
            out = np.zeros(order + 1)
            size = min(order + 1, row.size)
            out[:size] = row[:size]
            rows.append(out)
        return ItemPoint(self.t, rows)


def _time_series(t: float, coeffs: Sequence[np.ndarray]) -> TaylorScalar:
    order = max((len(row) - 1 for row in coeffs), default=0)
    return TaylorScalar.variable(t, max(order, 1))


def evaluate_series(dae, t: float, coeffs: Sequence[np.ndarray]) -> List[TaylorScalar]:
    """
    변수 급수로 잔차를 평가

    Args:
        dae: DaeSystem
        t (float): 전개 시각
        coeffs: 변수별 테일러 계수 배열

    Returns:
        List[TaylorScalar]: 방정식별 잔차 급수 (상수 출력은 차수 0 급수로 승격)
    """
    z = [TaylorScalar(row) for row in coeffs]
    outputs = dae.evaluate(_time_series(t, coeffs), z)
    return [
        out if isinstance(out, TaylorScalar) else TaylorScalar.constant(float(out), 0)
        for out in outputs
    ]


def residual_coefficient(series: TaylorScalar, level: int, equation: int):
    if level > series.order:
        raise ConsistencyError(
            f"방정식 {equation} 의 잔차 급수 차수 {series.order} 가 요구 차수 {level} 보다 작습니다."
        )
    return series.coeffs[level]


def coefficient_jacobian(
    dae,
    t: float,
    coeffs: Sequence[np.ndarray],
    rows: Sequence[Tuple[int, int]],
    cols: Sequence[Tuple[int, int]],
) -> np.ndarray:
    """
    잔차 계수의 항목 계수에 대한 야코비안 dF_i[l] / dX_j[m]

    테일러 급수 안에 역방향 스칼라를 넣는 순서로 중첩한다. 선택된 계수 X_j[m] 만 테이프의
    독립변수 (AdjointScalar) 로 두고 나머지 계수는 실수로 둔 채 TaylorScalar 로 잔차를 평가한
    뒤, 출력 계수 F_i[l] 마다 한 번씩 역전파한다.

    Args:
        dae: DaeSystem
        t (float): 전개 시각
        coeffs: 변수별 테일러 계수 배열
        rows: (방정식 i, 계수 l) 목록
        cols: (변수 j, 계수 m) 목록

    Returns:
        np.ndarray: len(rows) x len(cols) 행렬
    """
    tape = Tape()
    arrays = [np.array(row, dtype=object) for row in coeffs]
    for j, m in cols:
        arrays[j][m] = tape.variable(float(coeffs[j][m]))
    z = [TaylorScalar(row) for row in arrays]
    outputs = dae.evaluate(_time_series(t, coeffs), z)
    tape.stop()

    jac = np.zeros((len(rows), len(cols)))
    for r, (i, level) in enumerate(rows):
        out = outputs[i]
        if not isinstance(out, TaylorScalar):
            # 상수 출력: 어떤 계수에도 의존하지 않는다
            if isinstance(out, Real):
                continue
            raise ConsistencyError(f"방정식 {i} 의 출력 타입이 올바르지 않습니다: {type(out).__name__}")
        value = residual_coefficient(out, level, i)
        if not isinstance(value, AdjointScalar):
            continue
        jac[r, :] = [float(g) for g in backprop(tape, value)]
    return jac
