"""
축약 ODE x_S' = phi(t, x_S) 와 DD 전환

상태 항목 x_S 를 고정하고 나머지 항목을 증강 방정식에서 뉴턴으로 풀면, 상태 항목의
도함수 x_{j,l}' = x_{j,l+1} 을 읽을 수 있다.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from django.conf import settings

from common.exceptions import ChartFailureError
from dummy_derivs.augmented import AugmentedSystem
from dummy_derivs.scheme import DDScheme
from dummy_derivs.services.newton_service import newton_solve
from dummy_derivs.services.selection_service import scheme_quality, select_state_vector
from structural.items import ItemPoint
from structural.services.jacobian_service import system_jacobian

logger = logging.getLogger(__name__)


class ReducedOde:
    """
    한 차트(DD 스킴) 위의 축약 ODE

    스레드마다 하나씩 사용한다 (warm start 상태를 가진다).
    """

    def __init__(
        self,
        aug: AugmentedSystem,
        scheme: DDScheme,
        point: ItemPoint,
        newton_tol: float,
        max_iter: Optional[int] = None,
        reuse: Optional[int] = None,
    ):
        self.aug = aug
        self.structural = aug.structural
        self.newton_tol = newton_tol
        self.max_iter = max_iter
        self.reuse = reuse
        self.t = float(point.t)
        self.items = aug.pack(point)
        self._last = (self.t, self.items.copy())
        self.evaluations = 0
        self.set_scheme(scheme)

    def set_scheme(self, scheme: DDScheme):
        index = self.aug.item_index
        self.scheme = scheme
        self.state_index = np.array([index[item] for item in scheme.state_items], dtype=int)
        state = set(self.state_index.tolist())
        self.free_index = np.array([k for k in range(self.aug.n_x) if k not in state], dtype=int)
        self.rate_index = np.array([index[(j, l + 1)] for j, l in scheme.state_items], dtype=int)

    # ---- 상태 조회 ---------------------------------------------------------
    def state(self) -> np.ndarray:
        """현재 항목에서 x_S (도함수 형태)"""
        return self.aug.to_derivative_form(self.items)[self.state_index]

    def point(self) -> ItemPoint:
        return self.aug.unpack(self.t, self.items)

    def state_labels(self):
        labels = self.aug.item_labels
        return [labels[k] for k in self.state_index]

    # ---- 평가 -----------------------------------------------------------
    def solve(self, t: float, x_state: np.ndarray) -> np.ndarray:
        """
        x_S 를 고정하고 나머지 항목을 푼 전체 항목 벡터 (계수 형태)

        Raises:
            ChartFailureError: 뉴턴 실패 또는 특이 단계 행렬
        """
        vector = self.items.copy()
        if self.state_index.size:
            derivs = self.aug.to_derivative_form(vector)
            derivs[self.state_index] = x_state
            vector = self.aug.from_derivative_form(derivs)
        if self.free_index.size == 0:
            return vector

        def residual(free):
            trial = vector.copy()
            trial[self.free_index] = free
            return self.aug.residuals(t, trial)

        def jacobian(free):
            trial = vector.copy()
            trial[self.free_index] = free
            return self.aug.jacobian(t, trial, cols=self.free_index)

        result = newton_solve(
            residual, jacobian, vector[self.free_index], self.newton_tol,
            max_iter=self.max_iter, reuse=self.reuse,
        )
        if not result.converged or result.residual_norm > self.newton_tol:
            raise ChartFailureError(
                f"차트 delta={self.scheme.delta} 에서 t={t:.17g} 뉴턴 실패: {result.message or '허용오차 미달'} "
                f"(잔차 {result.residual_norm:.3e})"
            )
        vector[self.free_index] = result.x
        return vector

    def rhs(self, t: float, x_state: np.ndarray) -> np.ndarray:
        """x_S' (도함수 형태)"""
        self.evaluations += 1
        vector = self.solve(t, np.asarray(x_state, dtype=float))
        self._last = (float(t), vector)
        return self.aug.to_derivative_form(vector)[self.rate_index]

    def commit(self):
        """가장 최근에 푼 항목을 다음 풀이의 시작점으로 채택"""
        self.t, self.items = self._last[0], self._last[1].copy()


def reduced_ode_eval(reduced: ReducedOde, t: float, x_state) -> np.ndarray:
    """
    축약 ODE 우변 phi(t, x_S)

    Raises:
        ChartFailureError: 종속 항목 풀이 실패
    """
    return reduced.rhs(t, x_state)


@dataclass
class SwitchResult:
    scheme: DDScheme
    state: np.ndarray
    switched: bool
    quality_before: float


def dd_switch(
    reduced: ReducedOde,
    threshold: Optional[float] = None,
    jacobian: Optional[np.ndarray] = None,
) -> SwitchResult:
    """
    현재 항목에서 G_k 품질을 보고 필요하면 상태 벡터를 다시 선택

    항목 값은 그대로 두고 상태 집합 S 만 바꾼다 (재풀이 없음).

    Raises:
        NotSAFriendlyError: 현재 점에서 유효한 스킴이 없는 경우
    """
    threshold = getattr(settings, 'DAE_SWITCH_THRESHOLD', 0.2) if threshold is None else threshold
    singular = getattr(settings, 'DAE_SINGULAR_RCOND', 1e-12)
    point = reduced.point()
    jac = system_jacobian(reduced.aug.dae, reduced.structural, point) if jacobian is None else jacobian
    quality, worst = scheme_quality(reduced.scheme, reduced.structural, jac)
    if quality >= threshold and worst >= singular:
        return SwitchResult(reduced.scheme, reduced.state(), False, quality)

    scheme = select_state_vector(reduced.aug, reduced.structural, point, jacobian=jac)
    switched = not scheme.same_chart(reduced.scheme)
    reduced.set_scheme(scheme)
    if switched:
        logger.info(
            "DD switch at t=%.6g: delta %s (quality %.3g -> %.3g)",
            point.t, scheme.delta, quality, scheme.quality,
        )
    return SwitchResult(scheme, reduced.state(), switched, quality)
