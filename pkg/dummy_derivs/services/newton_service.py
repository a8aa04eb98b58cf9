"""
야코비안 재사용 뉴턴 반복
"""
import logging
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from django.conf import settings
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from common.exceptions import NumericalException

logger = logging.getLogger(__name__)


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: np.ndarray
    converged: bool
    iterations: int
    factorizations: int
    message: str = ''

    @property
    def residual_norm(self) -> float:
        return float(np.max(np.abs(self.residual))) if self.residual.size else 0.0


def _factor(jac: np.ndarray):
    if not np.all(np.isfinite(jac)):
        return None
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', LinAlgWarning)
        lu, piv = lu_factor(jac)
    if not np.all(np.diag(lu)):
        return None
    return lu, piv


def newton_solve(
    residual_fn: Callable[[np.ndarray], np.ndarray],
    jacobian_fn: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    tol: float,
    max_iter: int = None,
    reuse: int = None,
) -> NewtonResult:
    """
    F(x) = 0 을 단순화 뉴턴으로 푼다

    야코비안은 최대 reuse 회 반복 재사용하고, 수렴이 느리면 (잔차 감소비 > 0.5) 다시 계산한다.
    수렴 조건: ||F||_inf <= tol
    스텝이 ||dx||_inf <= tol (1 + ||x||_inf) 로 작아졌는데 잔차가 줄지 않으면 정체로 보고 실패.

    Args:
        residual_fn: x -> F(x)
        jacobian_fn: x -> dF/dx
        x0: 초기값
        tol: 수렴 허용오차
        max_iter: 최대 반복 (기본 DAE_NEWTON_MAX_ITER)
        reuse: 야코비안 재사용 횟수 (기본 DAE_JACOBIAN_REUSE)

    Returns:
        NewtonResult (실패해도 예외 대신 converged=False)
    """
    max_iter = max_iter or getattr(settings, 'DAE_NEWTON_MAX_ITER', 20)
    reuse = reuse or getattr(settings, 'DAE_JACOBIAN_REUSE', 5)

    x = np.array(x0, dtype=float)
    try:
        r = np.asarray(residual_fn(x), dtype=float)
    except NumericalException as exc:
        return NewtonResult(x, np.array([np.inf]), False, 0, 0, str(exc))
    if r.size == 0 or np.max(np.abs(r)) <= tol:
        return NewtonResult(x, r, True, 0, 0)

    factors, age, count = None, 0, 0
    previous = np.max(np.abs(r))
    for iteration in range(1, max_iter + 1):
        try:
            if factors is None or age >= reuse:
                factors = _factor(np.asarray(jacobian_fn(x), dtype=float))
                age, count = 0, count + 1
                if factors is None:
                    return NewtonResult(x, r, False, iteration, count, "특이 야코비안")
            step = lu_solve(factors, -r)
            x = x + step
            r = np.asarray(residual_fn(x), dtype=float)
        except NumericalException as exc:
            return NewtonResult(x, r, False, iteration, count, str(exc))
        age += 1

        norm = np.max(np.abs(r))
        if not np.isfinite(norm):
            return NewtonResult(x, r, False, iteration, count, "잔차가 유한하지 않습니다")
        step_small = np.max(np.abs(step)) <= tol * (1.0 + np.max(np.abs(x)))
        if norm <= tol:
            return NewtonResult(x, r, True, iteration, count)
        if step_small and norm > 0.5 * previous:
            return NewtonResult(x, r, False, iteration, count, f"수렴 정체 (잔차 {norm:.3e})")
        if norm > 0.5 * previous:
            # 수렴이 느리면 다음 반복에서 야코비안 갱신
            age = reuse
        previous = norm

    logger.debug("newton did not converge in %d iterations (|F|=%.3e)", max_iter, previous)
    return NewtonResult(x, r, False, max_iter, count, f"{max_iter} 회 안에 수렴하지 않았습니다")
