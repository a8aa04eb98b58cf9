"""
허용오차 자기 일관성 비교
"""
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from common.exceptions import ValidationException
from integrator.services.dense_output_service import dense_output
from integrator.services.ivp_service import integrate
from integrator.trajectory import IvpConfig, Trajectory
from structural.items import ItemPoint
from structural.result import StructuralResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DivergenceReport:
    tol: float
    reference_tol: float
    times: Tuple[float, ...]
    differences: Tuple[float, ...]

    @property
    def max_difference(self) -> float:
        return max(self.differences, default=0.0)

    @property
    def digits(self) -> float:
        """일치하는 유효숫자 수 (차이가 0 이면 inf)"""
        worst = self.max_difference
        return math.inf if worst == 0.0 else -math.log10(worst)


def position_difference(first: Trajectory, second: Trajectory, times: Sequence[float]) -> Tuple[float, ...]:
    """시각별 0 계 항목의 상대 2-노름 차이"""
    keys = [k for k, (_, level) in enumerate(first.item_keys) if level == 0]
    a = np.atleast_2d(dense_output(first, np.asarray(times, dtype=float)))[:, keys]
    b = np.atleast_2d(dense_output(second, np.asarray(times, dtype=float)))[:, keys]
    diffs = []
    for row_a, row_b in zip(a, b):
        scale = max(np.linalg.norm(row_b), np.finfo(float).tiny)
        diffs.append(float(np.linalg.norm(row_a - row_b) / scale))
    return tuple(diffs)


def tolerance_divergence(
    dae,
    structural: StructuralResult,
    point: ItemPoint,
    cfg: IvpConfig,
    reference_tol: float,
    times: Sequence[float] = (),
    method: str = 'taylor',
) -> DivergenceReport:
    """
    같은 문제를 두 허용오차로 적분해 위치 차이를 비교

    Args:
        cfg (IvpConfig): 기준 설정 (cfg.tol 로 한 번)
        reference_tol (float): 더 엄격한 허용오차 (한 번 더)
        times: 비교 시각 (비우면 t_end)

    Returns:
        DivergenceReport
    """
    if not reference_tol < cfg.tol:
        raise ValidationException("reference_tol 은 tol 보다 작아야 합니다.")
    times = tuple(float(t) for t in times) or (cfg.t_end,)
    coarse = integrate(dae, structural, point, cfg, method)
    fine = integrate(dae, structural, point, cfg.with_tol(reference_tol), method)
    report = DivergenceReport(cfg.tol, reference_tol, times, position_difference(coarse, fine, times))
    logger.info(
        "tolerance divergence %.1e vs %.1e: max %.3e (%.1f digits)",
        cfg.tol, reference_tol, report.max_difference, report.digits,
    )
    return report
