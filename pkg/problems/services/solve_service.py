"""
문제 풀이 서비스: 적분, 보존량 드리프트, 파라미터 스윕
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np
from django.conf import settings

from common.exceptions import BaseAppException, ValidationException
from integrator.services.ivp_service import integrate
from integrator.trajectory import IvpConfig, Trajectory
from problems.definition import ProblemDef
from problems.services.problem_service import PreparedProblem, prepare_problem

logger = logging.getLogger(__name__)


def solve_prepared(
    prepared: PreparedProblem, cfg: IvpConfig, method: str = 'taylor', dd_spec: Optional[Sequence[int]] = None
) -> Trajectory:
    if prepared.point is None:
        raise ValidationException("초기화되지 않은 문제입니다.")
    return integrate(prepared.dae, prepared.structural, prepared.point, cfg, method, dd_spec)


def invariant_series(problem: ProblemDef, params: Mapping[str, Any], traj: Trajectory) -> Dict[str, np.ndarray]:
    """표본마다 보존량 값"""
    samples = [traj.sample(i) for i in range(traj.times.size)]
    return {
        name: np.array([func(params, sample) for sample in samples])
        for name, func in problem.invariants.items()
    }


def invariant_drift(problem: ProblemDef, params: Mapping[str, Any], traj: Trajectory) -> Dict[str, float]:
    """
    max |I(t) - I(0)| / |I(0)| (I(0) = 0 이면 절대 드리프트)
    """
    drift = {}
    for name, values in invariant_series(problem, params, traj).items():
        start = values[0]
        deviation = float(np.max(np.abs(values - start)))
        drift[name] = deviation / abs(start) if start != 0.0 else deviation
    return drift


@dataclass
class SweepResult:
    value: Any
    trajectory: Optional[Trajectory] = None
    error: str = ''
    watched: Dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.trajectory is not None


def run_sweep(
    name: str,
    key: str,
    values: Sequence[Any],
    params: Optional[Mapping[str, Any]],
    cfg: IvpConfig,
    method: str = 'taylor',
    ic: Optional[Mapping[str, Any]] = None,
    fixed: Optional[Mapping[str, Any]] = None,
    watch: Sequence[str] = (),
    workers: Optional[int] = None,
) -> List[SweepResult]:
    """
    파라미터 하나를 바꿔 가며 독립적인 적분을 스레드 풀에서 실행

    실패한 값은 예외 대신 error 메시지를 담아 돌려준다 (입력 순서 유지).
    """
    workers = workers or getattr(settings, 'DAE_SWEEP_WORKERS', 4)

    def run(value):
        local = {**(params or {}), key: value}
        try:
            prepared = prepare_problem(name, local, ic, fixed, cfg.t0, cfg.newton_tol)
            traj = solve_prepared(prepared, cfg, method)
            watched = {label: float(np.max(np.abs(traj.column(label)))) for label in watch}
        except BaseAppException as exc:
            logger.warning("sweep %s=%s failed: %s", key, value, exc.message)
            return SweepResult(value, error=f"[{exc.error_code}] {exc.message}")
        return SweepResult(value, traj, watched=watched)

    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(run, values))
