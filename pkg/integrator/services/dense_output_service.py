import numpy as np
from scipy.interpolate import CubicHermiteSpline

from common.exceptions import ValidationException
from integrator.trajectory import Trajectory


def dense_output(traj: Trajectory, t) -> np.ndarray:
    """
    인접 표본 사이 (값, 도함수) 에르미트 3 차 보간

    Args:
        traj (Trajectory): 적분 결과
        t: 시각 (스칼라 또는 배열)

    Returns:
        np.ndarray: 스칼라면 (항목 수,), 배열이면 (len(t), 항목 수). 표본 시각에서는 표본 그대로.

    Raises:
        ValidationException: t 가 [t0, t_end] 밖인 경우
    """
    times = np.atleast_1d(np.asarray(t, dtype=float))
    lo, hi = traj.times[0], traj.times[-1]
    if np.any(times < lo) or np.any(times > hi) or not np.all(np.isfinite(times)):
        raise ValidationException(f"보간 시각이 적분 구간 [{lo:.17g}, {hi:.17g}] 밖입니다.")

    if traj.times.size == 1:
        values = np.repeat(traj.items[:1], times.size, axis=0)
    else:
        spline = CubicHermiteSpline(traj.times, traj.items, traj.rates, axis=0)
        values = spline(times)
        knots = np.searchsorted(traj.times, times)
        exact = (knots < traj.times.size) & (traj.times[np.minimum(knots, traj.times.size - 1)] == times)
        values[exact] = traj.items[knots[exact]]
    return values[0] if np.ndim(t) == 0 else values
