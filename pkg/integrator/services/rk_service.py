"""
축약 ODE 의 RKF45 적분과 DD 전환
"""
import logging
import time

import numpy as np

from common.exceptions import ChartFailureError, IntegrationError, NotSAFriendlyError, ValidationException
from common.utils import mixed_error
from dummy_derivs.services.reduced_ode_service import ReducedOde, dd_switch, reduced_ode_eval
from integrator.services.taylor_service import first_stage_rates
from integrator.trajectory import IvpConfig, Trajectory, TrajectoryBuilder
from structural.services.jacobian_service import system_jacobian

logger = logging.getLogger(__name__)

# Runge-Kutta-Fehlberg 4(5)
_C = (0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2)
_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_B5 = (16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)
# 5 차 - 4 차 가중치
_TR = (1 / 360, 0.0, -128 / 4275, -2197 / 75240, 1 / 50, 2 / 55)

_ORDER = 5
_ALPHA = 0.7 / _ORDER
_BETA = 0.4 / _ORDER


def _attempt(reduced: ReducedOde, t: float, y: np.ndarray, k1: np.ndarray, h: float):
    """한 스텝 시도: (5 차 해, 오차 추정)"""
    ks = [k1]
    for i in range(1, len(_C)):
        stage = y + h * sum(a * k for a, k in zip(_A[i], ks))
        ks.append(reduced_ode_eval(reduced, t + _C[i] * h, stage))
    y_new = y + h * sum(b * k for b, k in zip(_B5, ks) if b)
    err = h * sum(e * k for e, k in zip(_TR, ks) if e)
    return y_new, err


def _sample(builder: TrajectoryBuilder, reduced: ReducedOde, jac: np.ndarray):
    point = reduced.point()
    items = reduced.aug.to_derivative_form(reduced.items)
    rates = first_stage_rates(reduced.aug.dae, reduced.structural, point, jac)
    builder.append(point.t, items, rates, reduced.scheme.delta)


def rk_integrate(reduced: ReducedOde, cfg: IvpConfig) -> Trajectory:
    """
    축약 ODE x_S' = phi(t, x_S) 를 내장 RK 쌍으로 적분

    5 차 해를 전진시키고 (국소 외삽) PI 제어로 스텝을 정한다. 차트 실패가 나면 현재 점에서
    상태 벡터를 다시 고르고, 같은 차트가 나오면 스텝을 줄인다. 채택된 스텝마다 G_k 품질을
    확인해 문턱값 아래면 전환한다. 전환은 항목 값을 바꾸지 않는다.

    Raises:
        ValidationException: 자유도가 0 인 문제
        IntegrationError: 전환 실패, 스텝 크기 소멸, max_steps 초과
    """
    if reduced.structural.dof == 0:
        raise ValidationException("자유도가 0 인 문제는 적분할 축약 ODE 가 없습니다.")

    started = time.process_time()
    aug = reduced.aug
    builder = TrajectoryBuilder(aug.items, aug.dae.names, reduced.structural.d, 'dd-rk')
    stats = builder.stats
    low, high = cfg.growth

    def check_chart(threshold=None):
        point = reduced.point()
        jac = system_jacobian(aug.dae, reduced.structural, point)
        stats.jacobians += 1
        try:
            result = dd_switch(reduced, threshold=threshold, jacobian=jac)
        except NotSAFriendlyError as exc:
            raise IntegrationError(f"상태 벡터 전환 실패: {exc}", point.t) from exc
        if result.switched:
            stats.switches += 1
        return result, jac

    t = reduced.t
    result, jac = check_chart(cfg.switch_threshold)
    y = result.state
    try:
        k1 = reduced_ode_eval(reduced, t, y)
    except ChartFailureError as exc:
        raise IntegrationError(f"초기 차트에서 축약 ODE 평가 실패: {exc}", t) from exc
    reduced.commit()
    _sample(builder, reduced, jac)

    h = min(cfg.t_end - t, cfg.tol ** (1.0 / _ORDER))
    err_prev = None
    while t < cfg.t_end:
        if stats.accepted + stats.rejected >= cfg.max_steps:
            raise IntegrationError(f"최대 스텝 수 {cfg.max_steps} 를 넘었습니다", t)
        if h <= 16 * np.finfo(float).eps * max(1.0, abs(t)):
            raise IntegrationError(f"스텝 크기가 너무 작아졌습니다 (h={h:.3e})", t)
        h = min(h, cfg.t_end - t)
        t_new = cfg.t_end if h >= cfg.t_end - t else t + h

        try:
            y_new, err_vec = _attempt(reduced, t, y, k1, t_new - t)
            err = mixed_error(err_vec, np.maximum(np.abs(y), np.abs(y_new)), cfg.tol)
            if err <= 1.0:
                k1_new = reduced_ode_eval(reduced, t_new, y_new)
        except ChartFailureError as exc:
            stats.rejected += 1
            logger.debug("chart failure at t=%.6g: %s", t, exc)
            # 같은 점에서 강제로 다시 선택, 차트가 그대로면 스텝 축소
            result, _ = check_chart(threshold=float('inf'))
            if result.switched:
                y = result.state
                k1 = reduced_ode_eval(reduced, t, y)
                reduced.commit()
            else:
                h *= 0.5
            continue

        if err > 1.0:
            stats.rejected += 1
            h *= max(low, cfg.safety * err ** (-1.0 / _ORDER))
            logger.debug("step rejected at t=%.6g: h=%.3e err=%.3e", t, h, err)
            continue

        # 채택
        reduced.commit()
        stats.record_step(t_new - t)
        t, y, k1 = t_new, y_new, k1_new
        if err == 0.0:
            factor = high
        elif err_prev is None:
            factor = cfg.safety * err ** (-1.0 / _ORDER)
        else:
            factor = cfg.safety * err ** (-_ALPHA) * err_prev ** _BETA
        h *= min(high, max(low, factor))
        err_prev = max(err, 1e-4)

        result, jac = check_chart(cfg.switch_threshold)
        if result.switched:
            y = result.state
            k1 = reduced_ode_eval(reduced, t, y)
            reduced.commit()
            err_prev = None
        _sample(builder, reduced, jac)

    stats.cpu_s = time.process_time() - started
    logger.info(
        "dd-rk integration done: %d accepted, %d rejected, %d switches",
        stats.accepted, stats.rejected, stats.switches,
    )
    return builder.build()
