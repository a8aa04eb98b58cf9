"""
가변 스텝 테일러 급수 적분 서비스

스텝마다 시스템 야코비안 J 를 한 번 LU 분해하고, 오프셋이 정하는 단계 k = 1 .. p 에서
미지 계수 X_j[k+d_j] 를 선형계 하나로 구한다. 단계 k 의 잔차 F_i[k+c_i] 는 미지 계수에
대해 아핀이고 계수 행렬은 (k+d_j)!/(k+c_i)! J_ij 이다.
"""
import logging
import time
import warnings
from typing import List, Sequence, Tuple

import numpy as np
from django.conf import settings
from scipy.linalg import LinAlgWarning, lstsq, lu_factor, lu_solve

from common.exceptions import IntegrationError, NumericalException
from common.utils import factorials
from dummy_derivs.augmented import AugmentedSystem
from integrator.trajectory import IvpConfig, Trajectory, TrajectoryBuilder
from structural.items import ItemPoint, evaluate_series, residual_coefficient
from structural.result import StructuralResult
from structural.services.jacobian_service import estimate_rcond, system_jacobian

logger = logging.getLogger(__name__)


def factor_jacobian(jac: np.ndarray, t: float):
    """
    J 를 LU 분해

    Raises:
        IntegrationError: J 가 (수치적으로) 특이한 경우
    """
    threshold = getattr(settings, 'DAE_SINGULAR_RCOND', 1e-12)
    rcond = estimate_rcond(jac)
    if rcond < threshold:
        logger.warning("system jacobian singular at t=%.17g (rcond %.3e)", t, rcond)
        raise IntegrationError(f"시스템 야코비안이 특이합니다 (rcond {rcond:.3e})", t)
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', LinAlgWarning)
        return lu_factor(jac)


def taylor_expand(dae, structural: StructuralResult, point: ItemPoint, lu, order: int) -> List[np.ndarray]:
    """
    점에서 변수 j 의 계수 X_j[0 .. order+d_j] 를 단계별로 생성

    Args:
        dae: DaeSystem
        structural (StructuralResult): 구조 분석 결과
        point (ItemPoint): 일관된 점 (변수 j 는 d_j 차까지 사용)
        lu: factor_jacobian 결과
        order (int): 단계 수 p

    Returns:
        List[np.ndarray]: 변수별 테일러 계수
    """
    c, d = structural.c, structural.d
    fact = factorials(order + max(structural.max_c, structural.max_d))
    rows = [row.copy() for row in point.truncated(d).coeffs]
    c_arr = np.asarray(c, dtype=int)
    d_arr = np.asarray(d, dtype=int)
    for k in range(1, order + 1):
        # 미지 계수 자리를 0 으로 두고 잔차를 평가하면 아핀 함수의 상수항이 나온다
        rows = [np.append(row, 0.0) for row in rows]
        series = evaluate_series(dae, point.t, rows)
        residual = np.array(
            [float(residual_coefficient(series[i], k + c[i], i)) for i in range(dae.n)]
        )
        y = lu_solve(lu, -fact[k + c_arr] * residual)
        scaled = y / fact[k + d_arr]
        for j in range(dae.n):
            rows[j][k + d[j]] = scaled[j]
    return rows


def item_values(rows: Sequence[np.ndarray], items: Sequence[Tuple[int, int]]) -> np.ndarray:
    """계수 배열에서 항목 x_j^(l) (도함수 형태)"""
    fact = factorials(max(l for _, l in items) + 1)
    return np.array([rows[j][l] * fact[l] for j, l in items])


def item_rates(rows: Sequence[np.ndarray], items: Sequence[Tuple[int, int]]) -> np.ndarray:
    """계수 배열에서 항목의 시간 도함수 x_j^(l+1) (도함수 형태)"""
    fact = factorials(max(l for _, l in items) + 1)
    return np.array([rows[j][l + 1] * fact[l + 1] for j, l in items])


def first_stage_rates(dae, structural: StructuralResult, point: ItemPoint, jac: np.ndarray) -> np.ndarray:
    """단계 1 풀이로 얻은 항목 도함수 (증강 시스템 항목 순서)"""
    rows = taylor_expand(dae, structural, point, factor_jacobian(jac, point.t), 1)
    items = [(j, l) for j in range(dae.n) for l in range(structural.d[j] + 1)]
    return item_rates(rows, items)


def _shift(row: np.ndarray, h: float, count: int) -> np.ndarray:
    """급수를 t+h 로 재전개한 앞쪽 count 개 계수 (Horner)"""
    a = np.array(row, dtype=float)
    n = a.size - 1
    for i in range(min(count, n)):
        for m in range(n - 1, i - 1, -1):
            a[m] += h * a[m + 1]
    return a[:count]


def _error_terms(rows: Sequence[np.ndarray], items: Sequence[Tuple[int, int]], tol: float):
    """
    항목별 나머지 추정 항 (크기 a, 거듭제곱 q)

    항목 x_j^(l) 의 급수에서 가장 높은 두 계수 N' in {p+d_j-1, p+d_j} 의 기여
    N'!/(N'-l)! |X_j[N']| h^(N'-l) 를 tol (1 + |x_j^(l)|) 로 나눈다.
    """
    terms = []
    top = max(row.size for row in rows)
    fact = factorials(top)
    for j, l in items:
        row = rows[j]
        scale = tol * (1.0 + abs(row[l] * fact[l]))
        for n in (row.size - 2, row.size - 1):
            if n <= l:
                continue
            size = fact[n] / fact[n - l] * abs(row[n]) / scale
            if size > 0.0:
                terms.append((size, n - l))
    return terms


def _error_norm(terms, h: float) -> float:
    return max((a * h ** q for a, q in terms), default=0.0)


def _first_step(terms, safety: float, span: float) -> float:
    if not terms:
        return span
    return min(span, min(safety * (1.0 / a) ** (1.0 / q) for a, q in terms))


def _project(aug: AugmentedSystem, t: float, vector: np.ndarray, cfg: IvpConfig):
    """
    증강 방정식 위로 최소 노름 가우스-뉴턴 사영

    Returns:
        사영된 항목 벡터, 실패 시 None
    """
    x = vector.copy()
    matrix = None
    for _ in range(cfg.newton_max_iter):
        r = aug.residuals(t, x)
        if np.max(np.abs(r)) <= cfg.newton_tol:
            return x
        if matrix is None:
            matrix = aug.jacobian(t, x)
        step, *_ = lstsq(matrix, -r)
        x = x + step
    return None


def taylor_integrate(dae, structural: StructuralResult, point: ItemPoint, cfg: IvpConfig) -> Trajectory:
    """
    SA-friendly DAE 를 테일러 급수법으로 적분

    Args:
        dae: DaeSystem
        structural (StructuralResult): 구조 분석 결과
        point (ItemPoint): t0 의 일관된 점
        cfg (IvpConfig): 적분 설정

    Returns:
        Trajectory: 채택된 모든 스텝 끝점의 항목과 도함수

    Raises:
        IntegrationError: J 특이, 스텝 크기 소멸, max_steps 초과
    """
    started = time.process_time()
    aug = AugmentedSystem(dae, structural)
    builder = TrajectoryBuilder(aug.items, dae.names, structural.d, 'taylor')
    stats = builder.stats
    low, high = cfg.growth
    d = structural.d
    p = cfg.order

    t = float(point.t)
    vector = aug.pack(point)
    h_next = None

    while True:
        current = aug.unpack(t, vector)
        jac = system_jacobian(dae, structural, current)
        stats.jacobians += 1
        lu = factor_jacobian(jac, t)
        if t >= cfg.t_end:
            rows = taylor_expand(dae, structural, current, lu, 1)
            builder.append(t, item_values(rows, aug.items), item_rates(rows, aug.items))
            break

        # 1. 단계별 계수 생성
        try:
            rows = taylor_expand(dae, structural, current, lu, p)
        except NumericalException as exc:
            raise IntegrationError(f"테일러 계수 생성 실패: {exc}", t) from exc
        builder.append(t, item_values(rows, aug.items), item_rates(rows, aug.items))

        # 2. 스텝 크기 결정 (거절 시 같은 급수를 재사용)
        terms = _error_terms(rows, aug.items, cfg.tol)
        span = cfg.t_end - t
        h = _first_step(terms, cfg.safety, span) if h_next is None else min(h_next, span)
        while True:
            if stats.accepted + stats.rejected >= cfg.max_steps:
                raise IntegrationError(f"최대 스텝 수 {cfg.max_steps} 를 넘었습니다", t)
            if h <= 16 * np.finfo(float).eps * max(1.0, abs(t)):
                raise IntegrationError(f"스텝 크기가 너무 작아졌습니다 (h={h:.3e})", t)
            err = _error_norm(terms, h)
            if err <= 1.0:
                # 3. 재전개 후 사영
                t_new = cfg.t_end if h >= span else t + h
                shifted = [_shift(rows[j], t_new - t, d[j] + 1) for j in range(dae.n)]
                moved = np.array([shifted[j][l] for j, l in aug.items])
                try:
                    projected = _project(aug, t_new, moved, cfg)
                except NumericalException as exc:
                    logger.debug("projection raised at t=%.6g: %s", t_new, exc)
                    projected = None
                if projected is not None:
                    break
                err = 4.0 ** (p + 1)
            stats.rejected += 1
            shrink = max(low, cfg.safety * err ** (-1.0 / (p + 1)))
            logger.debug("step rejected at t=%.6g: h=%.3e err=%.3e", t, h, err)
            h *= shrink

        stats.record_step(t_new - t)
        factor = high if err == 0.0 else min(high, max(low, cfg.safety * err ** (-1.0 / (p + 1))))
        h_next = h * factor
        t, vector = t_new, projected

    stats.cpu_s = time.process_time() - started
    logger.info(
        "taylor integration done: %d accepted, %d rejected, h in [%.3g, %.3g]",
        stats.accepted, stats.rejected, stats.h_min, stats.h_max,
    )
    return builder.build()
