"""
상태 벡터(더미 도함수) 선택 서비스

단계 k = -max d .. 0 마다 J_k 의 열 중 m_k 개를 골라 정칙인 G_k 를 만든다.
이전 단계에서 고른 변수는 계속 포함되고, 고르지 않은 열의 항목 x_j^(k+d_j) 가
상태 항목이 된다.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from scipy.linalg import qr, svdvals

from common.exceptions import NotSAFriendlyError, ValidationException
from dummy_derivs.scheme import DDScheme, DDSpecCheck, StageShape, stage_members, state_items_for
from structural.items import ItemPoint
from structural.result import StructuralResult
from structural.services.jacobian_service import system_jacobian

logger = logging.getLogger(__name__)


def _stage_quality(jk: np.ndarray, selected_pos: Sequence[int]) -> float:
    """sigma_min(G_k) / sigma_max(J_k)"""
    if jk.shape[0] == 0:
        return 1.0
    top = svdvals(jk)[0]
    if top == 0.0 or not np.isfinite(top):
        return 0.0
    return float(svdvals(jk[:, list(selected_pos)])[-1] / top)


def _pick_columns(jk: np.ndarray, forced: List[int], need: int) -> List[int]:
    """강제 열의 열공간을 뺀 나머지에서 열 피벗 QR 로 need 개 선택"""
    candidates = [p for p in range(jk.shape[1]) if p not in forced]
    if need <= 0:
        return []
    block = jk[:, candidates]
    if forced:
        basis, _ = qr(jk[:, forced], mode='economic')
        block = block - basis @ (basis.T @ block)
    _, pivots = qr(block, mode='r', pivoting=True)
    return [candidates[p] for p in pivots[:need]]


def _stage_report(structural: StructuralResult, columns: Dict[int, Tuple[int, ...]], jac: Optional[np.ndarray]):
    """
    단계별 크기/상태 항목과 선택 품질

    Returns:
        (stage_shapes, quality, worst, worst_stage): quality 는 선택이 있었던 단계의 최소값,
        worst 는 모든 단계의 최소값
    """
    c, d = structural.c, structural.d
    shapes, quality, worst, worst_stage = [], 1.0, 1.0, None
    for k, rows, cols in stage_members(c, d):
        chosen = columns[k]
        state = tuple((j, k + d[j]) for j in cols if j not in chosen)
        shapes.append(StageShape(k=k, rows=len(rows), cols=len(cols), state_items=state))
        if jac is None or not rows:
            continue
        jk = jac[np.ix_(rows, cols)]
        value = _stage_quality(jk, [cols.index(j) for j in chosen])
        if len(cols) > len(rows):
            quality = min(quality, value)
        if value < worst:
            worst, worst_stage = value, k
    return tuple(shapes), quality, worst, worst_stage


def select_state_vector(aug, structural: StructuralResult, point: ItemPoint, jacobian: np.ndarray = None) -> DDScheme:
    """
    점에서 조건이 좋은 G_k 열 선택으로 DD 스킴 결정

    Args:
        aug (AugmentedSystem): 증강 시스템
        structural (StructuralResult): 구조 분석 결과
        point (ItemPoint): 항목 값
        jacobian: 이미 계산한 시스템 야코비안 (생략 시 계산)

    Returns:
        DDScheme

    Raises:
        NotSAFriendlyError: 어떤 단계에서도 정칙 G_k 를 고를 수 없는 경우
    """
    jac = system_jacobian(aug.dae, structural, point) if jacobian is None else jacobian
    threshold = getattr(settings, 'DAE_SINGULAR_RCOND', 1e-12)

    selected: List[int] = []
    columns: Dict[int, Tuple[int, ...]] = {}
    for k, rows, cols in stage_members(structural.c, structural.d):
        if rows:
            jk = jac[np.ix_(rows, cols)]
            forced = [cols.index(j) for j in selected]
            extra = _pick_columns(jk, forced, len(rows) - len(forced))
            selected = sorted(selected + [cols[p] for p in extra])
        columns[k] = tuple(selected)

    delta = [0] * aug.dae.n
    for k, _, cols in stage_members(structural.c, structural.d):
        for j in cols:
            if j not in columns[k]:
                delta[j] += 1

    shapes, quality, worst, worst_stage = _stage_report(structural, columns, jac)
    if worst < threshold:
        raise NotSAFriendlyError(
            f"단계 k={worst_stage} 에서 정칙인 G_k 를 고를 수 없습니다 (품질 {worst:.3e})."
        )
    scheme = DDScheme(
        delta=tuple(delta),
        state_items=state_items_for(delta),
        gk_columns=columns,
        stage_shapes=shapes,
        quality=quality,
    )
    logger.debug("state vector selected at t=%s: delta=%s quality=%.3g", point.t, scheme.delta, quality)
    return scheme


def validate_dd_spec(delta: Sequence[int], structural: StructuralResult) -> DDSpecCheck:
    """
    DD-spec 벡터 검증

    1. 범위 0 <= delta_j <= d_j
    2. sum delta_j = DOF
    3. 단계별로 선택되는 변수 수가 J_k 행 수와 같음 (도함수가 빈틈없이 이어지는 상태 집합)
    """
    c, d = structural.c, structural.d
    if len(delta) != len(d):
        return DDSpecCheck(False, f"길이 {len(delta)} 가 변수 개수 {len(d)} 와 다릅니다.")
    for j, (value, dj) in enumerate(zip(delta, d)):
        if not 0 <= value <= dj:
            return DDSpecCheck(False, f"range: delta_{j}={value} 가 0..{dj} 범위를 벗어났습니다.")
    if sum(delta) != structural.dof:
        return DDSpecCheck(
            False, f"degree-of-freedom count: sum(delta)={sum(delta)} 가 자유도 {structural.dof} 와 다릅니다."
        )
    for k, rows, cols in stage_members(c, d):
        chosen = [j for j in cols if k >= delta[j] - d[j]]
        if len(chosen) != len(rows):
            return DDSpecCheck(
                False,
                f"stage count: 단계 k={k} 에서 G_k 열 {len(chosen)} 개, 행 {len(rows)} 개. "
                f"상태 항목이 변수별로 연속된 도함수를 이루지 못합니다.",
                stage=k,
            )
    return DDSpecCheck(True)


def scheme_from_delta(delta: Sequence[int], structural: StructuralResult, jacobian: np.ndarray = None) -> DDScheme:
    """
    사용자가 지정한 delta 로 스킴 구성

    Raises:
        ValidationException: delta 가 유효하지 않은 경우
    """
    check = validate_dd_spec(delta, structural)
    if not check.ok:
        raise ValidationException(f"잘못된 DD-spec {tuple(delta)}: {check.violation}")
    d = structural.d
    columns = {
        k: tuple(j for j in cols if k >= delta[j] - d[j])
        for k, _, cols in stage_members(structural.c, d)
    }
    shapes, quality, _, _ = _stage_report(structural, columns, jacobian)
    return DDScheme(
        delta=tuple(int(v) for v in delta),
        state_items=state_items_for(delta),
        gk_columns=columns,
        stage_shapes=shapes,
        quality=quality if jacobian is not None else None,
    )


def scheme_quality(scheme: DDScheme, structural: StructuralResult, jacobian: np.ndarray) -> Tuple[float, float]:
    """(선택 단계 최소 품질, 전체 단계 최소 품질)"""
    _, quality, worst, _ = _stage_report(structural, scheme.gk_columns, jacobian)
    return quality, worst
