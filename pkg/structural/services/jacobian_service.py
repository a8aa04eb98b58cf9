"""
시스템 야코비안과 SA-friendly 판정 서비스
"""
import logging
import warnings

import numpy as np
from django.conf import settings
from scipy.linalg import LinAlgWarning, lu_factor
from scipy.linalg.lapack import dgecon

from common.exceptions import SingularEvaluationError
from common.utils import factorials
from structural.items import ItemPoint, coefficient_jacobian
from structural.result import SAFriendliness, StructuralResult

logger = logging.getLogger(__name__)


def system_jacobian(dae, structural: StructuralResult, point: ItemPoint) -> np.ndarray:
    """
    J_ij = d f_i^(c_i) / d x_j^(d_j)

    계수 수준 편미분 dF_i[c_i]/dX_j[d_j] 에 c_i!/d_j! 를 곱해 도함수 수준으로 바꾼다.

    Args:
        dae: DaeSystem
        structural (StructuralResult): 구조 분석 결과
        point (ItemPoint): 항목 값 (변수 j 는 d_j 차까지 사용)

    Returns:
        np.ndarray: n x n 야코비안
    """
    c, d = structural.c, structural.d
    local = point.truncated(d)
    rows = [(i, c[i]) for i in range(dae.n)]
    cols = [(j, d[j]) for j in range(dae.n)]
    coeff_jac = coefficient_jacobian(dae, local.t, local.coeffs, rows, cols)
    fact = factorials(max(max(c), max(d)))
    scale = np.outer(fact[list(c)], 1.0 / fact[list(d)])
    return coeff_jac * scale


def estimate_rcond(matrix: np.ndarray) -> float:
    """
    LU 분해 기반 1-노름 역조건수 추정

    Returns:
        float: 0 (특이) ~ 1 (단위행렬)
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return 1.0
    if not np.all(np.isfinite(matrix)):
        return 0.0
    anorm = float(np.linalg.norm(matrix, 1))
    if anorm == 0.0:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', LinAlgWarning)
        lu, _ = lu_factor(matrix)
    if not np.all(np.diag(lu)):
        return 0.0
    rcond, info = dgecon(lu, anorm, norm='1')
    return float(rcond) if info == 0 else 0.0


def sa_friendly_check(dae, structural: StructuralResult, point: ItemPoint) -> SAFriendliness:
    """
    점에서 J 가 (구조적으로가 아니라) 실제로 정칙인지 판정

    Returns:
        SAFriendliness: friendly, rcond, jacobian
    """
    threshold = getattr(settings, 'DAE_SINGULAR_RCOND', 1e-12)
    try:
        jac = system_jacobian(dae, structural, point)
    except SingularEvaluationError as exc:
        logger.warning("system jacobian evaluation failed at t=%s: %s", point.t, exc)
        return SAFriendliness(False, 0.0, None, str(exc))

    rcond = estimate_rcond(jac)
    friendly = rcond >= threshold
    reason = '' if friendly else f"rcond {rcond:.3e} < {threshold:.1e}"
    return SAFriendliness(friendly, rcond, jac, reason)
