"""
시그니처 행렬 구조 분석 서비스
"""
import logging
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from common.exceptions import (
    OffsetIterationError,
    StructuralSingularityError,
    ValidationException,
)
from structural.result import StructuralResult
from structural.signature import SignatureScalar

logger = logging.getLogger(__name__)

NEG_INF = -np.inf


def signature_matrix(dae) -> np.ndarray:
    """
    잔차 코드를 시그니처 스칼라로 실행해 Σ 를 추출

    Args:
        dae: DaeSystem

    Returns:
        np.ndarray: n x n 실수 행렬 (없는 항목은 -inf)

    Raises:
        UnsupportedStructureError: 잔차 코드가 값에 따라 분기하는 경우
    """
    z = [SignatureScalar.of_variable(j) for j in range(dae.n)]
    outputs = dae.evaluate(SignatureScalar(), z)

    sigma = np.full((dae.n, dae.n), NEG_INF)
    for i, out in enumerate(outputs):
        # 상수 출력은 어떤 변수에도 의존하지 않는다
        orders = out.orders if isinstance(out, SignatureScalar) else {}
        for j, order in orders.items():
            sigma[i, j] = order
    return sigma


def _unmatched(finite: np.ndarray) -> Tuple[List[int], List[int]]:
    matching = maximum_bipartite_matching(csr_matrix(finite.astype(int)), perm_type='column')
    rows = [i for i, j in enumerate(matching) if j < 0]
    matched_cols = {int(j) for j in matching if j >= 0}
    cols = [j for j in range(finite.shape[1]) if j not in matched_cols]
    return rows, cols


def highest_value_transversal(sigma: np.ndarray) -> Tuple[Tuple[Tuple[int, int], ...], int]:
    """
    유한 항목만으로 이루어진 transversal 중 합이 최대인 것

    Args:
        sigma (np.ndarray): 정방 시그니처 행렬

    Returns:
        (transversal, value): 행 순서의 (i, j) 쌍과 그 합

    Raises:
        StructuralSingularityError: 유한한 transversal 이 없는 경우
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ValidationException(f"시그니처 행렬은 정방이어야 합니다: {sigma.shape}")

    finite = np.isfinite(sigma)
    cost = np.where(finite, -sigma, np.inf)
    try:
        rows, cols = linear_sum_assignment(cost)
    except ValueError as exc:
        unmatched_rows, unmatched_cols = _unmatched(finite)
        raise StructuralSingularityError(
            f"구조적으로 특이한 DAE 입니다. 짝이 없는 방정식 {unmatched_rows}, 변수 {unmatched_cols}",
            unmatched_rows=unmatched_rows,
            unmatched_cols=unmatched_cols,
        ) from exc

    transversal = tuple((int(i), int(j)) for i, j in zip(rows, cols))
    value = int(sum(sigma[i, j] for i, j in transversal))
    return transversal, value


def canonical_offsets(
    sigma: np.ndarray, transversal: Sequence[Tuple[int, int]]
) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    가장 작은 비음수 오프셋 (c, d) 고정점 반복

    Args:
        sigma (np.ndarray): 시그니처 행렬
        transversal: 최대값 transversal

    Returns:
        (c, d)

    Raises:
        OffsetIterationError: 반복 상한 (n^2 + n) 초과, 즉 transversal 이 최대가 아님
    """
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0]
    finite = np.isfinite(sigma)
    partner = dict(transversal)
    if sorted(partner) != list(range(n)):
        raise ValidationException("transversal 은 모든 행을 정확히 한 번씩 포함해야 합니다.")

    c = np.zeros(n, dtype=int)
    d = np.zeros(n, dtype=int)
    for sweep in range(n * n + n + 1):
        shifted = np.where(finite, sigma + c[:, None], NEG_INF)
        d = shifted.max(axis=0).astype(int)
        new_c = np.array([d[partner[i]] - int(sigma[i, partner[i]]) for i in range(n)], dtype=int)
        if np.array_equal(new_c, c):
            logger.debug("offsets converged after %d sweeps: c=%s d=%s", sweep + 1, c, d)
            return tuple(int(v) for v in c), tuple(int(v) for v in d)
        c = new_c
    raise OffsetIterationError(
        f"오프셋 반복이 {n * n + n} 회 안에 끝나지 않았습니다. transversal 이 최대값이 아닙니다."
    )


def index_and_dof(c: Sequence[int], d: Sequence[int]) -> Tuple[int, int]:
    """(구조적 인덱스 nu = max c, 자유도 = sum d - sum c)"""
    return max(c, default=0), int(sum(d) - sum(c))


def analyze(dae) -> StructuralResult:
    """
    DAE 구조 분석 전체 파이프라인

    1. Σ 추출
    2. 최대값 transversal
    3. 정준 오프셋
    4. 인덱스/자유도, 야코비안 패턴

    Args:
        dae: DaeSystem

    Returns:
        StructuralResult
    """
    sigma = signature_matrix(dae)
    transversal, value = highest_value_transversal(sigma)
    c, d = canonical_offsets(sigma, transversal)
    nu, dof = index_and_dof(c, d)

    pattern = {
        (i, j)
        for i in range(dae.n)
        for j in range(dae.n)
        if np.isfinite(sigma[i, j]) and d[j] - c[i] == sigma[i, j]
    }
    logger.info("structural analysis: n=%d nu=%d dof=%d", dae.n, nu, dof)
    return StructuralResult(
        sigma=sigma,
        transversal=transversal,
        value=value,
        c=c,
        d=d,
        nu=nu,
        dof=dof,
        jac_pattern=pattern,
        names=tuple(dae.names),
        equation_names=tuple(dae.equation_names),
    )
