"""
일관된 초기점 계산 서비스
"""
import logging
from typing import Dict, List, Mapping, Tuple

import numpy as np

from common.exceptions import InconsistentInitialConditionError, ValidationException
from common.utils import parse_item_label
from dummy_derivs.augmented import AugmentedSystem
from dummy_derivs.services.newton_service import newton_solve
from dummy_derivs.services.selection_service import validate_dd_spec
from structural.items import ItemPoint
from structural.result import StructuralResult

logger = logging.getLogger(__name__)


def _resolve(names, labels: Mapping[str, float], d) -> Dict[Tuple[int, int], float]:
    """'x', "y'" 같은 라벨을 (변수, 미분 횟수) 항목으로 변환"""
    index = {name: j for j, name in enumerate(names)}
    items = {}
    for label, value in labels.items():
        name, level = parse_item_label(label)
        if name not in index:
            raise ValidationException(f"알 수 없는 변수입니다: {name} (변수: {', '.join(names)})")
        j = index[name]
        if level > d[j]:
            raise ValidationException(f"항목 {label} 의 미분 횟수가 d_{name}={d[j]} 보다 큽니다.")
        items[(j, level)] = float(value)
    return items


def fixed_delta(structural: StructuralResult, names, fixed: Mapping[str, float]) -> Tuple[int, ...]:
    """
    고정 항목이 이루는 DD-spec 벡터

    변수별 고정 항목은 0 계부터 빈틈없이 이어져야 하고 d_j 계 항목은 고정할 수 없다.

    Raises:
        ValidationException: 고정 항목이 유효한 DD-spec 을 이루지 못하는 경우
    """
    d = structural.d
    items = _resolve(names, fixed, d)
    delta = [0] * len(d)
    for j in range(len(d)):
        levels = sorted(level for var, level in items if var == j)
        if levels and levels[-1] >= d[j]:
            raise ValidationException(
                f"{names[j]} 의 {levels[-1]} 계 항목은 상태 항목이 될 수 없습니다 (d={d[j]})."
            )
        if levels != list(range(len(levels))):
            raise ValidationException(f"{names[j]} 의 고정 항목은 0 계부터 연속이어야 합니다: {levels}")
        delta[j] = len(levels)
    check = validate_dd_spec(delta, structural)
    if not check.ok:
        raise ValidationException(
            f"고정 항목 {sorted(fixed)} 은 자유도 {structural.dof} 의 유효한 상태 집합이 아닙니다: {check.violation}"
        )
    return tuple(delta)


def consistent_initialize(
    dae,
    structural: StructuralResult,
    ic_spec: Mapping[str, Mapping[str, float]],
    t0: float,
    newton_tol: float,
    max_iter: int = None,
) -> ItemPoint:
    """
    고정 항목을 두고 나머지 항목을 증강 방정식에서 뉴턴으로 풀어 일관된 점을 만든다

    Args:
        dae: DaeSystem
        structural (StructuralResult): 구조 분석 결과
        ic_spec: {'fixed': {라벨: 값}, 'guess': {라벨: 값}} (도함수 형태)
        t0 (float): 초기 시각
        newton_tol (float): 잔차 허용오차

    Returns:
        ItemPoint: 모든 증강 잔차가 newton_tol 이하인 점 (고정 항목은 그대로)

    Raises:
        ValidationException: 고정 항목이 DOF 개의 유효한 상태 집합이 아닌 경우
        InconsistentInitialConditionError: 뉴턴 실패 (최대 잔차 3 개를 함께 보고)
    """
    fixed_labels = dict(ic_spec.get('fixed') or {})
    guess_labels = dict(ic_spec.get('guess') or {})
    overlap = sorted(set(fixed_labels) & set(guess_labels))
    if overlap:
        raise ValidationException(f"고정값과 추정값에 같은 항목이 있습니다: {', '.join(overlap)}")

    # 1. 고정 항목 검증
    fixed_delta(structural, dae.names, fixed_labels)
    fixed = _resolve(dae.names, fixed_labels, structural.d)
    guess = _resolve(dae.names, guess_labels, structural.d)

    # 2. 도함수 형태 시작 벡터 (지정 없는 항목은 0)
    aug = AugmentedSystem(dae, structural)
    derivs = np.zeros(aug.n_x)
    for item, value in {**guess, **fixed}.items():
        derivs[aug.item_index[item]] = value
    vector = aug.from_derivative_form(derivs)
    free = np.array([k for k, item in enumerate(aug.items) if item not in fixed], dtype=int)

    # 3. 자유 항목에 대한 뉴턴
    def residual(values):
        trial = vector.copy()
        trial[free] = values
        return aug.residuals(t0, trial)

    def jacobian(values):
        trial = vector.copy()
        trial[free] = values
        return aug.jacobian(t0, trial, cols=free)

    result = newton_solve(residual, jacobian, vector[free], newton_tol, max_iter=max_iter)
    if not result.converged or result.residual_norm > newton_tol:
        worst = _worst_residuals(aug.equation_labels, result.residual)
        logger.warning("consistent initialization failed: %s", result.message)
        raise InconsistentInitialConditionError(
            f"일관된 초기점을 찾지 못했습니다: {result.message or '허용오차 미달'}", worst
        )
    vector[free] = result.x
    logger.debug("consistent point found in %d newton iterations", result.iterations)
    return aug.unpack(t0, vector)


def _worst_residuals(labels: List[str], residual: np.ndarray, count: int = 3) -> List[Tuple[str, float]]:
    residual = np.asarray(residual, dtype=float)
    if residual.size != len(labels):
        return []
    order = np.argsort(-np.abs(np.nan_to_num(residual, nan=np.inf)))[:count]
    return [(labels[k], float(residual[k])) for k in order]
