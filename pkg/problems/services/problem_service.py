"""
내장 문제 준비 서비스: 파라미터 검증, 구조 분석, 일관된 초기점
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional

from common.exceptions import ValidationException
from common.utils import parse_number
from integrator.services.consistent_init_service import consistent_initialize
from lagrangian.system import DaeSystem, LagrangianSpec
from problems.definition import ProblemDef
from problems.registry import get_problem
from structural.items import ItemPoint
from structural.result import StructuralResult
from structural.services.analysis_service import analyze

logger = logging.getLogger(__name__)


@dataclass
class PreparedProblem:
    problem: ProblemDef
    dae: DaeSystem
    spec: Optional[LagrangianSpec]
    params: Dict[str, Any]
    structural: StructuralResult
    ic_spec: Dict[str, Dict[str, float]]
    point: Optional[ItemPoint] = None


def coerce_values(raw: Optional[Mapping[str, str]]) -> Dict[str, Any]:
    """'key=value' 의 값을 숫자로 바꾸고, 숫자가 아니면 (목록 등) 문자열로 둔다"""
    values = {}
    for key, text in (raw or {}).items():
        try:
            values[key] = parse_number(text) if isinstance(text, str) else text
        except ValidationException:
            values[key] = text
    return values


def resolve_initial_conditions(
    defaults: Mapping[str, Mapping[str, float]],
    ic: Optional[Mapping[str, Any]] = None,
    fixed: Optional[Mapping[str, Any]] = None,
) -> Dict[str, Dict[str, float]]:
    """
    기본 초기조건에 사용자 값을 합친다

    1. fixed 를 주면 고정 집합을 통째로 바꾸고, 빠진 기본 고정 항목은 추정값이 된다
    2. ic 값은 고정 항목이면 고정값을, 아니면 추정값을 갱신한다
    """
    fixed_values = dict(defaults.get('fixed', {}))
    guess_values = dict(defaults.get('guess', {}))
    if fixed is not None:
        for label, value in fixed_values.items():
            guess_values.setdefault(label, value)
        fixed_values = {label: float(value) for label, value in fixed.items()}
        for label in fixed_values:
            guess_values.pop(label, None)
    for label, value in (ic or {}).items():
        if isinstance(value, str):
            raise ValidationException(f"초기조건 값이 숫자가 아닙니다: {label}={value}")
        if label in fixed_values:
            fixed_values[label] = float(value)
        else:
            guess_values[label] = float(value)
    return {'fixed': fixed_values, 'guess': guess_values}


def prepare_problem(
    name: str,
    params: Optional[Mapping[str, Any]] = None,
    ic: Optional[Mapping[str, Any]] = None,
    fixed: Optional[Mapping[str, Any]] = None,
    t0: float = 0.0,
    newton_tol: Optional[float] = None,
    initialize: bool = True,
) -> PreparedProblem:
    """
    이름으로 문제를 만들고 구조 분석과 초기화를 수행

    Args:
        name (str): 등록된 문제 이름
        params: 물리 파라미터 (생략 시 기본값)
        ic: 초기조건 덮어쓰기 (라벨 -> 값)
        fixed: 고정 항목 집합 교체 (라벨 -> 값)
        newton_tol: 초기화 뉴턴 허용오차 (initialize=True 일 때 필요)
        initialize (bool): False 면 일관된 점을 계산하지 않음

    Raises:
        ProblemNotFoundException: 등록되지 않은 이름
        ValidationException: 파라미터/초기조건 오류
    """
    problem = get_problem(name)
    dae, spec, validated = problem.build(params)
    structural = analyze(dae)
    ic_spec = resolve_initial_conditions(problem.default_initial_conditions(validated), ic, fixed)
    prepared = PreparedProblem(problem, dae, spec, validated, structural, ic_spec)
    if initialize:
        if newton_tol is None:
            raise ValidationException("초기화에는 newton_tol 이 필요합니다.")
        prepared.point = consistent_initialize(dae, structural, ic_spec, t0, newton_tol)
        logger.debug("%s initialized at t=%g", name, t0)
    return prepared
