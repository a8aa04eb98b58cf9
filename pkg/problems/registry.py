"""
내장 문제 레지스트리
"""
from typing import Dict, List

from common.exceptions import ProblemNotFoundException
from common.utils import suggest_names
from problems.catalog import PROBLEMS
from problems.definition import ProblemDef

REGISTRY: Dict[str, ProblemDef] = {problem.name: problem for problem in PROBLEMS}


def get_problem(name: str) -> ProblemDef:
    """
    이름으로 문제 조회

    Raises:
        ProblemNotFoundException: 등록되지 않은 이름 (비슷한 이름 제안 포함)
    """
    try:
        return REGISTRY[name]
    except KeyError:
        raise ProblemNotFoundException(name, suggest_names(name, REGISTRY)) from None


def list_problems() -> List[ProblemDef]:
    return [REGISTRY[name] for name in sorted(REGISTRY)]
