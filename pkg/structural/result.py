"""
구조 분석 결과 타입
"""
from dataclasses import dataclass, field
from typing import Optional, Set, Tuple

import numpy as np


@dataclass(frozen=True)
class StructuralResult:
    """
    시그니처 행렬 분석 결과

    sigma: n x n (없는 항목은 -inf)
    transversal: 행 순서의 (i, j) 쌍
    c, d: 방정식/변수 오프셋
    """

    sigma: np.ndarray
    transversal: Tuple[Tuple[int, int], ...]
    value: int
    c: Tuple[int, ...]
    d: Tuple[int, ...]
    nu: int
    dof: int
    jac_pattern: Set[Tuple[int, int]] = field(default_factory=set)
    names: Tuple[str, ...] = ()
    equation_names: Tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def max_d(self) -> int:
        return max(self.d, default=0)

    @property
    def max_c(self) -> int:
        return max(self.c, default=0)


@dataclass(frozen=True)
class SAFriendliness:
    friendly: bool
    rcond: float
    jacobian: Optional[np.ndarray] = None
    reason: str = ''

