"""
더미 도함수 스킴 타입
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple


@dataclass(frozen=True)
class StageShape:
    """단계 k 의 J_k 크기 (m_k 행, n_k 열)와 이 단계에서 상태로 남은 항목"""

    k: int
    rows: int
    cols: int
    state_items: Tuple[Tuple[int, int], ...] = ()

    @property
    def freedom(self) -> int:
        return self.cols - self.rows


@dataclass(frozen=True)
class DDScheme:
    """
    delta: 변수별 상태 항목 개수
    state_items: S = {(j, l) : l < delta_j}, 변수/차수 순서
    gk_columns: 단계 k -> G_k 에 선택된 변수 목록 (k 가 커질수록 포함 관계)
    quality: 선택이 있었던 단계들의 min sigma_min(G_k) / sigma_max(J_k) (점 없이 만들면 None)
    """

    delta: Tuple[int, ...]
    state_items: Tuple[Tuple[int, int], ...]
    gk_columns: Dict[int, Tuple[int, ...]] = field(default_factory=dict)
    stage_shapes: Tuple[StageShape, ...] = ()
    quality: Optional[float] = None

    @property
    def dof(self) -> int:
        return len(self.state_items)

    def same_chart(self, other: 'DDScheme') -> bool:
        return self.delta == other.delta


@dataclass(frozen=True)
class DDSpecCheck:
    ok: bool
    violation: str = ''
    stage: Optional[int] = None


def state_items_for(delta) -> Tuple[Tuple[int, int], ...]:
    return tuple((j, l) for j, count in enumerate(delta) for l in range(count))


def stage_members(c, d) -> List[Tuple[int, List[int], List[int]]]:
    """k = -max d .. 0 에 대해 (k, J_k 행 목록, J_k 열 목록)"""
    k_d = -max(d, default=0)
    stages = []
    for k in range(k_d, 1):
        rows = [i for i, ci in enumerate(c) if k + ci >= 0]
        cols = [j for j, dj in enumerate(d) if k + dj >= 0]
        stages.append((k, rows, cols))
    return stages
