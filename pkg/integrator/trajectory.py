"""
적분 설정과 결과 궤적 타입
"""
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from django.conf import settings

from common.exceptions import ValidationException
from common.utils import item_label


@dataclass(frozen=True)
class IvpConfig:
    """
    초기값 문제 설정

    tol: 혼합 상대-절대 허용오차 (오차 / (tol (1 + |x|)) <= 1)
    order: 테일러 차수 p
    """

    tol: float = 1e-8
    order: int = 15
    t0: float = 0.0
    t_end: float = 10.0
    max_steps: int = 100000
    newton_tol: float = 1e-10
    newton_max_iter: int = 20
    jacobian_reuse: int = 5
    switch_threshold: float = 0.2
    safety: float = 0.8
    growth: Tuple[float, float] = (0.2, 2.5)

    def __post_init__(self):
        if not self.tol > 0:
            raise ValidationException(f"tol 은 0 보다 커야 합니다: {self.tol}")
        if self.order < 1:
            raise ValidationException(f"order 는 1 이상이어야 합니다: {self.order}")
        if not self.t_end > self.t0:
            raise ValidationException(f"t_end({self.t_end}) 는 t0({self.t0}) 보다 커야 합니다.")
        if self.max_steps < 1:
            raise ValidationException("max_steps 는 1 이상이어야 합니다.")

    @classmethod
    def from_settings(cls, **overrides) -> 'IvpConfig':
        """
        settings 의 DAE_* 값으로 설정 생성

        newton_tol 을 따로 주지 않으면 DAE_NEWTON_TOL_FACTOR * tol.
        """
        tol = overrides.pop('tol', None) or getattr(settings, 'DAE_TOL', 1e-8)
        values = {
            'tol': tol,
            'order': getattr(settings, 'DAE_TAYLOR_ORDER', 15),
            'max_steps': getattr(settings, 'DAE_MAX_STEPS', 100000),
            'newton_tol': getattr(settings, 'DAE_NEWTON_TOL_FACTOR', 0.01) * tol,
            'newton_max_iter': getattr(settings, 'DAE_NEWTON_MAX_ITER', 20),
            'jacobian_reuse': getattr(settings, 'DAE_JACOBIAN_REUSE', 5),
            'switch_threshold': getattr(settings, 'DAE_SWITCH_THRESHOLD', 0.2),
            'safety': getattr(settings, 'DAE_STEP_SAFETY', 0.8),
            'growth': tuple(getattr(settings, 'DAE_STEP_GROWTH', (0.2, 2.5))),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def with_tol(self, tol: float) -> 'IvpConfig':
        factor = self.newton_tol / self.tol
        return replace(self, tol=tol, newton_tol=factor * tol)


@dataclass
class TrajectoryStats:
    accepted: int = 0
    rejected: int = 0
    h_min: float = float('inf')
    h_max: float = 0.0
    switches: int = 0
    cpu_s: float = 0.0
    jacobians: int = 0

    def record_step(self, h: float):
        self.accepted += 1
        self.h_min = min(self.h_min, h)
        self.h_max = max(self.h_max, h)


@dataclass(frozen=True)
class Trajectory:
    """
    적분 결과

    items[i, k]: 시각 times[i] 의 항목 k 값 (도함수 형태)
    rates[i, k]: 같은 항목의 시간 도함수 (조밀 출력용)
    """

    times: np.ndarray
    items: np.ndarray
    rates: np.ndarray
    item_keys: Tuple[Tuple[int, int], ...]
    names: Tuple[str, ...]
    d: Tuple[int, ...]
    stats: TrajectoryStats
    method: str = 'taylor'
    deltas: Tuple[Tuple[int, ...], ...] = ()

    @property
    def labels(self) -> List[str]:
        return [item_label(self.names[j], l) for j, l in self.item_keys]

    def column(self, label: str) -> np.ndarray:
        try:
            k = self.labels.index(label)
        except ValueError:
            raise ValidationException(f"궤적에 없는 항목입니다: {label}") from None
        return self.items[:, k]

    def sample(self, index: int) -> Dict[str, float]:
        """라벨 -> 값 (시각 't' 포함)"""
        values = dict(zip(self.labels, (float(v) for v in self.items[index])))
        values['t'] = float(self.times[index])
        return values

    def output_labels(self) -> List[str]:
        """CSV 열: 변수별 0 .. max(d_j - 1, 0) 계 항목"""
        return [
            item_label(name, l)
            for name, dj in zip(self.names, self.d)
            for l in range(max(dj - 1, 0) + 1)
        ]

    def to_dataframe(self, times: Optional[Sequence[float]] = None, values: Optional[np.ndarray] = None) -> pd.DataFrame:
        labels = self.output_labels()
        index = [self.labels.index(label) for label in labels]
        times = self.times if times is None else np.asarray(times, dtype=float)
        values = self.items if values is None else values
        frame = pd.DataFrame(values[:, index], columns=labels)
        frame.insert(0, 't', times)
        return frame

    def positions(self, index: int = -1) -> np.ndarray:
        """0 계 항목 (모든 변수의 값)"""
        keys = [k for k, (_, l) in enumerate(self.item_keys) if l == 0]
        return self.items[index, keys]


@dataclass
class TrajectoryBuilder:
    """적분 중 표본 누적"""

    item_keys: Tuple[Tuple[int, int], ...]
    names: Tuple[str, ...]
    d: Tuple[int, ...]
    method: str
    times: List[float] = field(default_factory=list)
    items: List[np.ndarray] = field(default_factory=list)
    rates: List[np.ndarray] = field(default_factory=list)
    deltas: List[Tuple[int, ...]] = field(default_factory=list)
    stats: TrajectoryStats = field(default_factory=TrajectoryStats)

    def append(self, t: float, items: np.ndarray, rates: np.ndarray, delta: Tuple[int, ...] = ()):
        self.times.append(float(t))
        self.items.append(np.array(items, dtype=float))
        self.rates.append(np.array(rates, dtype=float))
        if delta:
            self.deltas.append(tuple(delta))

    def build(self) -> Trajectory:
        if self.stats.accepted == 0:
            self.stats.h_min = 0.0
        return Trajectory(
            times=np.array(self.times),
            items=np.vstack(self.items),
            rates=np.vstack(self.rates),
            item_keys=tuple(self.item_keys),
            names=tuple(self.names),
            d=tuple(self.d),
            stats=self.stats,
            method=self.method,
            deltas=tuple(self.deltas),
        )
