"""
증강 시스템: 방정식 f_i^(l) (l <= c_i) 와 항목 x_j^(l) (l <= d_j)

항목 벡터는 테일러 계수 형태 X_j[l] 를 items 순서로 평탄화한 것이다.
"""
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from common.utils import factorials, item_label
from structural.items import ItemPoint, coefficient_jacobian, evaluate_series, residual_coefficient
from structural.result import StructuralResult


class AugmentedSystem:
    def __init__(self, dae, structural: StructuralResult):
        self.dae = dae
        self.structural = structural
        c, d = structural.c, structural.d
        self.equations: List[Tuple[int, int]] = [(i, l) for i in range(dae.n) for l in range(c[i] + 1)]
        self.items: List[Tuple[int, int]] = [(j, l) for j in range(dae.n) for l in range(d[j] + 1)]
        self.item_index: Dict[Tuple[int, int], int] = {item: k for k, item in enumerate(self.items)}
        fact = factorials(max(structural.max_d, structural.max_c))
        self._item_fact = np.array([fact[l] for _, l in self.items])

    @property
    def n_f(self) -> int:
        return len(self.equations)

    @property
    def n_x(self) -> int:
        return len(self.items)

    @property
    def item_labels(self) -> List[str]:
        return [item_label(self.dae.names[j], l) for j, l in self.items]

    @property
    def equation_labels(self) -> List[str]:
        return [item_label(self.dae.equation_names[i], l) for i, l in self.equations]

    # ---- 변환 -----------------------------------------------------------
    def pack(self, point: ItemPoint) -> np.ndarray:
        """ItemPoint -> 계수 형태 항목 벡터 (d_j 초과 계수는 버림, 부족하면 0)"""
        local = point.truncated(self.structural.d)
        return np.array([local.coeffs[j][l] for j, l in self.items], dtype=float)

    def unpack(self, t: float, vector: Sequence[float]) -> ItemPoint:
        rows = [np.zeros(dj + 1) for dj in self.structural.d]
        for value, (j, l) in zip(vector, self.items):
            rows[j][l] = value
        return ItemPoint(float(t), rows)

    def to_derivative_form(self, vector: np.ndarray) -> np.ndarray:
        return np.asarray(vector, dtype=float) * self._item_fact

    def from_derivative_form(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=float) / self._item_fact

    # ---- 평가 -----------------------------------------------------------
    def residuals(self, t: float, vector: Sequence[float]) -> np.ndarray:
        """N_f 개 잔차 (계수 형태 F_i[l])"""
        series = evaluate_series(self.dae, t, self.unpack(t, vector).coeffs)
        return np.array(
            [float(residual_coefficient(series[i], l, i)) for i, l in self.equations], dtype=float
        )

    def jacobian(self, t: float, vector: Sequence[float], cols: Optional[Sequence[int]] = None) -> np.ndarray:
        """dF/dX (행: 모든 방정식, 열: cols 로 지정한 항목 인덱스)"""
        if cols is None:
            cols = range(self.n_x)
        point = self.unpack(t, vector)
        return coefficient_jacobian(
            self.dae, point.t, point.coeffs, self.equations, [self.items[k] for k in cols]
        )
