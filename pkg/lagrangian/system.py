"""
DAE 시스템과 라그랑지안 기술 타입
"""
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

from common.exceptions import ValidationException
from lagrangian.services.setup_service import setup_equations

Residual = Callable[[Any, Sequence[Any], Dict[str, Any]], Sequence[Any]]


@dataclass
class DaeSystem:
    """
    일반형 DAE f_i(t, x_j 와 그 도함수들) = 0

    residual(t, z, params) 는 z[j] 로 변수 급수(또는 시그니처 값)를 받아 방정식
    n 개의 출력을 돌려준다. 값에 따른 분기가 없어야 한다.
    """

    n: int
    residual: Residual
    names: List[str]
    params: Dict[str, Any] = field(default_factory=dict)
    equation_names: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationException("변수 개수는 1 이상이어야 합니다.")
        if len(self.names) != self.n:
            raise ValidationException(f"변수 이름 {len(self.names)} 개, 변수 {self.n} 개로 개수가 다릅니다.")
        if not self.equation_names:
            self.equation_names = [chr(ord('A') + i) if i < 26 else f"f{i}" for i in range(self.n)]

    def evaluate(self, t, z: Sequence[Any]) -> List[Any]:
        outputs = list(self.residual(t, z, self.params))
        if len(outputs) != self.n:
            raise ValidationException(f"잔차가 {len(outputs)} 개 반환되었습니다 (기대 {self.n} 개).")
        return outputs


@dataclass
class LagrangianSpec:
    """
    L(t, q, q') 과 위치 구속 C_j(t, q) 로 기술한 기계 시스템

    변수 순서는 q_0..q_{n_q-1}, lambda_0..lambda_{n_c-1}, extra 변수들.
    post_hook(t, z, f, params) 는 f 를 제자리에서 수정한다 (외력, 추가 방정식).
    """

    n_q: int
    lagrangian: Callable[..., Any]
    constraints: List[Callable[..., Any]] = field(default_factory=list)
    params: Dict[str, Any] = field(default_factory=dict)
    q_names: List[str] = field(default_factory=list)
    multiplier_names: List[str] = field(default_factory=list)
    post_hook: Optional[Callable[..., None]] = None
    extra_names: List[str] = field(default_factory=list)
    equation_names: List[str] = field(default_factory=list)
    energy: Optional[Callable[..., float]] = None

    @property
    def n_c(self) -> int:
        return len(self.constraints)

    @property
    def n(self) -> int:
        return self.n_q + self.n_c + len(self.extra_names)

    def __post_init__(self):
        if self.n_q < 1:
            raise ValidationException("일반화 좌표는 1 개 이상이어야 합니다.")
        if not self.q_names:
            self.q_names = [f"q{i}" for i in range(self.n_q)]
        if not self.multiplier_names:
            self.multiplier_names = (
                ['lambda'] if self.n_c == 1 else [f"lambda{j}" for j in range(self.n_c)]
            )
        if len(self.q_names) != self.n_q or len(self.multiplier_names) != self.n_c:
            raise ValidationException("좌표/승수 이름 개수가 맞지 않습니다.")
        if self.extra_names and self.post_hook is None:
            raise ValidationException("추가 변수에는 그 방정식을 채울 post_hook 이 필요합니다.")

    @property
    def names(self) -> List[str]:
        return list(self.q_names) + list(self.multiplier_names) + list(self.extra_names)

    def to_dae(self) -> DaeSystem:
        def residual(t, z, params):
            return setup_equations(self, t, z)

        return DaeSystem(
            n=self.n,
            residual=residual,
            names=self.names,
            params=self.params,
            equation_names=list(self.equation_names),
        )
