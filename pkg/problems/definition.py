"""
내장 문제 정의 타입
"""
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Mapping, Optional, Tuple, Type

from rest_framework import serializers

from common.exceptions import ValidationException
from common.utils import parse_list
from lagrangian.system import DaeSystem, LagrangianSpec


@dataclass
class ProblemDef:
    """
    내장 문제

    initial_conditions: {'fixed': {라벨: 값}, 'guess': {라벨: 값}} (도함수 형태, 라벨 예: "x'")
    invariants: 이름 -> f(params, sample) (sample 은 라벨 -> 값, 't' 포함)
    """

    name: str
    builder: Callable[[Dict[str, Any]], Any]
    serializer_class: Type[serializers.Serializer]
    description: str = ''
    initial_conditions: Callable[[Dict[str, Any]], Dict[str, Dict[str, float]]] = None
    invariants: Dict[str, Callable[[Dict[str, Any], Mapping[str, float]], float]] = field(default_factory=dict)
    t_end: float = 10.0

    def validate_params(self, raw: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
        """
        파라미터 검증 (생략된 값은 기본값)

        Raises:
            ValidationException: 알 수 없는 키, 범위 위반
        """
        data = dict(raw or {})
        list_fields = {
            name for name, fld in self.serializer_class().fields.items()
            if isinstance(fld, serializers.ListField)
        }
        for key in list_fields & set(data):
            if isinstance(data[key], str):
                data[key] = parse_list(data[key])
        serializer = self.serializer_class(data=data)
        if not serializer.is_valid():
            details = '; '.join(
                f"{key}: {' '.join(str(m) for m in messages)}"
                for key, messages in serializer.errors.items()
            )
            raise ValidationException(f"{self.name} 파라미터 오류 - {details}")
        return dict(serializer.validated_data)

    def build(self, raw_params: Optional[Mapping[str, Any]] = None) -> Tuple[DaeSystem, Optional[LagrangianSpec], Dict[str, Any]]:
        """
        (DaeSystem, LagrangianSpec 또는 None, 검증된 파라미터)
        """
        params = self.validate_params(raw_params)
        built = self.builder(params)
        if isinstance(built, LagrangianSpec):
            return built.to_dae(), built, params
        return built, None, params

    def default_initial_conditions(self, params: Dict[str, Any]) -> Dict[str, Dict[str, float]]:
        if self.initial_conditions is None:
            return {'fixed': {}, 'guess': {}}
        ic = self.initial_conditions(params)
        return {'fixed': dict(ic.get('fixed', {})), 'guess': dict(ic.get('guess', {}))}
