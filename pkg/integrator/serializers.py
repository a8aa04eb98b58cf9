from rest_framework import serializers

from integrator.services.ivp_service import METHODS


class IntegrationOptionsSerializer(serializers.Serializer):
    """solve 명령 적분 옵션 검증 (생략한 값은 settings 기본값)"""

    tol = serializers.FloatField(required=False, allow_null=True, default=None)
    order = serializers.IntegerField(required=False, allow_null=True, default=None, min_value=1)
    t_end = serializers.FloatField(required=False, allow_null=True, default=None)
    method = serializers.ChoiceField(choices=METHODS, default='taylor')
    max_steps = serializers.IntegerField(required=False, allow_null=True, default=None, min_value=1)

    def validate_tol(self, value):
        if value is not None and not value > 0:
            raise serializers.ValidationError("허용오차는 0 보다 커야 합니다.")
        return value

    def validate_t_end(self, value):
        if value is not None and not value > 0:
            raise serializers.ValidationError("종료 시각은 0 보다 커야 합니다.")
        return value


class TrajectoryStatsSerializer(serializers.Serializer):
    """적분 통계 JSON 블록"""

    steps = serializers.IntegerField(source='accepted')
    rejected = serializers.IntegerField()
    h_min = serializers.FloatField()
    h_max = serializers.FloatField()
    switches = serializers.IntegerField()
    cpu_s = serializers.FloatField()
    jacobians = serializers.IntegerField()
