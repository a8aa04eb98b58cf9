from rest_framework import serializers


class StrictParamsSerializer(serializers.Serializer):
    """정의되지 않은 키를 거부하는 물리 파라미터 검증 기본 클래스"""

    def validate(self, attrs):
        unknown = sorted(set(self.initial_data) - set(self.fields))
        if unknown:
            raise serializers.ValidationError(
                {key: ["알 수 없는 파라미터입니다."] for key in unknown}
            )
        return attrs


def _positive(**kwargs):
    return serializers.FloatField(min_value=0.0, **kwargs)


class PendulumParamsSerializer(StrictParamsSerializer):
    m = _positive(default=1.0, help_text="추 질량")
    g = serializers.FloatField(default=9.81, help_text="중력가속도")
    l = _positive(default=10.0, help_text="막대 길이")

    def validate_m(self, value):
        if value <= 0:
            raise serializers.ValidationError("질량은 0 보다 커야 합니다.")
        return value

    def validate_l(self, value):
        if value <= 0:
            raise serializers.ValidationError("길이는 0 보다 커야 합니다.")
        return value


class PendulumDaeParamsSerializer(StrictParamsSerializer):
    g = serializers.FloatField(default=9.81)
    l = _positive(default=10.0)

    def validate_l(self, value):
        if value <= 0:
            raise serializers.ValidationError("길이는 0 보다 커야 합니다.")
        return value


class ControlledPendulumParamsSerializer(PendulumParamsSerializer):
    g = serializers.FloatField(default=9.8)
    a = serializers.FloatField(default=1.0, help_text="목표 진폭 (x = a sin(omega t))")
    omega = serializers.FloatField(
        required=False, allow_null=True, default=None,
        help_text="목표 각진동수, 생략 시 고유진동수 sqrt(g/l)",
    )

    def validate(self, attrs):
        attrs = super().validate(attrs)
        if abs(attrs['a']) >= attrs['l']:
            raise serializers.ValidationError({'a': ["진폭은 막대 길이보다 작아야 합니다 (|a| < l)."]})
        if attrs.get('omega') is None:
            attrs['omega'] = (attrs['g'] / attrs['l']) ** 0.5
        return attrs


class SpringMassChainParamsSerializer(StrictParamsSerializer):
    n = serializers.IntegerField(default=1, min_value=1, help_text="막대 개수")
    M = _positive(default=5.0, help_text="미끄러지는 질량")
    m = _positive(default=2.0, help_text="막대 하나의 질량")
    k = _positive(default=10.0, help_text="스프링 상수")
    l = _positive(default=2.0, help_text="막대 길이 (= 2a)")
    g = serializers.FloatField(default=9.8)
    x0 = serializers.FloatField(default=4.0, help_text="질량 M 의 초기 위치")

    def validate(self, attrs):
        attrs = super().validate(attrs)
        for key in ('M', 'm', 'l'):
            if attrs[key] <= 0:
                raise serializers.ValidationError({key: ["0 보다 커야 합니다."]})
        return attrs


class SpringMassThetaParamsSerializer(SpringMassChainParamsSerializer):
    n = None
    theta0 = serializers.FloatField(default=-1.5707963267948966, help_text="막대 초기 각도 (아래 방향 기준)")


class DoublePendulumParamsSerializer(StrictParamsSerializer):
    m1 = _positive(default=1.0)
    m2 = _positive(default=1.0)
    l1 = _positive(default=10.0)
    l2 = _positive(default=10.0)
    g = serializers.FloatField(default=9.81)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        for key in ('m1', 'm2', 'l1', 'l2'):
            if attrs[key] <= 0:
                raise serializers.ValidationError({key: ["0 보다 커야 합니다."]})
        return attrs


class PlanetsParamsSerializer(StrictParamsSerializer):
    G = serializers.FloatField(required=False, help_text="중력 상수 (생략 시 내장 데이터)")
    masses = serializers.ListField(
        child=serializers.FloatField(), required=False, min_length=2,
        help_text="태양 포함 질량 목록 (생략 시 내장 데이터)",
    )

    def validate_masses(self, value):
        if any(mass <= 0 for mass in value):
            raise serializers.ValidationError("질량은 모두 0 보다 커야 합니다.")
        return value


class ToyParamsSerializer(StrictParamsSerializer):
    """구동 입력 u(t) = sin(t) 고정, 파라미터 없음"""
