from django.apps import AppConfig


class AdjointConfig(AppConfig):
    name = 'adjoint'
    verbose_name = '역방향 AD'
