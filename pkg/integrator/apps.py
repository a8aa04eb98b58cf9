from django.apps import AppConfig


class IntegratorConfig(AppConfig):
    name = 'integrator'
    verbose_name = 'DAE 수치 적분'
