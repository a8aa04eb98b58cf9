from django.apps import AppConfig


class LagrangianConfig(AppConfig):
    name = 'lagrangian'
    verbose_name = '라그랑지안 운동방정식'
