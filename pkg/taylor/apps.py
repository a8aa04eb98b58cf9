from django.apps import AppConfig


class TaylorConfig(AppConfig):
    name = 'taylor'
    verbose_name = '절단 테일러 급수 AD'
