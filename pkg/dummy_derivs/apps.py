from django.apps import AppConfig


class DummyDerivsConfig(AppConfig):
    name = 'dummy_derivs'
    verbose_name = '더미 도함수 지수 축약'
