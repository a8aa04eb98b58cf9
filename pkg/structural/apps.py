from django.apps import AppConfig


class StructuralConfig(AppConfig):
    name = 'structural'
    verbose_name = '시그니처 행렬 구조 분석'
