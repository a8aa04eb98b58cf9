"""
Django settings for the DAE toolkit.

웹 표면과 데이터베이스 없이 관리 명령과 서비스만 쓰는 프로젝트.
모든 수치 설정은 .env 또는 환경변수의 DAE_* 값으로 바꿀 수 있다.
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# .env 파일 로드
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# 서명할 쿠키/세션이 없으므로 기본값 허용
SECRET_KEY = os.getenv('SECRET_KEY', 'dae-toolkit-local')

DEBUG = os.getenv('DEBUG', 'false').lower() == 'true'

ALLOWED_HOSTS = []


# helpers
def _env_list(key: str, default=None):
    value = os.getenv(key)
    if not value:
        return list(default or [])
    return [item.strip() for item in value.split(',') if item.strip()]


def _env_float(key: str, default: float) -> float:
    value = os.getenv(key)
    if not value:
        return default
    try:
        return float(value)
    except ValueError:
        raise ValueError(f"{key} 환경변수는 실수여야 합니다: {value}") from None


def _env_int(key: str, default: int) -> int:
    value = os.getenv(key)
    if not value:
        return default
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"{key} 환경변수는 정수여야 합니다: {value}") from None


# Application definition

INSTALLED_APPS = [
    'rest_framework',
    'common',
    'taylor',
    'adjoint',
    'structural',
    'dummy_derivs',
    'lagrangian',
    'integrator',
    'problems',
]

MIDDLEWARE = []

DATABASES = {}

LANGUAGE_CODE = 'ko-kr'

TIME_ZONE = 'Asia/Seoul'

USE_I18N = True

USE_TZ = False

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# REST Framework 는 serializer 검증에만 사용
REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [],
    'UNAUTHENTICATED_USER': None,
}


# DAE 수치 설정
DAE_TOL = _env_float('DAE_TOL', 1e-8)
DAE_TAYLOR_ORDER = _env_int('DAE_TAYLOR_ORDER', 15)
DAE_MAX_STEPS = _env_int('DAE_MAX_STEPS', 100000)
DAE_NEWTON_TOL_FACTOR = _env_float('DAE_NEWTON_TOL_FACTOR', 0.01)
DAE_NEWTON_MAX_ITER = _env_int('DAE_NEWTON_MAX_ITER', 20)
DAE_JACOBIAN_REUSE = _env_int('DAE_JACOBIAN_REUSE', 5)
# G_k 품질 sigma_min(G_k) / sigma_max(J_k) 가 이 값 아래면 상태 벡터 재선택
DAE_SWITCH_THRESHOLD = _env_float('DAE_SWITCH_THRESHOLD', 0.2)
# 역조건수 추정이 이 값 아래면 특이로 판정
DAE_SINGULAR_RCOND = _env_float('DAE_SINGULAR_RCOND', 1e-12)
DAE_STEP_SAFETY = _env_float('DAE_STEP_SAFETY', 0.8)
DAE_STEP_GROWTH = tuple(float(v) for v in _env_list('DAE_STEP_GROWTH', ['0.2', '2.5']))
DAE_CSV_FLOAT_FORMAT = os.getenv('DAE_CSV_FLOAT_FORMAT', '%.17g')
DAE_SWEEP_WORKERS = _env_int('DAE_SWEEP_WORKERS', 4)
DAE_LOG = os.getenv('DAE_LOG', 'WARNING').upper()


# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '%(asctime)s %(levelname)s %(name)s %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': DAE_LOG, 'propagate': False}
        for app in ('taylor', 'adjoint', 'structural', 'dummy_derivs', 'lagrangian', 'integrator', 'problems')
    },
}

try:
    from .local_settings import *
except ImportError:
    pass
