"""
Django settings for config project.
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# ==========================================
# 1. 보안 및 환경 변수 설정
# ==========================================

# .env 파일에서 읽어오거나, 없으면 기본값 사용
SECRET_KEY = os.environ.get('SECRET_KEY', 'django-insecure-default-dev-key')

DEBUG = os.environ.get('DEBUG', 'True') == 'True'

ALLOWED_HOSTS = os.environ.get('ALLOWED_HOSTS', 'localhost,127.0.0.1').split(',')


# ==========================================
# 2. 애플리케이션 정의
# ==========================================

# 웹 화면이 없는 계산 프로젝트: 관리 명령과 Celery 태스크만 사용
INSTALLED_APPS = [
    'django.contrib.contenttypes',

    # Local Apps
    'polarbc',
]


# ==========================================
# 3. 데이터베이스 설정
# ==========================================

# 모델이 없으므로 테스트/관리 명령용 sqlite 만 둔다
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

LANGUAGE_CODE = 'ko-kr'
TIME_ZONE = 'Asia/Seoul'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# ==========================================
# 4. 시뮬레이터 기본값 (환경 변수로 덮어쓰기 가능)
# ==========================================

# 합성 채널 예산: 양자 branch 차원 / branch 개수 상한
POLARBC_SYNTHESIS_MAX_DIMENSION = int(os.environ.get('POLARBC_SYNTHESIS_MAX_DIMENSION', '4096'))
POLARBC_SYNTHESIS_MAX_BRANCHES = int(os.environ.get('POLARBC_SYNTHESIS_MAX_BRANCHES', '4096'))

# 편극 임계값 (low, high)
POLARBC_THRESHOLD_LOW = float(os.environ.get('POLARBC_THRESHOLD_LOW', '0.01'))
POLARBC_THRESHOLD_HIGH = float(os.environ.get('POLARBC_THRESHOLD_HIGH', '0.99'))

# 정확 계산이 예산을 넘을 때 몬테카를로 샘플 수
POLARBC_MC_SAMPLES = int(os.environ.get('POLARBC_MC_SAMPLES', '2000'))

# 보조변수 그리드 탐색 해상도 (축당 점 개수)
POLARBC_SEARCH_RESOLUTION = int(os.environ.get('POLARBC_SEARCH_RESOLUTION', '9'))
POLARBC_SEARCH_RESOLUTION_CAP = int(os.environ.get('POLARBC_SEARCH_RESOLUTION_CAP', '9'))

POLARBC_LOG_LEVEL = os.environ.get('POLARBC_LOG_LEVEL', 'INFO')


# ==========================================
# 5. Celery & Redis 설정
# ==========================================

CELERY_BROKER_URL = os.environ.get('CELERY_BROKER_URL', 'redis://redis:6379/0')
CELERY_RESULT_BACKEND = os.environ.get('CELERY_RESULT_BACKEND', CELERY_BROKER_URL)
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = 'Asia/Seoul'

# 브로커 없이 바로 실행 (기본값). 워커를 띄울 때는 False 로 설정
CELERY_TASK_ALWAYS_EAGER = os.environ.get('CELERY_TASK_ALWAYS_EAGER', 'True') == 'True'


# ==========================================
# 6. 로깅
# ==========================================

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{asctime} {levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'polarbc': {
            'handlers': ['console'],
            'level': POLARBC_LOG_LEVEL,
            'propagate': False,
        },
    },
}
