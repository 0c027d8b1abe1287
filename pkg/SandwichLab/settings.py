"""
Django settings for SandwichLab project.
"""
import os
from pathlib import Path

from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent

# локальные переопределения (SANDWICHLAB_FUEL, SANDWICHLAB_LOG_LEVEL, ...)
load_dotenv(BASE_DIR / '.env')

SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'django-insecure-sandwichlab-offline-toolkit')
DEBUG = False
ALLOWED_HOSTS = []

INSTALLED_APPS = [
    # Django
    'django.contrib.auth',
    'django.contrib.contenttypes',

    # Third-party
    'rest_framework',

    # Local apps
    'core.apps.CoreConfig',
]

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# ==== DRF ====
# Сериализаторы используются только для валидации конфигурации и отчётов.
REST_FRAMEWORK = {
    "DEFAULT_RENDERER_CLASSES": (
        "rest_framework.renderers.JSONRenderer",
    ),
    "UNAUTHENTICATED_USER": None,
}

# ==== SandwichLab ====
SANDWICHLAB = {
    "TOOL_VERSION": "1.0.0",
    "FUEL": int(os.environ.get("SANDWICHLAB_FUEL", 10 ** 7)),
    "SEED": 0xE9E1,
    "SAMPLES": 1000,
    "MAX_WORD_LENGTH": 12,
    "MAX_CLASS": 16,
    "EXHAUSTIVE_CAP": 2 ** 14,
    "SUBSET_CAP": 6,
    "CHAR2_CAP": 64,
    "SUBSPACE_CAP": 2 ** 12,
    "WITNESS_ATTEMPTS": 10 ** 5,
}

# ==== Logging ====
# stdout занят отчётами, поэтому всё логирование идёт в stderr
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(levelname)s %(name)s %(message)s"},
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": "plain",
        },
    },
    "loggers": {
        "core": {
            "handlers": ["console"],
            "level": os.environ.get("SANDWICHLAB_LOG_LEVEL", "WARNING"),
            "propagate": False,
        },
    },
}
