"""
Base settings for the formality workbench.
"""
from pathlib import Path

import dj_database_url
from decouple import config
import os

# python-decouple handles environment variables automatically

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent

SECRET_KEY = config(
    "SECRET_KEY",
    default="workbench-insecure-key-only-used-for-signing-nothing"
)

DEBUG = config("DEBUG", default=False, cast=bool)

# Application definition
DJANGO_APPS = [
    "django.contrib.auth",
    "django.contrib.contenttypes",
]

THIRD_PARTY_APPS = [
    "rest_framework",
]

LOCAL_APPS = [
    "apps.core",
    "apps.graphs",
    "apps.polyvector",
    "apps.hochschild",
    "apps.weights",
    "apps.homotopy",
    "apps.duflo",
    "apps.rewriting",
]

INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + LOCAL_APPS

# Workbench configuration
# The cache directory holds the weight cache database unless DATABASE_URL says otherwise.
WORKBENCH_CACHE_DIR = Path(
    config("WORKBENCH_CACHE_DIR", default=str(BASE_DIR / ".workbench"))
)
WORKBENCH_ENUMERATION_LIMIT = config("WORKBENCH_ENUMERATION_LIMIT", default=2_000_000, cast=int)
WORKBENCH_TRUNCATION = config("WORKBENCH_TRUNCATION", default=6, cast=int)
WORKBENCH_TOLERANCE = config("WORKBENCH_TOLERANCE", default=5e-3, cast=float)
WORKBENCH_WORKERS = config("WORKBENCH_WORKERS", default=1, cast=int)
WORKBENCH_BATCH_SIZE = config("WORKBENCH_BATCH_SIZE", default=65536, cast=int)
WORKBENCH_QUADRATURE_MAX_NODES = config("WORKBENCH_QUADRATURE_MAX_NODES", default=512, cast=int)
WORKBENCH_RESAMPLE_LIMIT = config("WORKBENCH_RESAMPLE_LIMIT", default=64, cast=int)
WORKBENCH_REWRITE_BUDGET = config("WORKBENCH_REWRITE_BUDGET", default=10_000, cast=int)
WORKBENCH_DEFAULT_SEED = config("WORKBENCH_DEFAULT_SEED", default=20240601, cast=int)

# Database
# https://docs.djangoproject.com/en/5.1/ref/settings/#databases
DATABASE_URL = config("DATABASE_URL", default=None)
if DATABASE_URL:
    DATABASES = {
        "default": dj_database_url.parse(DATABASE_URL)
    }
    # Add connection pooling for PostgreSQL
    if "postgresql" in DATABASE_URL:
        DATABASES["default"]["OPTIONS"] = {
            "pool": {
                "min_size": 1,
                "max_size": 4,
                "timeout": 30,
            }
        }
else:
    DATABASES = {
        "default": dj_database_url.parse(
            f"sqlite:///{WORKBENCH_CACHE_DIR / 'weights.sqlite3'}"
        )
    }
    os.makedirs(WORKBENCH_CACHE_DIR, exist_ok=True)

# Internationalization
LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

# Default primary key field type
# https://docs.djangoproject.com/en/5.1/ref/settings/#default-auto-field
DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Django REST Framework
# Only serializers and renderers are used; there are no views.
REST_FRAMEWORK = {
    "DEFAULT_RENDERER_CLASSES": [
        "rest_framework.renderers.JSONRenderer",
    ],
    "COERCE_DECIMAL_TO_STRING": True,
    "UNICODE_JSON": True,
    "COMPACT_JSON": True,
}

# Logging
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {process:d} {thread:d} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "file": {
            "level": "INFO",
            "class": "logging.FileHandler",
            "filename": BASE_DIR / "logs" / "workbench.log",
            "formatter": "verbose",
        },
        "console": {
            "level": "WARNING",
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "root": {
        "handlers": ["console"],
    },
    "loggers": {
        "django": {
            "handlers": ["file"],
            "level": "INFO",
            "propagate": True,
        },
        "apps": {
            "handlers": ["file", "console"],
            "level": "INFO",
            "propagate": False,
        },
    },
}

# Create logs directory if it doesn't exist
os.makedirs(BASE_DIR / "logs", exist_ok=True)
