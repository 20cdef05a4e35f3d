"""
Production settings for the formality workbench.

Long batch runs (weight tables, order-2 star products) use these settings,
typically with DATABASE_URL pointing at a shared PostgreSQL weight cache.
"""

from .base import *

DEBUG = False

# Fail early when a shared cache is misconfigured
if DATABASE_URL and "postgresql" in DATABASE_URL:
    DATABASES["default"]["CONN_MAX_AGE"] = config("CONN_MAX_AGE", default=60, cast=int)

LOGGING["handlers"]["console"]["level"] = "INFO"
LOGGING["loggers"]["apps"]["level"] = config("WORKBENCH_LOG_LEVEL", default="INFO")
