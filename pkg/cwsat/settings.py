"""Django settings for the cwsat project."""
from __future__ import annotations

import os
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get("DJANGO_SECRET_KEY", "insecure-dev-secret")
DEBUG = os.environ.get("DJANGO_DEBUG", "false").lower() == "true"

INSTALLED_APPS = [
    "reduction.apps.ReductionConfig",
]

# Nothing is persisted; the project only uses settings, commands and checks.
DATABASES: dict = {}

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True


LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "stderr": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
            "stream": "ext://sys.stderr",
        },
    },
    "loggers": {
        "reduction": {
            "handlers": ["stderr"],
            "level": os.environ.get("CWSAT_LOG_LEVEL", "WARNING"),
            "propagate": False,
        },
    },
}

# Brute-force semantics oracle refuses frameworks above this many arguments.
CWSAT_ORACLE_LIMIT = int(os.environ.get("CWSAT_ORACLE_LIMIT", "20"))
CWSAT_CONFLICT_BUDGET = int(os.environ.get("CWSAT_CONFLICT_BUDGET", "1000000"))
CWSAT_PROJECTION_LIMIT = int(os.environ.get("CWSAT_PROJECTION_LIMIT", "30"))
CWSAT_SEARCH_BUDGET = int(os.environ.get("CWSAT_SEARCH_BUDGET", "200000"))
CWSAT_EXTERNAL_SOLVER = os.environ.get("CWSAT_EXTERNAL_SOLVER", "")
