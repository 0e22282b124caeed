# mypy: ignore-errors

import os

from .default import *

###############################################################################
# Core

DEBUG = True
SECRET_KEY = "dev"

ALLOWED_HOSTS = [
    "127.0.0.1",
    "localhost",
]

LOGGING["loggers"]["dqengine"]["level"] = os.getenv("DQ_LOG_LEVEL", "INFO")
