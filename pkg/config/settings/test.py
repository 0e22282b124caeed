from .default import *

# mypy: ignore-errors

###############################################################################
# Core

TEST = True
DEBUG = True
SECRET_KEY = "test"

ALLOWED_HOSTS = ["testserver"]

LOGGING["loggers"]["dqengine"]["level"] = "DEBUG"
