"""
Run-registry package.

Exposes helpers for obtaining database engines and sessions, along with the
ORM models and repository helpers used by the train and report commands.
"""

from .engine import get_engine, init_db, reset_engine  # noqa: F401
from .session import get_session  # noqa: F401
from . import models  # noqa: F401
from .repository import (  # noqa: F401
    RunSummary,
    latest_results_by_variant,
    list_runs,
    load_run_result,
    save_run_result,
)

__all__ = [
    "get_engine",
    "get_session",
    "init_db",
    "reset_engine",
    "models",
    "RunSummary",
    "latest_results_by_variant",
    "list_runs",
    "load_run_result",
    "save_run_result",
]
