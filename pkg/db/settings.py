"""
Settings helpers for run-registry connectivity.

The registry defaults to a SQLite file next to the runs it indexes, so a
fresh checkout needs no database server; any SQLAlchemy URL can be supplied
instead through the environment.
"""

from __future__ import annotations

import os
from typing import Any, Dict

from config import DATABASE_URL_ENV, REGISTRY_FILENAME
from utils import get_output_root


def get_database_url() -> str:
    """
    Resolve the registry URL in the following order:

    1. `RRLD_DATABASE_URL` environment variable.
    2. A SQLite file `registry.db` under the output root.
    """
    env_url = os.getenv(DATABASE_URL_ENV)
    if env_url:
        return env_url

    sqlite_path = get_output_root() / REGISTRY_FILENAME
    sqlite_path.parent.mkdir(parents=True, exist_ok=True)
    return f"sqlite:///{sqlite_path}"


def get_engine_kwargs(database_url: str) -> Dict[str, Any]:
    """
    Return engine keyword arguments for SQLAlchemy based on the driver.

    SQLite connections may be handed between threads of the CLI process.
    """
    if database_url.startswith("sqlite://"):
        return {"connect_args": {"check_same_thread": False}}
    return {}
