"""
Engine cache for the run registry.

One engine per resolved registry URL, so pointing `RRLD_DATABASE_URL` or
`RRLD_OUTPUT_ROOT` elsewhere mid-process (tests do) picks up a fresh engine
without leaking connections to the old file.
"""

from __future__ import annotations

import logging

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine

from .settings import get_database_url, get_engine_kwargs

logger = logging.getLogger(__name__)

_ENGINES: dict[str, Engine] = {}
_SCHEMA_READY: set[str] = set()


def get_engine(echo: bool = False) -> Engine:
    """Engine for the currently configured registry URL; `echo` logs every statement."""
    url = get_database_url()
    engine = _ENGINES.get(url)
    if engine is None:
        engine = create_engine(url, echo=echo, **get_engine_kwargs(url))
        _ENGINES[url] = engine
        logger.debug("Registry engine created for %s", engine.url.render_as_string(hide_password=True))
    return engine


def reset_engine() -> None:
    """Dispose every cached engine; the next call re-reads the settings."""
    for engine in _ENGINES.values():
        engine.dispose()
    _ENGINES.clear()
    _SCHEMA_READY.clear()


def init_db() -> None:
    """
    Create the registry tables if this URL has not been prepared yet in the
    current process. Alembic produces the same schema for long-lived databases.
    """
    from . import models

    engine = get_engine()
    key = str(engine.url)
    if key in _SCHEMA_READY:
        return
    models.Base.metadata.create_all(bind=engine)
    _SCHEMA_READY.add(key)
