"""
Unit-of-work scope for registry reads and writes.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Iterator

from sqlalchemy.orm import Session

from .engine import get_engine, init_db


@contextmanager
def get_session(*, readonly: bool = False) -> Iterator[Session]:
    """
    Yield a session on the current registry, creating its tables on first use.

    Writes commit when the block exits cleanly and roll back on any error.
    A `readonly` scope never commits. Loaded objects stay usable after the
    block, since run results are rebuilt from them outside the scope.
    """
    init_db()
    with Session(get_engine(), autoflush=False, expire_on_commit=False) as session:
        if readonly:
            yield session
            return
        with session.begin():
            yield session
