"""
Migration environment for the run registry.

The URL always comes from `db.settings.get_database_url()`, so alembic and the
CLI agree on which registry they touch; the value in alembic.ini is ignored.
"""

from __future__ import annotations

import sys
from logging.config import fileConfig
from pathlib import Path

from alembic import context
from sqlalchemy import engine_from_config, pool

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from db.models import Base  # noqa: E402
from db.settings import get_database_url, get_engine_kwargs  # noqa: E402

config = context.config
if config.config_file_name is not None:
    fileConfig(config.config_file_name, disable_existing_loggers=False)

REGISTRY_URL = get_database_url()
config.set_main_option("sqlalchemy.url", REGISTRY_URL.replace("%", "%%"))

# batch mode lets ALTER TABLE work on the default SQLite registry
_CONFIGURE = {
    "target_metadata": Base.metadata,
    "render_as_batch": REGISTRY_URL.startswith("sqlite"),
    "compare_type": True,
}


def _offline() -> None:
    context.configure(url=REGISTRY_URL, literal_binds=True, dialect_opts={"paramstyle": "named"}, **_CONFIGURE)
    with context.begin_transaction():
        context.run_migrations()


def _online() -> None:
    engine = engine_from_config(
        config.get_section(config.config_ini_section) or {},
        prefix="sqlalchemy.",
        poolclass=pool.NullPool,
        **get_engine_kwargs(REGISTRY_URL),
    )
    with engine.connect() as connection:
        context.configure(connection=connection, **_CONFIGURE)
        with context.begin_transaction():
            context.run_migrations()


if context.is_offline_mode():
    _offline()
else:
    _online()
