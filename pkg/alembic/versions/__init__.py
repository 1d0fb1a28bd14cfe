"""Alembic migration scripts."""

