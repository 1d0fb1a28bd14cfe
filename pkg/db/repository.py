"""
Repository layer encapsulating registry persistence operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from sqlalchemy import select
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import Session, selectinload

from models import RegistryError, RunManifest, RunResult, Variant

from . import models as orm
from .serializers import model_to_run_result, run_result_to_model
from .session import get_session


@dataclass(slots=True)
class RunSummary:
    id: str
    variant: str
    average: float
    run_dir: Optional[str]
    created_at: str


def create_run(
    session: Session,
    result: RunResult,
    *,
    run_dir: Optional[str] = None,
    manifest: Optional[RunManifest] = None,
) -> orm.Run:
    """Persist a run and return the ORM entity."""
    run = run_result_to_model(result, run_dir=run_dir, manifest=manifest)
    session.add(run)
    session.flush()
    session.refresh(run)
    return run


def save_run_result(
    result: RunResult,
    *,
    run_dir: Optional[str] = None,
    manifest: Optional[RunManifest] = None,
) -> str:
    """Register a completed run using a managed session; returns the run id."""
    try:
        with get_session() as session:
            return create_run(session, result, run_dir=run_dir, manifest=manifest).id
    except SQLAlchemyError as exc:
        raise RegistryError("Failed to store run result") from exc


def _run_query():
    return select(orm.Run).options(
        selectinload(orm.Run.targets).selectinload(orm.TargetResultModel.seeds)
    )


def load_run_result(run_id: str) -> Optional[RunResult]:
    """Retrieve and deserialize a run by ID."""
    try:
        with get_session(readonly=True) as session:
            run = session.scalar(_run_query().where(orm.Run.id == run_id))
            return None if run is None else model_to_run_result(run)
    except SQLAlchemyError as exc:
        raise RegistryError(f"Failed to load run {run_id}") from exc


def list_runs(*, variant: Optional[str] = None, limit: Optional[int] = None) -> list[RunSummary]:
    """Return lightweight summaries, most recent first."""
    try:
        with get_session(readonly=True) as session:
            stmt = select(
                orm.Run.id,
                orm.Run.variant,
                orm.Run.average,
                orm.Run.run_dir,
                orm.Run.created_at,
            ).order_by(orm.Run.created_at.desc(), orm.Run.id)
            if variant:
                stmt = stmt.where(orm.Run.variant == variant)
            if limit:
                stmt = stmt.limit(limit)
            rows = session.execute(stmt).all()
    except SQLAlchemyError as exc:
        raise RegistryError("Failed to list runs") from exc
    return [
        RunSummary(
            id=row.id,
            variant=row.variant,
            average=row.average,
            run_dir=row.run_dir,
            created_at=row.created_at.isoformat() if row.created_at else "",
        )
        for row in rows
    ]


def latest_results_by_variant() -> list[RunResult]:
    """Most recent registered run of every variant, in variant order."""
    latest: dict[str, str] = {}
    for summary in list_runs():
        latest.setdefault(summary.variant, summary.id)
    results = []
    for variant in Variant:
        run_id = latest.get(variant.value)
        result = load_run_result(run_id) if run_id else None
        if result is not None:
            results.append(result)
    return results
