"""
SQLAlchemy ORM models mirroring the RunResult structure.
"""

from __future__ import annotations

import json
import uuid
from datetime import datetime, timezone
from typing import Any, List, Optional

from sqlalchemy import DateTime, Float, ForeignKey, Integer, String, Text
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column, relationship
from sqlalchemy.sql import func


def generate_uuid() -> str:
    """Produce a random UUID string."""
    return str(uuid.uuid4())


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


class Base(DeclarativeBase):
    """Base declarative class."""


class Run(Base):
    """One completed run_protocol call for a single variant."""

    __tablename__ = "runs"

    id: Mapped[str] = mapped_column(String(36), primary_key=True, default=generate_uuid)
    created_at: Mapped[datetime] = mapped_column(
        DateTime(timezone=True), default=utcnow, server_default=func.now(), nullable=False
    )

    variant: Mapped[str] = mapped_column(String(32), nullable=False, index=True)
    run_dir: Mapped[Optional[str]] = mapped_column(String(1024), nullable=True)
    average: Mapped[float] = mapped_column(Float, nullable=False)
    schema_version: Mapped[str] = mapped_column(String(16), nullable=False)
    toolkit_version: Mapped[Optional[str]] = mapped_column(String(64), nullable=True)

    # Snapshots
    manifest_json: Mapped[Optional[str]] = mapped_column(Text, nullable=True)

    targets: Mapped[List["TargetResultModel"]] = relationship(
        back_populates="run",
        cascade="all, delete-orphan",
        order_by="TargetResultModel.position",
    )

    def manifest_dict(self) -> Optional[dict[str, Any]]:
        return json.loads(self.manifest_json) if self.manifest_json else None


class TargetResultModel(Base):
    __tablename__ = "target_results"

    id: Mapped[str] = mapped_column(String(36), primary_key=True, default=generate_uuid)
    run_id: Mapped[str] = mapped_column(
        String(36), ForeignKey("runs.id", ondelete="CASCADE"), nullable=False
    )
    position: Mapped[int] = mapped_column(Integer, nullable=False)
    target_domain: Mapped[str] = mapped_column(String(255), nullable=False)
    mean_test_acc: Mapped[float] = mapped_column(Float, nullable=False)
    std_test_acc: Mapped[float] = mapped_column(Float, nullable=False)

    run: Mapped[Run] = relationship(back_populates="targets")
    seeds: Mapped[List["SeedResultModel"]] = relationship(
        back_populates="target",
        cascade="all, delete-orphan",
        order_by="SeedResultModel.position",
    )


class SeedResultModel(Base):
    __tablename__ = "seed_results"

    id: Mapped[str] = mapped_column(String(36), primary_key=True, default=generate_uuid)
    target_result_id: Mapped[str] = mapped_column(
        String(36), ForeignKey("target_results.id", ondelete="CASCADE"), nullable=False
    )
    position: Mapped[int] = mapped_column(Integer, nullable=False)
    seed: Mapped[int] = mapped_column(Integer, nullable=False)
    best_step: Mapped[int] = mapped_column(Integer, nullable=False)
    best_val_acc: Mapped[float] = mapped_column(Float, nullable=False)
    test_acc: Mapped[float] = mapped_column(Float, nullable=False)
    best_checkpoint: Mapped[Optional[str]] = mapped_column(String(1024), nullable=True)
    metrics_path: Mapped[Optional[str]] = mapped_column(String(1024), nullable=True)
    # JSON arrays
    val_steps_json: Mapped[str] = mapped_column(Text, nullable=False, default="[]")
    val_history_json: Mapped[str] = mapped_column(Text, nullable=False, default="[]")

    target: Mapped[TargetResultModel] = relationship(back_populates="seeds")
