"""Run registry: runs, per-target and per-seed results."""

from __future__ import annotations

from alembic import op
import sqlalchemy as sa

revision = "20260301_0001"
down_revision = None
branch_labels = None
depends_on = None


def upgrade() -> None:
    op.create_table(
        "runs",
        sa.Column("id", sa.String(length=36), nullable=False),
        sa.Column(
            "created_at",
            sa.DateTime(timezone=True),
            nullable=False,
            server_default=sa.text("CURRENT_TIMESTAMP"),
        ),
        sa.Column("variant", sa.String(length=32), nullable=False),
        sa.Column("run_dir", sa.String(length=1024), nullable=True),
        sa.Column("average", sa.Float(), nullable=False),
        sa.Column("schema_version", sa.String(length=16), nullable=False),
        sa.Column("toolkit_version", sa.String(length=64), nullable=True),
        sa.Column("manifest_json", sa.Text(), nullable=True),
        sa.PrimaryKeyConstraint("id"),
    )
    op.create_index("ix_runs_variant", "runs", ["variant"], unique=False)

    op.create_table(
        "target_results",
        sa.Column("id", sa.String(length=36), nullable=False),
        sa.Column("run_id", sa.String(length=36), nullable=False),
        sa.Column("position", sa.Integer(), nullable=False),
        sa.Column("target_domain", sa.String(length=255), nullable=False),
        sa.Column("mean_test_acc", sa.Float(), nullable=False),
        sa.Column("std_test_acc", sa.Float(), nullable=False),
        sa.ForeignKeyConstraint(["run_id"], ["runs.id"], ondelete="CASCADE"),
        sa.PrimaryKeyConstraint("id"),
    )

    op.create_table(
        "seed_results",
        sa.Column("id", sa.String(length=36), nullable=False),
        sa.Column("target_result_id", sa.String(length=36), nullable=False),
        sa.Column("position", sa.Integer(), nullable=False),
        sa.Column("seed", sa.Integer(), nullable=False),
        sa.Column("best_step", sa.Integer(), nullable=False),
        sa.Column("best_val_acc", sa.Float(), nullable=False),
        sa.Column("test_acc", sa.Float(), nullable=False),
        sa.Column("best_checkpoint", sa.String(length=1024), nullable=True),
        sa.Column("metrics_path", sa.String(length=1024), nullable=True),
        sa.Column("val_steps_json", sa.Text(), nullable=False),
        sa.Column("val_history_json", sa.Text(), nullable=False),
        sa.ForeignKeyConstraint(["target_result_id"], ["target_results.id"], ondelete="CASCADE"),
        sa.PrimaryKeyConstraint("id"),
    )


def downgrade() -> None:
    op.drop_table("seed_results")
    op.drop_table("target_results")
    op.drop_index("ix_runs_variant", table_name="runs")
    op.drop_table("runs")
