"""
Report generation: one row per variant, one column per target domain plus
Average, each cell "mean ± std" over seeds. The best mean in every column is
flagged (marked with * in text, bold in the document and console).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from docx import Document
from docx.enum.text import WD_ALIGN_PARAGRAPH
from docx.shared import Pt
from rich.table import Table

from config import REPORT_DECIMALS, REPORT_FONT_NAME, REPORT_FONT_SIZE_PT, SCHEMA_VERSION
from models import ReportError, RunResult, mean_and_std

from .table_utils import add_table_with_borders, rule_cell, set_cell_text

logger = logging.getLogger(__name__)

AVERAGE_COLUMN = "Average"


@dataclass
class ReportCell:
    mean: float
    std: float
    best: bool = False

    def text(self, decimals: int = REPORT_DECIMALS) -> str:
        return f"{self.mean:.{decimals}f} ± {self.std:.{decimals}f}"


@dataclass
class ReportRow:
    variant: str
    cells: list[ReportCell] = field(default_factory=list)


@dataclass
class ReportTable:
    columns: list[str]
    rows: list[ReportRow] = field(default_factory=list)

    def cell(self, variant: str, column: str) -> ReportCell:
        col = self.columns.index(column)
        for row in self.rows:
            if row.variant == variant:
                return row.cells[col]
        raise KeyError(variant)


def _average_cell(result: RunResult) -> ReportCell:
    """Mean of per-target means; std over per-seed averages when seeds line up."""
    mean = float(np.mean([t.mean_test_acc for t in result.targets]))
    counts = {len(t.seeds) for t in result.targets}
    std = 0.0
    if len(counts) == 1 and counts.pop() > 1:
        per_seed = np.array([[s.test_acc for s in t.seeds] for t in result.targets]).mean(axis=0)
        std = mean_and_std(per_seed.tolist())[1]
    return ReportCell(mean=mean, std=std)


def build_report(results: Sequence[RunResult]) -> ReportTable:
    if not results:
        raise ReportError("no completed runs to report")
    domains = results[0].domains
    for result in results[1:]:
        if sorted(result.domains) != sorted(domains):
            raise ReportError(
                f"runs cover different domain sets: {sorted(domains)} vs {sorted(result.domains)}"
            )

    table = ReportTable(columns=list(domains) + [AVERAGE_COLUMN])
    for result in results:
        by_domain = {t.target_domain: t for t in result.targets}
        cells = [
            ReportCell(mean=by_domain[d].mean_test_acc, std=by_domain[d].std_test_acc)
            for d in domains
        ]
        cells.append(_average_cell(result))
        table.rows.append(ReportRow(variant=result.variant.value, cells=cells))

    for col in range(len(table.columns)):
        best = max(row.cells[col].mean for row in table.rows)
        for row in table.rows:
            row.cells[col].best = row.cells[col].mean == best
    return table


def render_text(table: ReportTable, decimals: int = REPORT_DECIMALS) -> str:
    header = ["Method"] + table.columns
    body = [
        [row.variant] + [c.text(decimals) + ("*" if c.best else " ") for c in row.cells]
        for row in table.rows
    ]
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in body)
    lines.append("* best mean in column")
    return "\n".join(lines) + "\n"


def render_rich(table: ReportTable, decimals: int = REPORT_DECIMALS) -> Table:
    rich_table = Table(title="Leave-one-domain-out target accuracy")
    rich_table.add_column("Method", style="cyan")
    for column in table.columns:
        rich_table.add_column(column, justify="right")
    for row in table.rows:
        rich_table.add_row(
            row.variant,
            *[f"[bold]{c.text(decimals)}[/bold]" if c.best else c.text(decimals) for c in row.cells],
        )
    return rich_table


def report_to_dict(table: ReportTable) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "columns": table.columns,
        "rows": [
            {
                "variant": row.variant,
                "cells": {
                    column: {"mean": c.mean, "std": c.std, "best": c.best, "text": c.text()}
                    for column, c in zip(table.columns, row.cells)
                },
            }
            for row in table.rows
        ],
    }


def write_json(table: ReportTable, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(report_to_dict(table), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot write report to {path}") from exc
    return path


def generate_report_document(table: ReportTable, title: Optional[str] = None) -> Document:
    """Word document holding the report table with the best cells in bold."""
    doc = Document()
    style = doc.styles['Normal']
    style.font.name = REPORT_FONT_NAME
    style.font.size = Pt(REPORT_FONT_SIZE_PT)

    heading = doc.add_paragraph()
    run = heading.add_run(title or "Leave-one-domain-out target accuracy (mean ± std over seeds)")
    run.bold = True
    heading.alignment = WD_ALIGN_PARAGRAPH.CENTER

    headers = ["Method"] + table.columns
    doc_table = add_table_with_borders(doc, rows=len(table.rows) + 1, cols=len(headers))
    for i, header in enumerate(headers):
        cell = doc_table.rows[0].cells[i]
        set_cell_text(cell, header, bold=True)
        rule_cell(cell)
    for r, row in enumerate(table.rows, start=1):
        set_cell_text(doc_table.rows[r].cells[0], row.variant)
        for c, cell in enumerate(row.cells, start=1):
            set_cell_text(doc_table.rows[r].cells[c], cell.text(), bold=cell.best)
            doc_table.rows[r].cells[c].paragraphs[0].alignment = WD_ALIGN_PARAGRAPH.RIGHT

    doc.add_paragraph("Bold: best mean in the column.")
    return doc


def write_docx(table: ReportTable, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        generate_report_document(table).save(str(path))
    except OSError as exc:
        raise ReportError(f"cannot write report document to {path}") from exc
    logger.info("wrote report document %s", path)
    return path
