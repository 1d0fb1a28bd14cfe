"""
Report generation modules for the RRLD toolkit
"""

from .report_generator import (
    AVERAGE_COLUMN,
    ReportCell,
    ReportRow,
    ReportTable,
    build_report,
    generate_report_document,
    render_rich,
    render_text,
    report_to_dict,
    write_docx,
    write_json,
)

__all__ = [
    "AVERAGE_COLUMN",
    "ReportCell",
    "ReportRow",
    "ReportTable",
    "build_report",
    "generate_report_document",
    "render_rich",
    "render_text",
    "report_to_dict",
    "write_docx",
    "write_json",
]
