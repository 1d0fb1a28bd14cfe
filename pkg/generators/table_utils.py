"""
python-docx helpers for the results table.
"""

from docx.oxml import OxmlElement
from docx.oxml.ns import qn
from docx.shared import Inches

from config import REPORT_METHOD_COLUMN_WIDTH_INCHES, REPORT_TABLE_WIDTH_INCHES


def rule_cell(cell, edge="bottom", size=12):
    """Draw a solid rule of `size` eighths of a point on one edge of `cell`."""
    props = cell._tc.get_or_add_tcPr()
    borders = props.find(qn("w:tcBorders"))
    if borders is None:
        borders = OxmlElement("w:tcBorders")
        props.append(borders)
    line = borders.find(qn(f"w:{edge}"))
    if line is None:
        line = OxmlElement(f"w:{edge}")
        borders.append(line)
    for key, value in (("val", "single"), ("sz", str(size)), ("color", "auto")):
        line.set(qn(f"w:{key}"), value)


def add_table_with_borders(doc, rows, cols):
    """
    Add a bordered table of fixed width.

    The first (method) column gets REPORT_METHOD_COLUMN_WIDTH_INCHES and the
    domain columns share the remaining width equally. Widths are set on both
    columns and cells, which Word needs to respect them.
    """
    table = doc.add_table(rows=rows, cols=cols)
    table.style = 'Table Grid'
    table.autofit = False
    table.width = Inches(REPORT_TABLE_WIDTH_INCHES)

    if cols == 0:
        return table

    first_width = Inches(REPORT_METHOD_COLUMN_WIDTH_INCHES)
    remaining = REPORT_TABLE_WIDTH_INCHES - REPORT_METHOD_COLUMN_WIDTH_INCHES
    other_width = Inches(remaining / (cols - 1) if cols > 1 else remaining)

    for i, column in enumerate(table.columns):
        column.width = first_width if i == 0 else other_width
    for row in table.rows:
        for i, cell in enumerate(row.cells):
            cell.width = first_width if i == 0 else other_width

    return table


def set_cell_text(cell, text, *, bold=False):
    """Replace the cell text with a single run, optionally bold."""
    paragraph = cell.paragraphs[0]
    paragraph.clear()
    run = paragraph.add_run(text)
    run.bold = bold
    return run
