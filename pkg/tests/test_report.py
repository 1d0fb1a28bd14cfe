import json

import pytest
from docx import Document
from docx.oxml.ns import qn

from generators import AVERAGE_COLUMN, ReportCell, build_report, render_text, report_to_dict, write_docx, write_json
from models import ReportError, RunResult, SeedResult, TargetResult, Variant, mean_and_std


def make_result(variant, accuracies):
    """accuracies: {domain: [test_acc per seed]}"""
    targets = [
        TargetResult.from_seeds(
            domain,
            [
                SeedResult(seed=i, target_domain=domain, best_step=0, best_val_acc=0.5, test_acc=acc)
                for i, acc in enumerate(values)
            ],
        )
        for domain, values in accuracies.items()
    ]
    return RunResult.from_targets(variant, targets)


@pytest.fixture
def results():
    return [
        make_result(Variant.ERM, {"a": [0.5, 0.7], "b": [0.6, 0.6]}),
        make_result(Variant.RRLD, {"a": [0.8, 0.9], "b": [0.6, 0.6]}),
    ]


def test_cell_text():
    assert ReportCell(0.82, 0.02).text() == "0.820 ± 0.020"
    assert ReportCell(0.5, 0.0).text() == "0.500 ± 0.000"


def test_columns_and_cells(results):
    table = build_report(results)
    assert table.columns == ["a", "b", AVERAGE_COLUMN]
    cell = table.cell("ERM", "a")
    assert cell.mean == pytest.approx(0.6)
    assert cell.std == pytest.approx(0.141421, abs=1e-6)
    assert table.cell("RRLD", "b").text() == "0.600 ± 0.000"


def test_average_column(results):
    table = build_report(results)
    average = table.cell("RRLD", AVERAGE_COLUMN)
    assert average.mean == pytest.approx(0.725)
    # per-seed averages 0.7 and 0.75
    assert average.std == pytest.approx(0.035355, abs=1e-6)


def test_best_marks_include_ties(results):
    table = build_report(results)
    assert table.cell("RRLD", "a").best and not table.cell("ERM", "a").best
    assert table.cell("RRLD", "b").best and table.cell("ERM", "b").best
    assert table.cell("RRLD", AVERAGE_COLUMN).best


def test_single_seed_has_zero_spread():
    table = build_report([make_result(Variant.ERM, {"a": [0.4], "b": [0.6]})])
    assert table.cell("ERM", "a").text() == "0.400 ± 0.000"
    assert table.cell("ERM", AVERAGE_COLUMN).text() == "0.500 ± 0.000"


@pytest.mark.parametrize("value", [0.35, 0.1 + 0.2, 1.0 / 3.0])
def test_constant_accuracies_have_exactly_zero_spread(value):
    assert mean_and_std([value, value, value]) == (value, 0.0)


def test_domain_mismatch():
    with pytest.raises(ReportError):
        build_report([
            make_result(Variant.ERM, {"a": [0.5], "b": [0.5]}),
            make_result(Variant.RRLD, {"a": [0.5], "c": [0.5]}),
        ])


def test_empty():
    with pytest.raises(ReportError):
        build_report([])


def test_domain_order_follows_the_first_run():
    table = build_report([
        make_result(Variant.ERM, {"b": [0.5], "a": [0.5]}),
        make_result(Variant.RRLD, {"a": [0.7], "b": [0.6]}),
    ])
    assert table.columns == ["b", "a", AVERAGE_COLUMN]
    assert table.cell("RRLD", "a").mean == pytest.approx(0.7)


def test_text_rendering(results):
    text = render_text(build_report(results))
    lines = text.splitlines()
    assert lines[0].split() == ["Method", "a", "b", AVERAGE_COLUMN]
    assert "0.850 ± 0.071*" in text
    assert lines[-1] == "* best mean in column"


def test_json(results, tmp_path):
    path = write_json(build_report(results), tmp_path / "out" / "report.json")
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert payload == report_to_dict(build_report(results))
    assert payload["rows"][1]["cells"]["a"]["text"] == "0.850 ± 0.071"


def test_docx_bolds_best_cells(results, tmp_path):
    path = write_docx(build_report(results), tmp_path / "report.docx")
    table = Document(str(path)).tables[0]
    assert [c.text for c in table.rows[0].cells] == ["Method", "a", "b", AVERAGE_COLUMN]
    rrld_a = table.rows[2].cells[1].paragraphs[0].runs[0]
    erm_a = table.rows[1].cells[1].paragraphs[0].runs[0]
    assert rrld_a.text == "0.850 ± 0.071"
    assert rrld_a.bold
    assert not erm_a.bold


def test_docx_rules_header_row(results, tmp_path):
    path = write_docx(build_report(results), tmp_path / "report.docx")
    table = Document(str(path)).tables[0]
    header = table.rows[0].cells[0]._tc.tcPr
    bottom = header.find(qn("w:tcBorders")).find(qn("w:bottom"))
    assert bottom.get(qn("w:val")) == "single"
    assert table.rows[1].cells[0]._tc.tcPr.find(qn("w:tcBorders")) is None
