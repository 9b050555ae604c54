import json
from pathlib import Path

import pandas as pd
import pytest

from scheme_algebra.errors import DomainError
from scheme_algebra.exactlin import parse_matrix
from scheme_algebra.reports import CheckReport
from scheme_algebra.tables import (
    DR_COLUMNS,
    PK_COLUMNS,
    descriptor_frame,
    emit_bases,
    emit_table,
    fit_power,
    format_support,
    sweep_multiplicities,
    write_table,
)
from scheme_algebra.terwilliger import DecompositionReport, decompose_standard_module

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def report_d3():
    return decompose_standard_module(3, 3)


@pytest.fixture(scope="module")
def report_d2():
    return decompose_standard_module(2, 3)


@pytest.mark.parametrize("values, expression", [
    ({3: 1, 4: 1, 5: 1}, "1"),
    ({3: 2, 4: 2, 5: 2}, "2"),
    ({3: 3, 4: 6, 5: 9}, "3(q-2)"),
    ({3: 1, 4: 8, 5: 27}, "(q-2)^3"),
    ({3: 6, 4: 24, 5: 54}, "6(q-2)^2"),
])
def test_fit_power(values, expression):
    fit = fit_power(values)
    assert fit.fits
    assert fit.expression() == expression


def test_fit_power_flags_other_shapes():
    fit = fit_power({3: 1, 4: 3, 5: 4})
    assert not fit.fits
    assert fit.expression() == "unfit:1,3,4"
    assert not fit_power({3: 0, 4: 0, 5: 0}).fits
    assert not fit_power({3: 2, 4: 4, 5: 7}).fits
    with pytest.raises(DomainError):
        fit_power({3: 1})


def test_format_support():
    assert format_support((1, 2, 3)) == "{1,2,3}"
    assert format_support((2,)) == "{2}"


def test_dr_frame_order_and_values(report_d3):
    frame = descriptor_frame(report_d3, "dr")
    assert list(frame.columns) == DR_COLUMNS
    assert list(zip(frame["d"], frame["r"])) == [(3, 0), (2, 1), (1, 1), (1, 2), (0, 2), (0, 3)]
    assert list(frame["multiplicity"]) == [1, 3, 2, 3, 3, 1]


def test_pk_frame(report_d3):
    frame = descriptor_frame(report_d3, "pk")
    assert list(frame.columns) == PK_COLUMNS
    assert frame["dimension"].tolist() == [4, 3, 2, 2, 1, 1]
    with pytest.raises(DomainError):
        descriptor_frame(report_d3, "xy")


def test_csv_at_q3(report_d3):
    text = emit_table(report_d3, "csv", "dr")
    lines = text.splitlines()
    assert lines[0] == "D,d,r,support,multiplicity"
    assert lines[2] == '3,2,1,"{1,2,3}",3'
    assert len(lines) == 7


def test_table_text(report_d2):
    text = emit_table(report_d2, "table", "dr")
    header = text.splitlines()[0].split()
    assert header == DR_COLUMNS
    assert len(text.splitlines()) == 1 + len(report_d2.descriptors)
    assert emit_table(report_d2, "table", "dr") == text


def test_empty_report_gives_header_only():
    empty = DecompositionReport(D=1, q=3, descriptors=[], pieces={}, checks=CheckReport(name="empty"),
                                class_checks={})
    assert emit_table(empty, "csv") == "D,d,r,support,multiplicity\n"
    assert emit_table(empty, "table").split() == DR_COLUMNS


def test_json_document(report_d2):
    document = json.loads(emit_table(report_d2, "json"))
    assert document["D"] == 2 and document["q"] == 3
    assert document["total_dim"] == 9
    assert document["all_passed"] is True
    first = document["classes"][0]
    assert (first["p"], first["k"], first["d"], first["r"]) == (2, 0, 2, 0)
    assert first["support"] == [0, 1, 2]
    assert first["checks"]["multiplicity"] is True
    assert "multiplicity_expression" not in first


def test_parquet_is_text_only_through_write_table(report_d2, tmp_path):
    with pytest.raises(DomainError):
        emit_table(report_d2, "parquet")
    path = tmp_path / "classes.parquet"
    write_table(report_d2, str(path), "parquet")
    frame = pd.read_parquet(path)
    assert list(frame.columns) == DR_COLUMNS
    assert frame["multiplicity"].tolist() == ["1", "2", "1", "1"]


def test_emit_bases(report_d2, tmp_path):
    written = emit_bases(report_d2, str(tmp_path / "bases"))
    assert len(written) == 5
    names = sorted(p.name for p in written)
    assert "D2_q3_p1_k0_copy1.txt" in names
    m = parse_matrix((tmp_path / "bases" / "D2_q3_p2_k0_copy0.txt").read_text())
    assert m.shape == (9, 3)


def test_emit_bases_needs_coordinates(tmp_path):
    report = decompose_standard_module(2, 3, coordinates=False)
    with pytest.raises(DomainError):
        emit_bases(report, str(tmp_path))


@pytest.mark.parametrize("D", [3, 4])
def test_q_sweep_reproduces_golden_tables(D):
    sweep = sweep_multiplicities(D)
    assert all(fit.fits for fit in sweep.values())
    report = decompose_standard_module(D, 3, coordinates=False)
    text = emit_table(report, "csv", "dr", sweep)
    assert text == (GOLDEN / f"classes_D{D}.csv").read_text()


def test_q_sweep_json_carries_expressions():
    sweep = sweep_multiplicities(2)
    assert sweep.all_passed and sweep.first_failure is None
    assert sorted(sweep.checks) == [3, 4, 5]
    report = decompose_standard_module(2, 3, coordinates=False)
    document = json.loads(emit_table(report, "json", sweep=sweep))
    by_label = {(c["d"], c["r"]): c for c in document["classes"]}
    assert by_label[(1, 1)]["multiplicity_expression"] == "2(q-2)"
    assert by_label[(1, 1)]["sweep"] == {"3": 2, "4": 4, "5": 6}


def test_write_table_needs_a_path(report_d2):
    with pytest.raises(DomainError):
        write_table(report_d2, "", "parquet")
