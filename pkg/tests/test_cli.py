import json
from fractions import Fraction
from pathlib import Path

import pytest

from run_terwilliger import (
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_RESOURCE,
    EXIT_USAGE,
    RunConfig,
    format_time,
    main,
    parse_config,
    run,
)

GOLDEN = Path(__file__).parent / "golden"


def test_format_time():
    assert format_time(12.34) == "12.3s"
    assert format_time(90) == "1.5m"
    assert format_time(5400) == "1.5h"


def test_parse_config_defaults():
    config = parse_config(["decompose"])
    assert (config.D, config.q, config.param, config.fmt) == (2, 3, "dr", "table")
    assert config.effective_omega == Fraction(1, 3)
    assert config.invariants
    config = parse_config(["module", "--n", "2", "--omega=-1/2"])
    assert config.omega == Fraction(-1, 2)


@pytest.mark.parametrize("argv", [
    [],
    ["decompose", "--D", "0"],
    ["decompose", "--q", "2"],
    ["module", "--n", "1", "--omega", "0.5"],
    ["module", "--n", "-1"],
    ["cg", "--m", "1"],
    ["cg", "--power", "0"],
    ["verify", "--suite", "everything"],
    ["decompose", "--workers", "0"],
])
def test_usage_errors(argv):
    assert main(argv) == EXIT_USAGE


def test_cg_pair(capsys):
    assert main(["cg", "--m", "1", "--n", "1"]) == EXIT_OK
    assert capsys.readouterr().out == "L2 + L0\n"


def test_cg_power_with_dimension_audit(capsys):
    assert main(["cg", "--power", "4"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "L4 + 3*L2 + 2*L0"
    assert lines[1] == "dimension audit: 1*5 + 3*3 + 2*1 = 16 = 2^4"


def test_matrix_command_matches_golden(capsys):
    assert main(["matrix", "--which", "A", "--D", "1", "--q", "3"]) == EXIT_OK
    assert capsys.readouterr().out == (GOLDEN / "A_D1_q3.txt").read_text()


def test_matrix_command_writes_file(tmp_path):
    out = tmp_path / "e1.txt"
    assert main(["matrix", "--which", "Eistar", "--i", "1", "--D", "2", "--q", "3", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "9 9"
    assert len(lines) == 1 + 4


def test_matrix_index_out_of_range():
    assert main(["matrix", "--which", "Ei", "--i", "5", "--D", "2", "--q", "3"]) == EXIT_FAILURE


def test_resource_cap_exit_status(monkeypatch):
    assert main(["matrix", "--which", "A", "--D", "3", "--q", "3", "--cap", "5"]) == EXIT_RESOURCE
    monkeypatch.setenv("HAMMING_MATERIALIZE_CAP", "5")
    assert main(["verify", "--suite", "dimension", "--D", "3", "--q", "3"]) == EXIT_RESOURCE


def test_module_command(capsys):
    assert main(["module", "--n", "1", "--omega", "1/3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("# A\n2 2\n0 0 -1/6\n0 1 2/3\n1 0 1/3\n1 1 1/6\n# B\n")
    assert "# C\n" in out
    assert main(["module", "--n", "2", "--sl2"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("# E\n3 3\n0 1 2\n")


def test_decompose_csv_at_q3(capsys):
    assert main(["decompose", "--D", "3", "--q", "3", "--format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 7
    assert lines[2] == '3,2,1,"{1,2,3}",3'


@pytest.mark.parametrize("D", [3, 4])
def test_decompose_q_sweep_matches_golden_table(D, capsys):
    assert main(["decompose", "--D", str(D), "--format", "csv", "--q-sweep", "--no-invariants"]) == EXIT_OK
    assert capsys.readouterr().out == (GOLDEN / f"classes_D{D}.csv").read_text()


def test_decompose_is_deterministic(capsys):
    main(["decompose", "--D", "2", "--q", "4", "--format", "json"])
    first = capsys.readouterr().out
    main(["decompose", "--D", "2", "--q", "4", "--format", "json"])
    assert capsys.readouterr().out == first
    assert json.loads(first)["total_dim"] == 16


def test_decompose_outputs(tmp_path):
    parquet = tmp_path / "table.parquet"
    bases = tmp_path / "bases"
    argv = ["decompose", "--D", "2", "--q", "3", "--format", "parquet", "--out", str(parquet),
            "--emit-bases", str(bases)]
    assert main(argv) == EXIT_OK
    assert parquet.exists()
    assert len(list(bases.glob("D2_q3_*.txt"))) == 5


def test_parquet_without_out_is_a_usage_error():
    assert main(["decompose", "--D", "2", "--q", "3", "--format", "parquet"]) == EXIT_USAGE
    assert run(RunConfig(command="decompose", D=2, q=3, fmt="parquet")) == EXIT_FAILURE


def test_verify_dimension(capsys):
    assert main(["verify", "--suite", "dimension", "--D", "2", "--q", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "dim T(2) for q=3: 15 = C(6,4)" in out
    assert "PASS" in out


@pytest.mark.parametrize("suite", ["idempotents", "qpoly", "decomposition", "classification", "wedderburn"])
def test_verify_suites_pass(suite, capsys):
    assert main(["verify", "--suite", suite, "--D", "2", "--q", "4"]) == EXIT_OK
    assert "FAIL" not in capsys.readouterr().out


def test_verify_relations_for_one_omega():
    assert main(["verify", "--suite", "relations", "--omega", "1/3"]) == EXIT_OK


def test_verify_kron_matrix_free():
    assert main(["verify", "--suite", "kron", "--D", "8", "--q", "3", "--samples", "2", "--seed", "3"]) == EXIT_OK


def test_run_reports_failures(capsys):
    config = RunConfig(command="decompose", D=2, q=3, fmt="xml")
    assert run(config) == EXIT_FAILURE
    assert "FAILED" in capsys.readouterr().err


def test_q_sweep_failure_at_another_q_fails_the_command(monkeypatch, capsys):
    import scheme_algebra.terwilliger as terwilliger

    exact = terwilliger.multiplicity

    def off_by_one_at_q5(D, p, k, q):
        return exact(D, p, k, q) + (q == 5)

    monkeypatch.setattr(terwilliger, "multiplicity", off_by_one_at_q5)
    argv = ["decompose", "--D", "2", "--q", "3", "--format", "csv", "--q-sweep", "--no-invariants"]
    assert main(argv) == EXIT_FAILURE
    assert "q=5" in capsys.readouterr().err
