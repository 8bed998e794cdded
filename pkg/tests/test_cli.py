"""Command-line interface: subcommands, formats, and exit codes."""

import json

import pytest

from epilink.cli import (
    EXIT_ASSUMPTION,
    EXIT_CAP,
    EXIT_OK,
    EXIT_PARSE,
    main,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestListProblems:
    def test_lists_kinds(self, capsys):
        code, out, _ = run(capsys, "list-problems")
        assert code == EXIT_OK
        kinds = out.strip().splitlines()
        assert "ctrap" in kinds and "lookup-table" in kinds


class TestEg:
    def test_ctrap_dot(self, capsys):
        code, out, err = run(capsys, "eg", "--kind", "ctrap", "--m", "2")
        assert code == EXIT_OK
        assert "digraph" in out
        assert "0 -> 1 [style=solid];" in out
        assert "0 -> 5" not in out
        summary = json.loads(err)
        assert summary["k_scc"] == 4
        assert summary["decomposition_difficulty"] == 4

    def test_onemax_edgeless(self, capsys):
        code, out, _ = run(capsys, "eg", "--kind", "onemax", "--l", "6")
        assert code == EXIT_OK
        assert "->" not in out

    def test_leadingones_dashed(self, capsys):
        code, out, _ = run(capsys, "eg", "--kind", "leadingones", "--l", "5")
        assert code == EXIT_OK
        assert out.count("style=dashed") == 10
        assert "style=solid" not in out

    def test_json_format_with_order_bound(self, capsys):
        code, out, _ = run(
            capsys,
            "eg", "--kind", "onemax", "--l", "4",
            "--format", "json", "--epistasis-order-bound", "2",
        )
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["edges"] == []
        assert payload["summary"]["max_epistasis_order"] == 0

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "eg.dot"
        code, out, _ = run(
            capsys, "eg", "--kind", "ctrap", "--m", "1", "--output", str(target)
        )
        assert code == EXIT_OK
        assert "digraph" in target.read_text()


class TestDecompose:
    def test_leadingtraps(self, capsys):
        code, out, _ = run(capsys, "decompose", "--kind", "leadingtraps", "--m", "2")
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["partition"] == [[0, 1, 2, 3], [4, 5, 6, 7]]
        assert payload["chromosome"] == "1" * 8
        assert payload["evaluations"] == 33
        assert payload["optimal"] is True

    def test_onemax_singletons(self, capsys):
        code, out, _ = run(capsys, "decompose", "--kind", "onemax", "--l", "8")
        payload = json.loads(out)
        assert code == EXIT_OK
        assert payload["evaluations"] == 17
        assert payload["optimal"] is True

    def test_cyctrap_fixture(self, capsys):
        code, out, _ = run(
            capsys,
            "decompose", "--kind", "cyctrap", "--l", "12", "--fixture-partition",
        )
        payload = json.loads(out)
        assert code == EXIT_OK
        assert payload["partition_source"] == "fixture"
        assert payload["partition"] == [list(range(10)), [10, 11]]
        assert payload["optimal"] is True


class TestIpe:
    def test_ctrap_with_trace(self, capsys):
        code, out, _ = run(
            capsys,
            "ipe", "--kind", "ctrap", "--m", "2", "--n", "256", "--trace",
        )
        payload = json.loads(out)
        assert code == EXIT_OK
        assert payload["outcome"] == "1" * 8
        assert payload["ebacc"] == 1.0
        assert payload["topological_order_ok"] is True
        assert payload["trace"]["outcome"] == "success"

    def test_onemax_tiny_population(self, capsys):
        code, out, _ = run(capsys, "ipe", "--kind", "onemax", "--l", "10", "--n", "1")
        payload = json.loads(out)
        assert code == EXIT_OK
        assert payload["outcome"] == "1" * 10


class TestVerify:
    def test_ctrap_all_pass(self, capsys):
        code, out, _ = run(
            capsys,
            "verify", "--kind", "ctrap", "--m", "2",
            "--theorems", "decomposition,blanket,clique", "--weak-order", "3",
        )
        assert code == EXIT_OK
        assert "fail" not in out
        assert "[          pass]" in out

    def test_cyctrap_not_applicable(self, capsys):
        code, out, _ = run(
            capsys,
            "verify", "--kind", "cyctrap", "--l", "12",
            "--theorems", "decomposition", "--weak-order", "2",
        )
        assert code == EXIT_OK
        assert "not-applicable" in out
        assert "[2, 4] => 3" in out

    def test_cniah_clique_not_applicable(self, capsys):
        code, out, _ = run(
            capsys,
            "verify", "--kind", "cniah", "--m", "2", "--theorems", "clique",
        )
        assert code == EXIT_OK
        assert "not-applicable" in out

    def test_unknown_theorem(self, capsys):
        code, _, err = run(
            capsys,
            "verify", "--kind", "onemax", "--l", "4", "--theorems", "pac",
        )
        assert code == EXIT_PARSE
        assert "unknown theorems" in err


class TestPacSweep:
    def test_onemax_csv(self, capsys):
        code, out, _ = run(
            capsys,
            "pac-sweep", "--kind", "onemax", "--l", "8",
            "--n-values", "8", "--runs", "20",
        )
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[3].startswith("n,runs,success_rate")
        n, runs, success, *_ = lines[4].split(",")
        assert (n, runs) == ("8", "20")
        assert float(success) == 1.0

    def test_auto_threshold_at_k1(self, capsys):
        # difficulty 1: the sufficient-n bound is small enough to sweep directly
        code, out, _ = run(
            capsys,
            "pac-sweep", "--kind", "onemax", "--l", "8", "--runs", "10",
        )
        assert code == EXIT_OK
        assert "sufficient_n_threshold=2^2" in out

    def test_infeasible_threshold_needs_n_values(self, capsys):
        code, _, err = run(
            capsys, "pac-sweep", "--kind", "ctrap", "--m", "2", "--runs", "10"
        )
        assert code == EXIT_PARSE
        assert "2^80" in err

    def test_bad_delta(self, capsys):
        code, _, _ = run(
            capsys,
            "pac-sweep", "--kind", "onemax", "--l", "4",
            "--delta", "1.5", "--n-values", "4",
        )
        assert code == EXIT_PARSE


class TestWeakObservability:
    def test_small_run(self, capsys):
        code, out, _ = run(
            capsys,
            "weak-observability", "--runs", "10", "--population-sizes", "10,50",
            "--population", "20", "--generations", "2", "--blocks", "2,3",
        )
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        header = lines[1].split(",")
        assert header[:4] == ["block_order", "population_size", "generation", "probability"]
        orders = {line.split(",")[0] for line in lines[2:]}
        assert orders == {"2", "3"}


class TestSpecFilesAndExitCodes:
    def test_spec_file(self, capsys, tmp_path):
        spec = tmp_path / "p.json"
        spec.write_text(json.dumps({"kind": "ctrap", "m": 1}))
        code, out, _ = run(capsys, "decompose", "--spec", str(spec))
        assert code == EXIT_OK
        assert json.loads(out)["chromosome"] == "1111"

    def test_parse_error_unknown_kind(self, capsys):
        code, _, err = run(capsys, "eg", "--kind", "spinglass", "--l", "8")
        assert code == EXIT_PARSE
        assert "error:" in err

    def test_parse_error_missing_spec(self, capsys):
        code, _, _ = run(capsys, "eg")
        assert code == EXIT_PARSE

    def test_parse_error_bad_json(self, capsys, tmp_path):
        spec = tmp_path / "bad.json"
        spec.write_text("{not json")
        code, _, _ = run(capsys, "decompose", "--spec", str(spec))
        assert code == EXIT_PARSE

    def test_cap_exceeded(self, capsys):
        code, _, err = run(
            capsys, "eg", "--kind", "onemax", "--l", "10", "--cap", "16"
        )
        assert code == EXIT_CAP
        assert "exceeds the cap" in err

    def test_assumption_violation(self, capsys, tmp_path):
        spec = tmp_path / "tie.json"
        spec.write_text(
            json.dumps(
                {"kind": "lookup-table", "l": 2, "pairs": {"00": 1, "11": 1}}
            )
        )
        code, _, err = run(capsys, "decompose", "--spec", str(spec))
        assert code == EXIT_ASSUMPTION
        assert "not unique" in err
