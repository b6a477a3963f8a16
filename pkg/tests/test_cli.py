"""Command-line interface: verdict mapping, exit codes, report formats."""

from __future__ import annotations

import contextlib
import io
import json

import pytest

from glrmc import fixtures
from glrmc.cli import CSV_HEADER, main, random_pattern


def run_cli(*argv) -> tuple[int, str]:
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = main(list(argv))
    return code, out.getvalue()


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("pats")
    for name in fixtures.NAMES:
        (root / name).write_text(fixtures.fixture_text(name))
    (root / "empty.pat").write_text("# nothing here\n")
    (root / "allquery4.pat").write_text("????\n????\n????\n????\n")
    return root


class TestCheck:
    def test_example2_feasible(self, fixture_dir):
        code, out = run_cli("check", "--k", "1", str(fixture_dir / "example2.pat"),
                            "--mode", "exhaustive")
        assert code == 0
        assert "feasible" in out
        assert "[1, 2]" in out

    def test_example3_k2_infeasible(self, fixture_dir):
        code, out = run_cli("check", "--k", "2", str(fixture_dir / "example3.pat"),
                            "--mode", "exhaustive")
        assert code == 0
        assert "infeasible" in out
        assert "counterexample rows" in out

    def test_unknown_exit_code(self, fixture_dir):
        code, out = run_cli("check", "--k", "2", str(fixture_dir / "M1.pat"),
                            "--mode", "exhaustive")
        assert code == 2
        assert "unknown" in out

    def test_parse_error_exit_code(self, fixture_dir):
        code, _ = run_cli("check", "--k", "1", str(fixture_dir / "empty.pat"))
        assert code == 1

    def test_missing_file(self):
        code, _ = run_cli("check", "--k", "1", "no-such-file.pat")
        assert code == 1

    def test_invalid_k(self, fixture_dir):
        code, _ = run_cli("check", "--k", "9", str(fixture_dir / "example2.pat"))
        assert code == 1

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as err:
            main(["bogus-command"])
        assert err.value.code == 1

    def test_json_roundtrip(self, fixture_dir):
        code, out = run_cli("check", "--k", "1", str(fixture_dir / "example2.pat"),
                            "--mode", "exhaustive", "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert report["verdict"]["status"] == "feasible"
        assert report["witness"]["basis"] == [1, 2]
        assert report["timing_ms"] is None
        assert json.dumps(report, indent=2) == out.rstrip("\n")

    def test_transpose_flag(self, fixture_dir, tmp_path):
        tall = tmp_path / "tall.pat"
        tall.write_text("**\n*?\n?*\n**\n")
        code, out = run_cli("check", "--k", "1", str(tall), "--format", "json",
                            "--transpose", "--mode", "exhaustive")
        assert code == 0
        report = json.loads(out)
        assert report["config"]["transposed"] is True
        assert report["config"]["n"] == 2


class TestBounds:
    def test_m1(self, fixture_dir):
        code, out = run_cli("bounds", str(fixture_dir / "M1.pat"),
                            "--mode", "exhaustive", "--format", "json")
        assert code == 0
        rep = json.loads(out)
        assert rep["bounds"]["lower"] == 2
        assert rep["bounds"]["upper"] == 3

    def test_m3(self, fixture_dir):
        code, out = run_cli("bounds", str(fixture_dir / "M3.pat"),
                            "--mode", "exhaustive", "--format", "json")
        rep = json.loads(out)
        assert (rep["bounds"]["lower"], rep["bounds"]["upper"]) == (3, 3)

    def test_all_query(self, fixture_dir):
        code, out = run_cli("bounds", str(fixture_dir / "allquery4.pat"),
                            "--format", "json")
        rep = json.loads(out)
        assert (rep["bounds"]["lower"], rep["bounds"]["upper"]) == (0, 0)


class TestOracle:
    def test_example1_prime_infeasible(self, fixture_dir):
        code, out = run_cli("oracle", str(fixture_dir / "example1-prime.pat"),
                            "--k", "1")
        assert code == 0
        assert "infeasible" in out
        assert "5/5 trials agree" in out

    def test_m2_rank2_feasible_with_witness(self, fixture_dir):
        code, out = run_cli("oracle", str(fixture_dir / "M2.pat"), "--k", "3",
                            "--format", "json")
        assert code == 0
        rep = json.loads(out)
        assert rep["verdict"]["status"] == "feasible"
        assert rep["witness"]["type"] == "completion"
        assert len(rep["witness"]["matrix"]) == 5

    def test_budget_exceeded(self, tmp_path):
        big = tmp_path / "big.pat"
        big.write_text("\n".join("*" * 20 for _ in range(20)) + "\n")
        code, _ = run_cli("oracle", str(big), "--k", "10")
        assert code == 1

    def test_min_rank_scan(self, fixture_dir):
        code, out = run_cli("oracle", str(fixture_dir / "M1.pat"),
                            "--format", "json")
        assert code == 0
        assert json.loads(out)["verdict"]["min_rank"] == 2


class TestVerifyWitness:
    def test_check_report_verifies(self, fixture_dir, tmp_path):
        _, out = run_cli("check", "--k", "1", str(fixture_dir / "example2.pat"),
                         "--mode", "exhaustive", "--format", "json")
        rep = tmp_path / "rep.json"
        rep.write_text(out)
        code, msg = run_cli("check", "--verify-witness", str(rep))
        assert code == 0
        assert "re-verified" in msg

    def test_tampered_witness_fails(self, fixture_dir, tmp_path):
        _, out = run_cli("check", "--k", "1", str(fixture_dir / "example2.pat"),
                         "--mode", "exhaustive", "--format", "json")
        report = json.loads(out)
        report["witness"]["basis"] = [2, 3]  # conditions fail for this basis
        rep = tmp_path / "tampered.json"
        rep.write_text(json.dumps(report))
        code, msg = run_cli("check", "--verify-witness", str(rep))
        assert code == 1
        assert "FAILED" in msg

    def test_oracle_report_verifies(self, fixture_dir, tmp_path):
        _, out = run_cli("oracle", str(fixture_dir / "M2.pat"), "--k", "3",
                         "--format", "json")
        rep = tmp_path / "oracle.json"
        rep.write_text(out)
        code, msg = run_cli("check", "--verify-witness", str(rep))
        assert code == 0
        assert "completion re-verified" in msg

    def test_bounds_report_verifies(self, fixture_dir, tmp_path):
        _, out = run_cli("bounds", str(fixture_dir / "M1.pat"),
                         "--mode", "exhaustive", "--format", "json")
        rep = tmp_path / "bounds.json"
        rep.write_text(out)
        code, msg = run_cli("check", "--verify-witness", str(rep))
        assert code == 0
        assert "re-verified" in msg

    def test_nothing_to_verify(self, fixture_dir, tmp_path):
        _, out = run_cli("check", "--k", "2", str(fixture_dir / "M1.pat"),
                         "--mode", "exhaustive", "--format", "json")
        rep = tmp_path / "unknown.json"
        rep.write_text(out)
        code, msg = run_cli("check", "--verify-witness", str(rep))
        assert code == 2


class TestExperiment:
    def test_deterministic_rows(self):
        args = ["experiment", "--n", "4", "--m", "4", "--densities", "0.3,0.6",
                "--per-cell", "3", "--seed", "7"]
        code1, out1 = run_cli(*args)
        code2, out2 = run_cli(*args)
        assert code1 == code2 == 0
        assert out1 == out2
        lines = out1.strip().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + 2 * 3

    def test_density_one_full_rank(self):
        _, out = run_cli("experiment", "--n", "3", "--m", "3",
                         "--densities", "1.0", "--per-cell", "2", "--seed", "1")
        for line in out.strip().splitlines()[1:]:
            density, pid, n, m, grank, lower, upper, orank, ms = line.split(",")
            assert grank == lower == upper == orank == "3"

    def test_density_zero_bounds(self):
        _, out = run_cli("experiment", "--n", "3", "--m", "3",
                         "--densities", "0.0", "--per-cell", "2", "--seed", "1")
        for line in out.strip().splitlines()[1:]:
            fields = line.split(",")
            assert fields[5] == "0" and fields[6] == "0"

    def test_zero_fraction_adds_zeros(self):
        pat = random_pattern(6, 6, star_density=0.6, zero_fraction=0.2, seed=3)
        assert len(pat.omega_zero) == round(0.2 * 36)
        assert len(pat.omega_star) == round(0.6 * 36) - round(0.2 * 36)

    def test_rejects_tall_without_transpose(self):
        code, _ = run_cli("experiment", "--n", "5", "--m", "3",
                          "--densities", "0.5", "--per-cell", "1", "--seed", "0")
        assert code == 1
