import csv
import io
import json

import pytest

from kcmreach.cli import parse_box, run_cli
from kcmreach.constructions import cdg_threshold, east1d, fa1f, rooted_corner_2d
from kcmreach.family import validate_family
from kcmreach.harness import (
    EXPECTED_FAILURE,
    PASS,
    verify_east_threshold,
    verify_fa1f_mobility,
    verify_lemma_zero_outside,
    verify_theorem_box,
    window_geometry,
)


@pytest.fixture
def east_file(tmp_path):
    p = tmp_path / "east.json"
    p.write_text(json.dumps({"d": 1, "rules": [[[-1]]]}))
    return str(p)


@pytest.fixture
def fa1f_file(tmp_path):
    p = tmp_path / "fa1f.json"
    p.write_text(json.dumps({"d": 1, "rules": [[[-1]], [[1]]]}))
    return str(p)


class TestHarness:
    def test_theorem_east(self):
        rep = verify_theorem_box(east1d(), [0, 1, 2])
        assert rep.verdict == PASS
        assert rep.cases[0].detail["v_n_size"] == 1
        assert rep.cases[2].detail["sites"] == 8

    def test_theorem_corner(self):
        rep = verify_theorem_box(rooted_corner_2d(), 1)
        assert rep.verdict == PASS and rep.cases[0].detail["sites"] == 9

    def test_theorem_mirrored_east(self):
        # +1 stable instead of -1: the window must flip to [-b_n, a_n]
        rep = verify_theorem_box(validate_family(1, [[1]]), [1, 2, 3])
        assert rep.verdict == PASS

    def test_theorem_unrooted_is_expected_failure(self):
        rep = verify_theorem_box(fa1f(1), [1, 2])
        assert rep.verdict == EXPECTED_FAILURE and not rep.passed

    def test_lemma(self):
        assert verify_lemma_zero_outside(east1d(), [1, 2, 3]).verdict == PASS

    def test_threshold(self):
        rep = verify_east_threshold(2)
        got = {(c.params["n"], c.params["N"]): c.detail["reachable"] for c in rep.cases}
        assert got == {(1, 0): True, (1, 1): False, (2, 0): True, (2, 1): True, (2, 2): True, (2, 3): False}

    def test_fa1f(self):
        rep = verify_fa1f_mobility([0, 5, 1000])
        assert rep.verdict == PASS
        assert rep.cases[2].detail["certificate_ok"] and "bfs_reachable" not in rep.cases[2].detail

    def test_report_reproducible(self):
        a = verify_theorem_box(east1d(), [1, 2, 3]).to_json(include_timing=False)
        b = verify_theorem_box(east1d(), [1, 2, 3], workers=4).to_json(include_timing=False)
        assert a == b

    def test_window_geometry_for_corner(self):
        _, basis, r = window_geometry(rooted_corner_2d())
        assert r == 1 and basis.v == ((1, 0), (0, 1))


class TestCli:
    def test_classify(self, east_file, capsys):
        assert run_cli(["classify", "-f", east_file]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "NotSupercriticalUnrooted"
        assert "stable_directions: [-1]" in out and "r: 1" in out

    def test_classify_json(self, fa1f_file, capsys):
        assert run_cli(["classify", "-f", fa1f_file, "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["classification"] == "SupercriticalUnrooted" and doc["stable_directions"] == []

    def test_reach_zero_budget(self, fa1f_file, capsys):
        assert run_cli(["reach", "-f", fa1f_file, "--box", "-3..3", "--budget", "0"]) == 0
        assert json.loads(capsys.readouterr().out)["reachable"] is False

    def test_reach_writes_certificate(self, east_file, tmp_path, capsys):
        out = tmp_path / "cert.json"
        code = run_cli(["reach", "-f", east_file, "--box", "-2..2", "--budget", "2", "--certificate", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["boundary"] == "zero" and doc["n"] == 2 and doc["flips"][0] == [-2]

    def test_reach_truncated(self, capsys):
        code = run_cli(["reach", "--family", "fa1f2d", "--box", "-5..5", "--budget", "3", "--max-states", "50"])
        assert code == 3

    def test_env_cap(self, monkeypatch, capsys):
        monkeypatch.setenv("KCMREACH_MAX_STATES", "20")
        assert run_cli(["reach", "--family", "fa1f2d", "--box", "-5..5", "--budget", "3"]) == 3

    def test_verify_threshold(self, capsys):
        assert run_cli(["verify", "east-threshold", "--n-max", "3"]) == 0

    def test_verify_theorem_unrooted(self, capsys):
        assert run_cli(["verify", "theorem", "--family", "fa1f", "--n", "1..2"]) == 1
        assert "expected-failure" in capsys.readouterr().err

    def test_verify_other_tasks(self, capsys, tmp_path):
        assert run_cli(["verify", "lemma", "--family", "east", "--n", "1..3"]) == 0
        assert run_cli(["verify", "fa1f", "--N", "0,3,200"]) == 0
        assert run_cli(["verify", "basis", "--trials", "10"]) == 0
        out = tmp_path / "r.json"
        assert run_cli(["verify", "classification", "--out", str(out), "--no-timing"]) == 0
        assert json.loads(out.read_text())["passed"] is True

    def test_bootstrap(self, capsys):
        assert run_cli(["bootstrap", "--family", "east", "--box", "0..5", "--seed", "0"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["size"] == 6 and doc["steps"] == 5 and doc["origin_infection_step"] == 0

    def test_sweep(self, capsys):
        assert run_cli(["sweep", "--family", "east", "--n", "1..3"]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert list(rows[0]) == ["family", "n", "N", "reachable", "states", "millis"]
        for row in rows:
            n, N = int(row["n"]), int(row["N"])
            assert (row["reachable"] == "True") == (N <= cdg_threshold(n))

    @pytest.mark.parametrize(
        "argv",
        [
            ["reach", "--family", "east", "--box", "1..0", "--budget", "1"],
            ["reach", "--family", "east", "--box", "oops", "--budget", "1"],
            ["classify", "--family", "nope"],
            ["classify"],
            ["bogus"],
        ],
    )
    def test_usage_errors(self, argv, capsys):
        assert run_cli(argv) == 2

    def test_bad_family_file(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"d": 1, "rules": [[[0]]]}))
        assert run_cli(["classify", "-f", str(p)]) == 2
        assert "rule 0" in capsys.readouterr().err

    def test_help(self, capsys):
        assert run_cli(["--help"]) == 0
        assert "KCMREACH_MAX_STATES" in capsys.readouterr().out


def test_parse_box():
    assert parse_box("-3..3", 2).lo == (-3, -3)
    assert parse_box("0,1..2,3", 2).hi == (2, 3)
