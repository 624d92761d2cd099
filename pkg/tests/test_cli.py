from __future__ import annotations

import json
import subprocess
import sys

import pytest

from sweepcover.cli import generate_instance, instance_bytes, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture()
def line5(tmp_path):
    path = tmp_path / "line5.json"
    data = generate_instance("line", 5, 0, sensors=1, speed=1.0, period=2.0)
    path.write_bytes(instance_bytes(data))
    return path


class TestGen:
    def test_deterministic_bytes(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for target in (a, b):
            code, _, _ = run_cli(
                capsys, "gen", "--kind", "euclidean", "--n", "7", "--seed", "3",
                "--output", str(target),
            )
            assert code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_seed_changes_output(self, tmp_path, capsys):
        outs = []
        for seed in ("1", "2"):
            f = tmp_path / f"s{seed}.json"
            run_cli(capsys, "gen", "--kind", "random-metric", "--n", "6",
                    "--seed", seed, "--output", str(f))
            outs.append(f.read_bytes())
        assert outs[0] != outs[1]

    def test_all_kinds_parse(self, tmp_path, capsys):
        from sweepcover.graph import parse_instance

        for kind in ("euclidean", "random-metric", "line", "star"):
            f = tmp_path / f"{kind}.json"
            code, _, _ = run_cli(
                capsys, "gen", "--kind", kind, "--n", "6", "--seed", "0",
                "--sensors", "2", "--output", str(f),
            )
            assert code == 0
            g, inst = parse_instance(json.loads(f.read_text()))
            assert g.n == 6 and inst is not None and inst.sensors == 2

    def test_stdout_mode(self, capsys):
        code, out, _ = run_cli(capsys, "gen", "--kind", "line", "--n", "3")
        assert code == 0
        doc = json.loads(out)
        assert doc["points"] == [[0.0], [1.0], [2.0]]


class TestSolveBsc:
    def test_line5_example(self, line5, tmp_path, capsys):
        report = tmp_path / "report.json"
        code, out, _ = run_cli(
            capsys, "solve-bsc", "--input", str(line5), "--oracle",
            "--output", str(report),
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["report"]["covered"] == 2
        assert doc["report"]["upper_bound"] == 3
        assert doc["report"]["ratio"] == pytest.approx(2 / 3, abs=1e-6)
        assert doc["report"]["violations"] == []
        assert json.loads(report.read_text()) == doc

    def test_fleet_flags_required_without_instance_fleet(self, tmp_path, capsys):
        bare = tmp_path / "bare.json"
        bare.write_bytes(instance_bytes(generate_instance("line", 4, 0)))
        code, _, err = run_cli(capsys, "solve-bsc", "--input", str(bare))
        assert code == 2
        assert "no fleet" in err
        code, out, _ = run_cli(
            capsys, "solve-bsc", "--input", str(bare),
            "--sensors", "4", "--speed", "1", "--period", "2",
        )
        assert code == 0
        assert json.loads(out)["report"]["covered"] == 4


class TestVerify:
    def test_round_trip_and_tamper(self, line5, tmp_path, capsys):
        report = tmp_path / "report.json"
        run_cli(capsys, "solve-bsc", "--input", str(line5), "--output", str(report))
        code, out, _ = run_cli(
            capsys, "verify", "--input", str(line5), "--schedule", str(report)
        )
        assert code == 0
        assert json.loads(out)["violations"] == []

        doc = json.loads(report.read_text())
        doc["report"]["covered"] += 1
        report.write_text(json.dumps(doc))
        code, out, _ = run_cli(
            capsys, "verify", "--input", str(line5), "--schedule", str(report)
        )
        assert code == 1
        assert any("does not match recount" in f for f in json.loads(out)["violations"])

    def test_stretched_interval_caught(self, line5, tmp_path, capsys):
        report = tmp_path / "report.json"
        run_cli(capsys, "solve-bsc", "--input", str(line5), "--output", str(report))
        doc = json.loads(report.read_text())
        doc["schedule"][0]["end"] = doc["schedule"][0]["start"] + 99.0
        report.write_text(json.dumps(doc))
        code, out, _ = run_cli(
            capsys, "verify", "--input", str(line5), "--schedule", str(report)
        )
        assert code == 1
        assert json.loads(out)["violations"]


class TestSolvers:
    def test_solve_mop(self, line5, capsys):
        code, out, _ = run_cli(
            capsys, "solve-mop", "--input", str(line5), "--m", "1",
            "--budget", "1", "--oracle",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["result"]["spanned"] == 2
        assert doc["result"]["upper_bound"] == 2
        assert doc["violations"] == []

    def test_solve_kminwp(self, tmp_path, capsys):
        inst = tmp_path / "line8.json"
        inst.write_bytes(instance_bytes(generate_instance("line", 8, 0)))
        code, out, _ = run_cli(
            capsys, "solve-kminwp", "--input", str(inst), "--m", "1", "--k", "4"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["result"]["mode"] in ("feasible", "bicriteria")
        assert doc["violations"] == []
        assert doc["diagnostics"]["iterations"] >= 1


class TestOracleCommand:
    def test_values(self, line5, tmp_path, capsys):
        code, out, _ = run_cli(capsys, "oracle", "--what", "bsc-ub", "--input", str(line5))
        assert code == 0 and json.loads(out)["result"]["value"] == 3

        line8 = tmp_path / "line8.json"
        line8.write_bytes(instance_bytes(generate_instance("line", 8, 0)))
        code, out, _ = run_cli(
            capsys, "oracle", "--what", "kminwp", "--input", str(line8),
            "--m", "1", "--k", "4",
        )
        assert code == 0 and json.loads(out)["result"]["value"] == pytest.approx(3.0)

        code, out, _ = run_cli(
            capsys, "oracle", "--what", "mop", "--input", str(line5),
            "--m", "1", "--budget", "1",
        )
        assert code == 0 and json.loads(out)["result"]["value"] == 2

    def test_pcp_pcf(self, tmp_path, capsys):
        line4 = tmp_path / "line4.json"
        line4.write_bytes(instance_bytes(generate_instance("line", 4, 0)))
        code, out, _ = run_cli(
            capsys, "oracle", "--what", "pcf", "--input", str(line4),
            "--m", "1", "--penalty", "100",
        )
        assert code == 0 and json.loads(out)["result"]["value"] == pytest.approx(3.0)
        line5b = tmp_path / "line5b.json"
        line5b.write_bytes(instance_bytes(generate_instance("line", 5, 0)))
        code, out, _ = run_cli(
            capsys, "oracle", "--what", "pcp", "--input", str(line5b),
            "--m", "2", "--penalty", "10",
        )
        assert code == 0 and json.loads(out)["result"]["value"] == pytest.approx(3.0)


class TestErrors:
    def test_missing_file(self, capsys):
        code, _, err = run_cli(capsys, "solve-bsc", "--input", "/nonexistent.json")
        assert code == 2 and err.startswith("error:")

    def test_bad_json(self, tmp_path, capsys):
        f = tmp_path / "bad.json"
        f.write_text("{not json")
        code, _, err = run_cli(capsys, "oracle", "--what", "bsc-ub", "--input", str(f))
        assert code == 2 and err.startswith("error:")

    def test_unknown_kind(self, capsys):
        with pytest.raises(SystemExit):
            main(["gen", "--kind", "blob", "--n", "3"])


class TestBench:
    def test_scaling_suite(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        csv_path = tmp_path / "scaling.csv"
        code, out, _ = run_cli(
            capsys, "bench", "--suite", "scaling", "--output", str(csv_path)
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["rows"] == 3
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == "instance,ratio,UB,covered,time"
        assert len(lines) == 4


def test_console_script_help():
    proc = subprocess.run(
        [sys.executable, "-m", "sweepcover.cli", "--help"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "solve-bsc" in proc.stdout
