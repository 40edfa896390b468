from __future__ import annotations

import json
import os

from csp2c.cli import main

from conftest import corpus_path


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParseCommand:
    def test_summary(self, capsys):
        code, out, _ = run_cli(capsys, "parse", corpus_path("valid", "conflicts_group"))
        assert code == 0
        assert "6 vars, 1 group, 2 constraints" in out

    def test_machine_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "parse", "--machine", corpus_path("valid", "conflicts_group")
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["variables"] == 6 and payload["assignment_space"] == 64

    def test_invalid_file_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "parse", corpus_path("invalid", "unsupported_element"))
        assert code == 2
        assert "<sum>" in err

    def test_empty_file_exits_2(self, capsys, tmp_path):
        empty = tmp_path / "empty.xml"
        empty.write_text("")
        code, _, err = run_cli(capsys, "parse", str(empty))
        assert code == 2


class TestGenCommand:
    def test_all_extensional_versions(self, capsys, tmp_path):
        code, out, _ = run_cli(
            capsys,
            "gen",
            corpus_path("valid", "conflicts_group"),
            "--family",
            "extensional",
            "--versions",
            "all",
            "--out-dir",
            str(tmp_path),
        )
        assert code == 0
        written = sorted(p for p in os.listdir(tmp_path) if p.endswith(".c"))
        assert len(written) == 12
        assert (tmp_path / "gen_manifest.csv").exists()
        with open(tmp_path / "gen_manifest.csv") as fh:
            assert len(fh.readlines()) == 13  # header + 12 rows

    def test_single_version(self, capsys, tmp_path):
        code, _, _ = run_cli(
            capsys,
            "gen",
            corpus_path("valid", "conflicts_group"),
            "--family",
            "extensional",
            "--versions",
            "5",
            "--out-dir",
            str(tmp_path),
        )
        assert code == 0
        assert sorted(p for p in os.listdir(tmp_path) if p.endswith(".c")) == [
            "conflicts_group__extensional5__klee.c"
        ]

    def test_out_of_range_version_is_usage_error(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys,
            "gen",
            corpus_path("valid", "conflicts_group"),
            "--family",
            "extensional",
            "--versions",
            "13",
            "--out-dir",
            str(tmp_path),
        )
        assert code == 2
        assert "1..12" in err

    def test_repeated_runs_are_byte_identical(self, capsys, tmp_path):
        args = [
            "gen",
            corpus_path("valid", "dist_alldiff"),
            "--family",
            "intensional",
            "--versions",
            "all",
        ]
        run_cli(capsys, *args, "--out-dir", str(tmp_path / "a"))
        run_cli(capsys, *args, "--out-dir", str(tmp_path / "b"))
        for name in os.listdir(tmp_path / "a"):
            if name.endswith(".c"):
                first = (tmp_path / "a" / name).read_bytes()
                second = (tmp_path / "b" / name).read_bytes()
                assert first == second, name

    def test_family_mismatch_is_error(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys,
            "gen",
            corpus_path("valid", "dist_alldiff"),
            "--family",
            "extensional",
            "--out-dir",
            str(tmp_path),
        )
        assert code == 2
        assert "table" in err


class TestSolveCommand:
    def test_sat_exit_0(self, capsys):
        code, out, _ = run_cli(capsys, "solve", corpus_path("valid", "conflicts_group"))
        assert code == 0
        assert "satisfiable" in out
        assert "x2=1" in out

    def test_unsat_exit_1(self, capsys):
        code, out, _ = run_cli(capsys, "solve", corpus_path("valid", "pigeonhole"))
        assert code == 1

    def test_limit_exit_3(self, capsys):
        code, _, _ = run_cli(
            capsys, "solve", corpus_path("valid", "pigeonhole"), "--limit", "1"
        )
        assert code == 3

    def test_machine_witness(self, capsys):
        code, out, _ = run_cli(
            capsys, "solve", "--machine", corpus_path("valid", "supports_pair")
        )
        payload = json.loads(out)
        assert payload["status"] == "satisfiable"
        assert payload["witness"] == {"a": 0, "b": 1}


class TestVerifyCommand:
    def test_pass_exit_0(self, capsys, cc_template):
        code, out, _ = run_cli(
            capsys,
            "verify",
            corpus_path("valid", "supports_pair"),
            "--versions",
            "1,5,8",
            "--cc",
            cc_template,
        )
        assert code == 0
        assert "pass" in out

    def test_machine_output(self, capsys, cc_template):
        code, out, _ = run_cli(
            capsys,
            "verify",
            "--machine",
            corpus_path("valid", "eq_ne"),
            "--versions",
            "1",
            "--cc",
            cc_template,
        )
        payload = json.loads(out)
        assert code == 0
        assert payload["status"] == "pass" and payload["mismatches"] == 0


class TestBenchAndReport:
    def test_end_to_end_with_mock_tools(self, capsys, tmp_path):
        tools = tmp_path / "tools.json"
        tools.write_text(
            json.dumps(
                [
                    {
                        "name": "mock-analyzer",
                        "run": "echo ASSERTION FAIL on {src}",
                        "success_pattern": "ASSERTION FAIL",
                        "timeout_s": 30,
                        "kind": "analysis",
                        "dialect": "klee",
                    },
                    {
                        "name": "mock-baseline",
                        "run": "echo solved {src}",
                        "kind": "baseline",
                        "timeout_s": 30,
                    },
                ]
            )
        )
        instances = tmp_path / "instances.json"
        instances.write_text(
            json.dumps(
                [
                    {
                        "path": corpus_path("valid", "supports_pair"),
                        "family": "extensional",
                        "size": 1,
                        "expected": "sat",
                    },
                    {
                        "path": corpus_path("valid", "xor_ring"),
                        "family": "extensional",
                        "size": 2,
                        "expected": "unsat",
                    },
                ]
            )
        )
        out_dir = tmp_path / "out"
        code, out, _ = run_cli(
            capsys,
            "bench",
            "--tools",
            str(tools),
            "--instances",
            str(instances),
            "--out-dir",
            str(out_dir),
            "--versions",
            "1,2",
        )
        assert code == 0
        assert (out_dir / "raw.csv").exists()
        assert (out_dir / "robustness.csv").exists()
        assert (out_dir / "robustness.svg").exists()
        # 1 analysis tool x 2 instances x 2 versions + 1 baseline x 2 instances
        with open(out_dir / "raw.csv") as fh:
            assert len(fh.readlines()) == 1 + 6
        # generated sources exist for the analysis dialect
        src_files = os.listdir(out_dir / "src")
        assert "supports_pair__extensional1__klee.c" in src_files

        code, out, _ = run_cli(
            capsys,
            "report",
            str(out_dir / "raw.csv"),
            "--instances",
            str(instances),
            "--out-dir",
            str(tmp_path / "report2"),
        )
        assert code == 0
        assert (tmp_path / "report2" / "robustness.csv").exists()


def test_console_script_help():
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "csp2c.cli", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "parse" in proc.stdout and "bench" in proc.stdout
