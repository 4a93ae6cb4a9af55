"""Command-line interface: subcommands, exit codes, determinism."""

import io
import json

import pytest

from symbreak.cli import main
from symbreak.cnf import parse_dimacs
from symbreak.testkit import brute_force_sat, dpll_count, gen_php


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGen:
    def test_gen_php(self, capsys):
        code, out, _ = run_cli(["gen", "php", "5"], capsys)
        assert code == 0
        f = parse_dimacs(out)
        assert f.num_vars == 20 and len(f.clauses) == 45

    def test_gen_ramsey_to_file(self, tmp_path, capsys):
        target = tmp_path / "r.cnf"
        code, _, _ = run_cli(["gen", "ramsey", "3", "3", "6",
                              "-o", str(target)], capsys)
        assert code == 0
        assert parse_dimacs(target.read_text()).num_vars == 15

    def test_gen_wrong_arity(self, capsys):
        code, _, err = run_cli(["gen", "ramsey", "3"], capsys)
        assert code == 1 and "error" in err

    def test_gen_bad_parameters(self, capsys):
        code, _, err = run_cli(["gen", "php", "1"], capsys)
        assert code == 1 and "error" in err


class TestBreak:
    def test_break_php(self, tmp_path, capsys):
        src = tmp_path / "php5.cnf"
        dst = tmp_path / "out.cnf"
        run_cli(["gen", "php", "5", "-o", str(src)], capsys)
        code, _, _ = run_cli(["break", str(src), "-o", str(dst)], capsys)
        assert code == 0
        out = parse_dimacs(dst.read_text())
        assert out.num_vars > 20 and len(out.clauses) > 45
        assert not brute_force_sat(gen_php(5))
        assert dpll_count(out)[0] == "unsat"

    def test_stdout_has_stats_header(self, tmp_path, capsys):
        src = tmp_path / "php4.cnf"
        run_cli(["gen", "php", "4", "-o", str(src)], capsys)
        code, out, _ = run_cli(["break", str(src)], capsys)
        assert code == 0
        assert out.startswith("c symbreak:")
        assert "structure row-column" in out

    def test_all_disabled_extends_with_header_only(self, tmp_path, capsys):
        src = tmp_path / "php4.cnf"
        run_cli(["gen", "php", "4", "-o", str(src)], capsys)
        code, out, _ = run_cli(
            ["break", str(src), "--no-johnson", "--no-row-column",
             "--no-row", "--no-binary", "--no-remainder"], capsys)
        assert code == 0
        body = [l for l in out.splitlines() if not l.startswith("c")]
        assert body == src.read_text().strip().splitlines()

    def test_stats_json(self, tmp_path, capsys):
        src = tmp_path / "php4.cnf"
        stats = tmp_path / "stats.json"
        run_cli(["gen", "php", "4", "-o", str(src)], capsys)
        code, _, _ = run_cli(["break", str(src), "-o", "-",
                              "--stats", str(stats)], capsys)
        assert code == 0
        data = json.loads(stats.read_text())
        assert data["structures"][0]["kind"] == "row-column"
        assert "phase_times_ms" in data

    def test_byte_determinism(self, tmp_path, capsys):
        src = tmp_path / "php5.cnf"
        run_cli(["gen", "php", "5", "-o", str(src)], capsys)
        _, out1, _ = run_cli(["break", str(src), "--seed", "7"], capsys)
        _, out2, _ = run_cli(["break", str(src), "--seed", "7"], capsys)
        assert out1 == out2

    def test_stdin_stdout(self, monkeypatch, capsys):
        text = "p cnf 2 1\n1 2 0\n"
        monkeypatch.setattr("sys.stdin", io.StringIO(text))
        code, out, _ = run_cli(["break", "-"], capsys)
        assert code == 0
        assert parse_dimacs(out).num_vars >= 2

    def test_output_reparses(self, tmp_path, capsys):
        src = tmp_path / "r.cnf"
        run_cli(["gen", "ramsey", "3", "3", "8", "-o", str(src)], capsys)
        _, out, _ = run_cli(["break", str(src)], capsys)
        parsed = parse_dimacs(out)
        header = next(l for l in out.splitlines() if l.startswith("p cnf"))
        assert int(header.split()[3]) == len(parsed.clauses)


class TestExitCodes:
    def test_unknown_flag(self, capsys):
        assert run_cli(["break", "x.cnf", "--bogus"], capsys)[0] == 1

    def test_missing_subcommand(self, capsys):
        assert run_cli([], capsys)[0] == 1

    def test_unreadable_input(self, capsys, tmp_path):
        code, _, err = run_cli(["break", str(tmp_path / "nope.cnf")], capsys)
        assert code == 1 and "error" in err

    def test_malformed_dimacs(self, tmp_path, capsys):
        bad = tmp_path / "bad.cnf"
        bad.write_text("p cnf 2 1\n1 x 0\n")
        code, _, err = run_cli(["break", str(bad)], capsys)
        assert code == 2 and "parse error" in err

    def test_negative_parameter(self, tmp_path, capsys):
        src = tmp_path / "a.cnf"
        src.write_text("p cnf 1 1\n1 0\n")
        code, _, _ = run_cli(["break", str(src), "--max-len", "-1"], capsys)
        assert code == 1

    def test_help_exits_zero(self, capsys):
        assert run_cli(["--help"], capsys)[0] == 0
