import json
import subprocess
import sys
from pathlib import Path

import pytest

from strucres import cli, suites

GOLDEN = Path(__file__).parent / "golden"
UV3 = str(GOLDEN / "uv3.rt")


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "strucres", "check", UV3], capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.rstrip().endswith("type o")


def test_check_prints_type(capsys):
    code, out, _ = run(["check", UV3], capsys)
    assert code == cli.EXIT_OK and out.splitlines()[-1] == "type o"


def test_check_reports_bag_arity(tmp_path, capsys):
    f = tmp_path / "bad.rt"
    f.write_text("x : [[o] -o o], y : [o, o] |- x [y]\n")
    code, _, err = run(["check", str(f)], capsys)
    assert code == cli.EXIT_USER and "OccurrenceCountMismatch" in err


def test_empty_file_is_a_parse_error(tmp_path, capsys):
    f = tmp_path / "empty.rt"
    f.write_text("")
    code, _, err = run(["check", str(f)], capsys)
    assert code == cli.EXIT_USER and "ParseError" in err


def test_missing_file(capsys):
    code, _, err = run(["check", "/nonexistent/file.rt"], capsys)
    assert code == cli.EXIT_USER and "cannot read" in err


def test_reduce_goldens(capsys):
    code, out, _ = run(["reduce", UV3, "--only", "exp"], capsys)
    assert code == 0 and out == (GOLDEN / "uv3_exp.out").read_text()
    code, out, _ = run(["reduce", UV3], capsys)
    assert code == 0 and out == (GOLDEN / "uv3_full.out").read_text()


def test_machine_trace(capsys, tmp_path):
    trace = tmp_path / "trace.jsonl"
    code, out, _ = run(["--format", "machine", "reduce", UV3, "--trace-file", str(trace)], capsys)
    assert code == 0 and out.splitlines()[-1] == "steps 9"
    rows = [json.loads(line) for line in trace.read_text().splitlines()]
    assert len(rows) == 9 and rows[0]["position"] == "."


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("step_budget = 3\n")
    code, _, err = run(["--config", str(cfg), "reduce", UV3], capsys)
    assert code == cli.EXIT_USER and "StepBudgetExceeded" in err
    cfg.write_text("colour = blue\n")
    code, _, err = run(["--config", str(cfg), "check", UV3], capsys)
    assert code == cli.EXIT_USER and "unknown config key" in err


def test_embed_and_simulate(capsys):
    code, out, _ = run(["embed", str(GOLDEN / "mn.lam")], capsys)
    assert code == 0 and out == (GOLDEN / "mn_embed.rt").read_text()
    code, out, _ = run(["reduce", str(GOLDEN / "mn_embed.rt")], capsys)
    assert code == 0 and out == (GOLDEN / "mn_full.out").read_text()
    code, out, _ = run(["simulate", str(GOLDEN / "mn.lam")], capsys)
    assert code == 0 and "endpoint matches exactly: True" in out


def test_act(capsys, tmp_path):
    f = tmp_path / "v.rt"
    f.write_text(r"q : [[o] -o [o] -o o] |- \z^{c{o,2}}. q [z] [z]" + "\n")
    code, out, _ = run(["act", str(f), "--co", "w{[o,o],1} -o id@o"], capsys)
    assert code == 0 and r"\z^{<[1,1]; id@o,id@o> : [o,o] -> [o,o]}" in out
    code, _, err = run(["act", str(f)], capsys)
    assert code == cli.EXIT_USER and "exactly one" in err


def test_approximants(tmp_path, capsys):
    f = tmp_path / "i.lam"
    f.write_text(r"\x. x")
    code, out, _ = run(["approximants", str(f), "--bound", "4"], capsys)
    lines = out.splitlines()
    # the bound is on approximant size, so weakened annotations of size 4 appear too
    assert code == 0 and len(lines) == 3 and r" |- \x^{[o]}. x : [o] -o o" in lines


def test_collapse_exit_codes(tmp_path, capsys):
    f = tmp_path / "i.lam"
    f.write_text(r"\x. x")
    code, out, _ = run(["collapse", str(f), "--bound", "10"], capsys)
    assert code == cli.EXIT_OK and "cycling 0" in out
    # the one witness at bound 15 whose exponential reduction cycles
    code, out, _ = run(["collapse", str(f), "--bound", "15"], capsys)
    assert code == cli.EXIT_COUNTEREXAMPLE and "cycling 1" in out


def test_properties(capsys, monkeypatch):
    code, out, _ = run(["properties", "--suite", "peaks", "--count", "10", "--seed", "1"], capsys)
    assert code == 0 and out.startswith("pass peaks: ")

    def broken(seed=0, count=3):
        res = suites.SuiteResult("broken")
        res.instances = count
        res.fail(1, "x [y, y]", "law does not hold")
        res.fail(0, "x", "law does not hold")
        return res

    monkeypatch.setitem(suites.SUITES, "broken", broken)
    monkeypatch.setattr(suites, "COUNTED", suites.COUNTED | {"broken"})
    code, out, _ = run(["properties", "--suite", "broken"], capsys)
    assert code == cli.EXIT_COUNTEREXAMPLE
    # the smallest failing instance is the one reported
    assert "reproducer (seed 0, instance 0): x" in out


def test_internal_error(capsys, monkeypatch):
    def breach(*a, **k):
        raise AssertionError("invariant broken")
    monkeypatch.setattr(cli, "normalize", breach)
    code, _, err = run(["reduce", UV3], capsys)
    assert code == cli.EXIT_INTERNAL and "invariant broken" in err


def test_bad_arguments():
    with pytest.raises(SystemExit) as e:
        cli.main(["reduce"])
    assert e.value.code == 2
