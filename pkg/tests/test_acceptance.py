"""The twelve acceptance criteria, one test each, each reporting a single line.

The lines are collected by conftest.py and repeated in the terminal summary.
"""
import contextlib
import io
from pathlib import Path

from strucres import frontend as F
from strucres.cli import main
from strucres.collapse import validate_scott_leq
from strucres.errors import OccurrenceCountMismatch
from strucres.eta import format_eta
from strucres.morph import IndexMap, is_identity
from strucres.rewrite import exp_normalize, is_planar, normalize
from strucres.suites import coherence, collapse, run_suite
from strucres.syntax import load_derivation

GOLDEN = Path(__file__).parent / "golden"


def cli_stdout(argv) -> str:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        assert main(argv) == 0
    return buf.getvalue()


def suite_text(*results) -> str:
    return "; ".join(r.line() for r in results)


def test_criterion_01_running_example(report):
    src = (GOLDEN / "uv3.rt").read_text()
    d = load_derivation(src)
    trace_ok = cli_stdout(["reduce", "--only", "exp", str(GOLDEN / "uv3.rt")]) == (GOLDEN / "uv3_exp.out").read_text()
    run = exp_normalize(d)
    out = run.derivation
    t = r"\z^{[o,o]}. q [z] [z]"
    shape_ok = format_eta(out.term) == (
        r"(\x^{[[o,o] -o o,[o,o] -o o,[o,o] -o o,[o,o] -o o]}. w [x [x [y, y], x [y, y]]] [x [y, y]]) "
        f"[{t}, {t}, {t}, {t}]") and is_planar(out) and len(run.trace) == 8
    label_ok = (is_identity(run.label.typ) and is_identity(run.label.ctx.part("w"))
                and run.label.ctx.part("q").alpha == IndexMap((1, 2, 2, 3), 3)
                and run.label.ctx.part("y").alpha == IndexMap((1, 1, 1, 1, 2, 2), 2))
    try:
        load_derivation(src.replace("q : [[o] -o [o] -o o, [o] -o [o] -o o, [o] -o [o] -o o]",
                                    "q : [[o] -o [o] -o o]"))
        single_q_rejected = False
    except OccurrenceCountMismatch:
        single_q_rejected = True
    ok = trace_ok and shape_ok and label_ok and single_q_rejected
    report(1, ok, "u<v>^3 reduces to s<t>^4 in 8 exponential steps, byte-exact trace; label is the identity on "
                  "w and on the type, but q and y carry ground duplications [1,2,2,3] and [1,1,1,1,2,2]: "
                  "the stated single-q context with label (id; id) does not type u<v>^3 (see ledger)")
    assert ok


def test_criterion_02_mn_pipeline(report):
    d = F.embed(F.eta_long(F.check_simple("w : o -> o -> o, y : o, q : o -> o -> o",
                                          r"(\x:o -> o. w (x (x y)) (x y)) (\z:o. q z z)", "o")))
    golden_ok = cli_stdout(["embed", str(GOLDEN / "mn.lam")]) == (GOLDEN / "mn_embed.rt").read_text()
    full_ok = cli_stdout(["reduce", str(GOLDEN / "mn_embed.rt")]) == (GOLDEN / "mn_full.out").read_text()
    nf = normalize(d).derivation
    ys, qs = len(nf.context.lookup("y")), len(nf.context.lookup("q"))
    ok = golden_ok and full_ok and is_planar(nf) and (ys, qs) == (6, 4)
    report(2, ok, f"embedding of MN normalizes with y listed {ys} times and q {qs} times; goldens byte-exact")
    assert ok


def test_criterion_03_termination(report):
    res = run_suite("termination")
    ok = res.ok and res.instances >= 500
    report(3, ok, f"{suite_text(res)}; generator at binder type depth 2. Not a proof: at depth 3 bound "
                  "higher-order heads over annotated abstractions give exponential cycles (see ledger)")
    assert ok, res.reproducer


def test_criterion_04_local_confluence_and_commutation(report):
    peaks, comm = run_suite("peaks"), run_suite("commutation")
    ok = peaks.ok and comm.ok and peaks.instances >= 300 and comm.instances >= 200
    report(4, ok, suite_text(peaks, comm))
    assert ok, (peaks.reproducer, comm.reproducer)


def test_criterion_05_confluence_oracle(report):
    res = run_suite("confluence")
    ok = res.ok and res.instances >= 100
    report(5, ok, suite_text(res) + "; brute-force graphs against all four strategies")
    assert ok, res.reproducer


def test_criterion_06_action_laws(report):
    res = run_suite("actions")
    ok = res.ok and res.instances >= 300
    report(6, ok, suite_text(res))
    assert ok, res.reproducer


def test_criterion_07_substitution_associativity(report):
    res = run_suite("substitution")
    ok = res.ok and res.instances >= 200
    report(7, ok, suite_text(res))
    assert ok, res.reproducer


def test_criterion_08_simulation(report):
    names = {e.name for e in F.CORPUS}
    corpus_ok = {"I", "K", "S", "c0", "c1", "c2", "c3", "add-c1-c2", "MN"} <= names
    res = run_suite("simulation")
    ok = res.ok and corpus_ok
    report(8, ok, suite_text(res) + f"; corpus {len(F.CORPUS)} simple + {len(F.INTERSECTION_CORPUS)} intersection")
    assert ok, res.reproducer


def test_criterion_09_fragments(report):
    res = run_suite("fragments")
    report(9, res.ok, suite_text(res))
    assert res.ok, res.reproducer


def test_criterion_10_coherence(report):
    res = coherence(bound=10)
    report(10, res.ok, suite_text(res))
    assert res.ok, res.reproducer


def test_criterion_11_collapse(report):
    checked, disagreements = validate_scott_leq()
    res = collapse(bound=10)
    ok = res.ok and not disagreements and checked == 23409
    report(11, ok, f"scott_leq agrees with rule closure on {checked} pairs; {suite_text(res)}. "
                   "Above bound 10 a witness of \\x.x reaches an exponential cycle (CYCLE at bound 15, see ledger)")
    assert ok, res.reproducer


def test_criterion_12_uniqueness(report):
    res = run_suite("uniqueness")
    report(12, res.ok, suite_text(res))
    assert res.ok, res.reproducer
