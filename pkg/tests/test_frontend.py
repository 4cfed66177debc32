import pytest
from hypothesis import given, strategies as st

from strucres import frontend as F
from strucres.approx import approximates, is_qualitative, is_uniform
from strucres.cli import judgment_text
from strucres.confluence import explore
from strucres.errors import ReductionCycle, RuleViolation
from strucres.lam import (BASE, Fn, beta_normalize, beta_step, count_free, format_lambda, parse_lambda,
                          parse_ltype, type_enum_order)
from strucres.rewrite import Kind, exp_normalize, is_planar, normalize
from strucres.suites import run_suite


def embedded(ctx, term, system=F.SIMPLE, typ=None):
    chk = F.check_simple if system == F.SIMPLE else F.check_idempotent
    return F.embed(F.eta_long(chk(ctx, term, typ)))


def test_simple_checker_examples():
    t = F.corpus_entry("MN").typing()
    assert str(t.type) == "o"
    with pytest.raises(RuleViolation):
        Fn((), BASE)


def test_beta():
    assert format_lambda(beta_step(parse_lambda(r"(\x. x) y"))) == "y"
    n, steps = beta_normalize(parse_lambda(r"(\x. w (x (x y)) (x y)) (\z. q z z)"))
    assert count_free(n, "y") == 6 and count_free(n, "q") == 4
    under = beta_step(parse_lambda(r"\u. (\x. x) u"))
    assert format_lambda(under) == r"\u. u"


def test_embed_simple_examples():
    assert judgment_text(embedded("", r"\x:o. \y:o. x")) == r" |- \x^{[o]}. \y^{T{[o]}}. x"
    assert judgment_text(embedded("x : o -> o", "x")) == r"x : [[o] -o o] |- \z1^{[o]}. x [z1]"
    mn = embedded("w : o -> o -> o, y : o, q : o -> o -> o", r"(\x:o -> o. w (x (x y)) (x y)) (\z:o. q z z)")
    assert judgment_text(mn) == (r"w : [[o] -o [o] -o o], y : [o,o], q : [[o] -o [o] -o o] |- "
                                 r"(\x^{c{[o] -o o,3}}. w [x [x [y]]] [x [y]]) [\z^{c{o,2}}. q [z] [z]]")


@pytest.mark.parametrize("term", [r"\x:o. x", r"\x:o -> o. x", r"\x:o. \y:o. x"])
def test_embeddings_agree_on_simple_types(term):
    assert embedded("", term) == embedded("", term, F.IDEMPOTENT)


def test_intersection_embedding_builds_bags():
    e = F.corpus_entry("self-app-var")
    d = F.embed(F.eta_long(e.typing()))
    assert is_uniform(d.term) and not is_qualitative(d)
    # the intersection {o, o -> o} becomes a two-element bag, one member per type
    assert judgment_text(d) == (r"y : [o,[o] -o o] |- (\x^{perm{[o,[o] -o o],[2,1]}}. x [x]) "
                                r"[y, \z1^{[o]}. y [z1]]")


def test_type_enum_order():
    o, oo = parse_ltype("o"), parse_ltype("o -> o")
    assert type_enum_order(o, oo) == -1 and type_enum_order(oo, o) == 1 and type_enum_order(o, o) == 0


@given(st.sampled_from(["o", "o -> o", "(o -> o) -> o", "o -> o -> o", "{o, o -> o} -> o"]),
       st.sampled_from(["o", "o -> o", "(o -> o) -> o", "o -> o -> o", "{o, o -> o} -> o"]))
def test_type_enum_order_is_total(a, b):
    a, b = parse_ltype(a), parse_ltype(b)
    assert type_enum_order(a, b) == -type_enum_order(b, a)
    assert (type_enum_order(a, b) == 0) == (a == b)


def test_simulation_examples():
    te = F.eta_long(F.corpus_entry("I-fun").typing())
    rep = F.simulate_beta(te, F.typed_redexes(te.term)[0])
    assert rep.ok and [s.kind for s in rep.steps] == [Kind.LIN]
    te = F.eta_long(F.corpus_entry("MN").typing())
    rep = F.simulate_beta(te, F.typed_redexes(te.term)[0])
    assert rep.ok and [s.kind for s in rep.steps] == [Kind.EXP, Kind.LIN]
    te = F.eta_long(F.corpus_entry("K").typing())
    rep = F.simulate_beta(te, F.typed_redexes(te.term)[0])
    assert rep.ok and rep.label_equation


def test_corpus_embeddings_are_approximants_and_exp_normalize_to_planar():
    for entry, typing in F.corpus_typings():
        te = F.eta_long(typing)
        d = F.embed(te)
        assert approximates(d.term, F.to_lambda(te.term)), entry.name
        assert is_planar(exp_normalize(d).derivation), entry.name


def test_mn_pipeline_golden():
    from pathlib import Path
    golden = Path(__file__).parent / "golden"
    d = embedded("w : o -> o -> o, y : o, q : o -> o -> o", r"(\x:o -> o. w (x (x y)) (x y)) (\z:o. q z z)")
    assert judgment_text(d) + "\n" == (golden / "mn_embed.rt").read_text()
    out = normalize(d).derivation
    assert len(out.context.lookup("y")) == 6 and len(out.context.lookup("q")) == 4


def test_order_three_embedding_has_no_exponential_normal_form():
    # a bound higher-order head applied to an annotated abstraction: see the cycle tests in test_rewrite
    d = embedded("q : o -> o -> o", r"\y:(o -> o) -> o. y (\z:o. q z z)")
    assert judgment_text(d) == r"q : [[o] -o [o] -o o] |- \y^{[[[o] -o o] -o o]}. y [\z^{c{o,2}}. q [z] [z]]"
    with pytest.raises(ReductionCycle):
        normalize(d)
    g = explore(d)
    assert len(g.nodes) == 2 and g.normal_forms() == [] and not g.is_acyclic()


@pytest.mark.parametrize("name", ["simulation", "fragments", "uniqueness"])
def test_corpus_suites(name):
    res = run_suite(name)
    assert res.ok, res.line()
