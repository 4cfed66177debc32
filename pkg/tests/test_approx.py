import itertools

from strucres.approx import (approximates, coherent, coherent_types, common_approximated,
                             enumerate_approximants, is_qualitative, is_strongly_uniform, is_uniform)
from strucres.generate import random_derivation
from strucres.lam import parse_lambda
from strucres.morph import Flavor
from strucres.rewrite import Kind, redexes, step_closure
from strucres.syntax import parse_eta, parse_type

V = (r"\z^{c{o,2}}. q [z] [z]", "q : [[o] -o [o] -o o]")


def test_approximation_examples():
    x = parse_eta("x", "x : [o]")
    assert approximates(x.term, parse_lambda("x"))
    assert approximates(parse_eta(*V).term, parse_lambda(r"\z. q z z"))
    xy = parse_eta("x [y]", "x : [[o] -o o], y : [o]")
    assert not approximates(xy.term, parse_lambda(r"\z. z"))
    assert approximates(xy.term, parse_lambda("x y"))


def test_coherence_examples():
    x = parse_eta("x", "x : [o]")
    assert coherent(x.term, x.term)
    assert coherent_types(parse_type("[o] -o o"), parse_type("[o,o] -o o"))
    assert not coherent_types(parse_type("o"), parse_type("[o] -o o"))
    v = parse_eta(*V)
    st = step_closure(v, ())
    assert coherent(v.term, st.result.term)


def test_fragments():
    mixed = parse_eta(r"w [x, \y^{[o]}. y]", "w : [[o, [o] -o o] -o o], x : [o]")
    assert not is_uniform(mixed.term)
    twice = parse_eta("w [x, x]", "w : [[o, o] -o o], x : [o, o]")
    assert is_strongly_uniform(twice.term) and not is_qualitative(twice)
    once = parse_eta("w [x]", "w : [[o] -o o], x : [o]")
    assert is_qualitative(once) and is_strongly_uniform(once.term) and is_uniform(once.term)


def test_enumerated_approximants():
    ident = parse_lambda(r"\x. x")
    found = [str(d) for d in enumerate_approximants(ident, 4, Flavor.CARTESIAN)]
    assert r" |- \x^{[o]}. x : [o] -o o" in found
    assert list(enumerate_approximants(ident, 0, Flavor.CARTESIAN)) == []
    lin = [str(d) for d in enumerate_approximants(ident, 4, Flavor.LINEAR)]
    assert lin == [r" |- \x^{[o]}. x : [o] -o o"]


def test_coherence_matches_common_approximation_on_pairs():
    ms = [parse_lambda(r"\x. x"), parse_lambda(r"\x. \y. x"), parse_lambda(r"\f. \x. f (f x)")]
    pool = [(d.term, i) for i, m in enumerate(ms) for d in enumerate_approximants(m, 7, Flavor.CARTESIAN)]
    assert len(pool) > 10
    for (s, i), (t, j) in itertools.product(pool, repeat=2):
        assert coherent(s, t) == (common_approximated(s, t) is not None)
        if i == j:
            assert coherent(s, t)


def test_exponential_steps_from_uniform_terms_stay_coherent():
    checked = 0
    for seed in range(400):
        d = random_derivation(seed, max_size=20)
        if not is_uniform(d.term):
            continue
        for pos, kind in redexes(d):
            if kind is Kind.EXP:
                st = step_closure(d, pos)
                assert coherent(d.term, st.result.term), seed
                checked += 1
    assert checked >= 10


def test_coherence_suite_small_bound():
    from strucres.suites import coherence
    res = coherence(bound=7)
    assert res.ok, res.line()
