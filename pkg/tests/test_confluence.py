import random

import pytest

from strucres.confluence import commute, explore, iso, join_peak, peaks, random_walk
from strucres.generate import derivations, reducible_derivations
from strucres.rewrite import Kind, Strategy, normalize, redexes
from strucres.suites import run_suite
from strucres.syntax import load_derivation, parse_eta

REMARK = r"\z^{[o,[o] -o o]}. (\x^{[o]}. \y^{[[o] -o o]}. y [x]) [z] [z]"


def test_iso_basics():
    d = parse_eta(REMARK)
    w = iso(d, d)
    assert w is not None and w.exact
    other = parse_eta(r"\z^{[o]}. z", "")
    assert iso(d, other) is None


def test_iso_is_an_equivalence_on_generated_terms():
    ds = derivations(40, seed=2)
    for a in ds:
        assert iso(a, a) is not None
        for b in ds:
            ab = iso(a, b)
            assert (ab is None) == (iso(b, a) is None)


def test_commutation_on_remark_term():
    s = parse_eta(REMARK)
    lin_then_exp = normalize(normalize(s, only=Kind.LIN).derivation, only=Kind.EXP).derivation
    c = commute(s, lin_then_exp)
    assert c.witness is not None


def test_disjoint_peak_closes():
    d = load_derivation(open(__file__.rsplit("/", 1)[0] + "/golden/uv3.rt").read())
    ps = peaks(d)
    assert ((("1.1",), ("1.3",))) in ps
    j = join_peak(d, ("1.1",), ("1.3",))
    assert j.left.label.then(j.h1) == j.right.label.then(j.h2)


def test_critical_pair_binder_and_body():
    # exponential step at the binder against a step inside the body
    d = parse_eta(r"\y^{c{o,2}}. w [p [\z^{c{o,2}}. q [z] [z]]] [y, y]",
                  "w : [[o] -o [o,o] -o o], p : [[[o] -o o] -o o], q : [[o] -o [o] -o o]")
    rs = [p for p, _ in redexes(d)]
    assert () in rs and len(rs) >= 2
    for a, b in peaks(d):
        j = join_peak(d, a, b)
        assert j.left.label.then(j.h1) == j.right.label.then(j.h2)


def test_unique_normal_form_under_all_strategies():
    for d in reducible_derivations(20, seed=4, max_size=15):
        g = explore(d)
        assert g.is_acyclic()
        normals = g.normal_forms()
        assert len(normals) == 1
        for strategy in Strategy:
            assert normalize(d, strategy, seed=9).derivation == g.nodes[normals[0]]


def test_random_walks_commute():
    rng = random.Random(0)
    for s in reducible_derivations(15, seed=6, max_size=20):
        lin = random_walk(s, Kind.LIN, rng)
        t = lin[-1].result if lin else s
        ex = random_walk(t, Kind.EXP, rng)
        t2 = ex[-1].result if ex else t
        assert commute(s, t2).witness is not None


@pytest.mark.parametrize("name, count", [("peaks", 40), ("commutation", 30), ("confluence", 20),
                                         ("termination", 60)])
def test_suites_small(name, count):
    res = run_suite(name, count, 21)
    assert res.ok, res.line()
