import random

import pytest
from hypothesis import given, settings, strategies as st

from strucres.collapse import (Judgment, morphism_leq, rule_closure, scott_leq, semantics,
                               validate_scott_leq, verify_collapse)
from strucres.eta import format_eta
from strucres.generate import random_morphism
from strucres.lam import parse_lambda
from strucres.morph import Flavor
from strucres.syntax import parse_type

I = parse_lambda(r"\x. x")


def T(s):
    return parse_type(s)


def test_scott_preorder_examples():
    a, b = T("o"), T("[o] -o o")
    assert scott_leq((a,), (a, a))          # duplication
    assert scott_leq((a, b), (a,))          # projection
    assert not scott_leq((), (a,))          # nothing lies under a nonempty bag from the empty one
    assert scott_leq((a,), ())              # erasure
    # arrows flip in the source
    assert scott_leq(T("[] -o o"), T("[o] -o o"))
    assert not scott_leq(T("[o] -o o"), T("[] -o o"))
    # duplication makes [o] and [o,o] equivalent
    assert scott_leq(T("[o] -o o"), T("[o,o] -o o")) and scott_leq(T("[o,o] -o o"), T("[o] -o o"))


def test_scott_preorder_agrees_with_rule_closure():
    # brute-force closure of duplication, projection and erasure under congruence
    checked, disagreements = validate_scott_leq()
    assert (checked, disagreements) == (23409, [])
    closure = rule_closure()
    assert len(closure) == 153 and sum(len(v) for v in closure.values()) == 10683


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_cartesian_morphisms_go_up_in_the_preorder(seed):
    m = random_morphism(random.Random(seed), 3, Flavor.CARTESIAN)
    assert morphism_leq(m)


def test_identity_semantics():
    s = semantics(I, bound=4)
    assert [str(j) for j in s.judgments] == [" |- [o] -o o"]
    assert len(semantics(I, bound=0)) == 0
    s10 = semantics(I, bound=10)
    assert len(s10) == 15
    assert Judgment.of((), T("[o,[o] -o o] -o o")) in s10


def test_relational_judgments_are_scott_judgments():
    rel = semantics(I, Flavor.LINEAR, 10)
    scott = semantics(I, Flavor.CARTESIAN, 10)
    assert len(rel) == 3 and all(j in scott for j in rel.witnesses)


def test_beta_invariance_and_self_application():
    base = set(semantics(I, bound=10).witnesses)
    assert set(semantics(parse_lambda(r"(\x. x) (\y. y)"), bound=10).witnesses) == base
    assert set(semantics(parse_lambda(r"(\x. x x) (\y. y)"), bound=10).witnesses) <= base


@pytest.mark.parametrize("src", [r"\x. x", r"\x. \y. x", r"(\x. x) (\y. y)", r"(\x. x x) (\y. y)"])
def test_collapse_holds_up_to_bound_ten(src):
    rep = verify_collapse(parse_lambda(src), 10)
    assert rep.ok, rep.format()


def test_collapse_at_bound_fifteen_meets_the_exponential_cycle():
    rep = verify_collapse(I, 15)
    assert [l.verdict for l in rep.lines].count("FAIL") == 0 and not rep.missing_in_scott
    assert len(rep.cycles) == 1
    (c,) = rep.cycles
    assert str(c.judgment) == " |- [[[o] -o o] -o o] -o [[] -o o] -o o"
    assert format_eta(c.witness.term) == r"\_1^{[[[o] -o o] -o o]}. \_2^{[[] -o o]}. _1 [\_3^{T{[o]}}. _2 []]"
