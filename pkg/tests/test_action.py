import pytest
from hypothesis import given, settings, strategies as st

from strucres.action import (compose_check, compose_check_contra, contravariant, covariant,
                             identity_check, interchange_check)
from strucres.errors import ContextMismatch, TypeMismatch
from strucres.eta import format_eta
from strucres.generate import derivations
from strucres.morph import ContextMorphism, format_context, identity, is_identity
from strucres.suites import run_suite
from strucres.syntax import parse_context_morphism, parse_eta, parse_morphism

V = (r"\z^{c{o,2}}. q [z] [z]", "q : [[o] -o [o] -o o]")


def test_identity_actions():
    v = parse_eta(*V)
    r = covariant(v, identity(v.type))
    assert r.derivation == v and all(is_identity(p) for p in r.residual.parts)
    r = contravariant(v, ContextMorphism.identity(v.context))
    assert r.derivation == v and all(is_identity(p) for p in r.residual.parts)


def test_covariant_abstraction_clause_composes_annotations():
    # projection [o,o] -> [o] precomposed with the duplication on z
    v = parse_eta(*V)
    r = covariant(v, parse_morphism("w{[o,o],1} -o id@o"))
    assert format_eta(r.derivation.term) == r"\z^{<[1,1]; id@o,id@o> : [o,o] -> [o,o]}. q [z] [z]"
    assert str(r.residual) == "{q : id@[[o] -o [o] -o o]}"


def test_covariant_rejects_wrong_domain():
    with pytest.raises(TypeMismatch):
        covariant(parse_eta(*V), parse_morphism("c{o,2} -o id@o"))


def test_argument_bag_duplication():
    inner = parse_eta(r"x [\z^{[o]}. q [z]]", "x : [[[o] -o o] -o o], q : [[o] -o o]")
    theta = parse_context_morphism(
        "x : <[1]; (<[1,1]; id@[o] -o o, id@[o] -o o> : [[o] -o o] -> [[o] -o o,[o] -o o]) -o id@o>"
        " : [[[o] -o o,[o] -o o] -o o] -> [[[o] -o o] -o o], q : [[o] -o o]")
    # the bag <t> becomes <t, t> and the residual duplicates q
    r = contravariant(inner, theta)
    assert format_eta(r.derivation.term) == r"x [\z^{[o]}. q [z], \z^{[o]}. q [z]]"
    assert format_context(r.derivation.context) == "x : [[[o] -o o,[o] -o o] -o o], q : [[o] -o o,[o] -o o]"
    assert str(r.residual.part("q")) == "c{[o] -o o,2}"


def test_contravariant_duplicates_argument():
    d = parse_eta("x [y]", "x : [[o] -o o], y : [o]")
    theta = parse_context_morphism("x : <[1]; c{o,2} -o id@o> : [[o,o] -o o] -> [[o] -o o], y : [o]")
    r = contravariant(d, theta)
    assert format_eta(r.derivation.term) == "x [y, y]"
    assert format_context(r.derivation.context) == "x : [[o,o] -o o], y : [o,o]"
    assert str(r.residual.part("y")) == "c{o,2}"
    assert is_identity(r.residual.part("x"))


def test_contravariant_weakening():
    d = parse_eta("x [y]", "x : [[o] -o o], y : [o], z : []")
    r = contravariant(d, parse_context_morphism("x : [[o] -o o], y : [o], z : []"))
    assert r.derivation == d and all(is_identity(p) for p in r.residual.parts)
    # erasing an o at z: the term is unchanged and the residual erases too
    r = contravariant(d, parse_context_morphism("x : [[o] -o o], y : [o], z : T{[o]}"))
    assert r.derivation.term == d.term and str(r.residual.part("z")) == "T{[o]}"


def test_contravariant_rejects_wrong_target():
    d = parse_eta("x [y]", "x : [[o] -o o], y : [o]")
    with pytest.raises(ContextMismatch):
        contravariant(d, parse_context_morphism("x : [[o] -o o], y : [o], z : T{[o]}"))


def test_compositionality_examples():
    v = parse_eta(*V)
    assert compose_check(v, identity(v.type), identity(v.type))
    s = parse_eta(r"\z^{[o,o,o]}. q [z] [z, z]", "q : [[o] -o [o,o] -o o]")
    g = parse_morphism("(<[1,1,2]; id@o,id@o,id@o> : [o,o] -> [o,o,o]) -o id@o")
    f = parse_morphism("c{o,2} -o id@o")
    assert compose_check(s, g, f)
    two = covariant(covariant(s, g).derivation, f).derivation
    assert format_eta(two.term) == r"\z^{c{o,3}}. q [z] [z, z]"


def test_identity_law_on_generated_terms():
    assert all(identity_check(d) for d in derivations(50, seed=3))


def test_action_suite():
    res = run_suite("actions", 60, 11)
    assert res.ok, res.line()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_compositionality_and_interchange(seed):
    import random
    from strucres.generate import random_derivation, random_type_from
    from strucres.suites import _random_context_morphism
    rng = random.Random(seed)
    d = random_derivation(seed, max_size=20)
    f = random_type_from(rng, d.type, 2)
    g = random_type_from(rng, f.cod, 2)
    assert compose_check(d, f, g)
    theta = _random_context_morphism(rng, d.context, 2)
    if theta is not None:
        assert interchange_check(d, f, theta)
        eta = _random_context_morphism(rng, theta.source, 2)
        if eta is not None:
            assert compose_check_contra(d, theta, eta)
