import pytest
from hypothesis import given, settings, strategies as st

from strucres.errors import (AnnotationMismatch, OccurrenceCountMismatch, ParseError, TypeClash,
                             UnboundVariable)
from strucres.eta import EtaDerivation, eta_type, format_eta, from_eta_long, from_eta_type, to_eta_long
from strucres.generate import derivations
from strucres.morph import O, Arrow, Context, direct_sum, format_type, identity, make_contraction
from strucres.syntax import load_derivation, parse_context, parse_term, parse_type
from strucres.terms import Abs, App, Var, check, infer_closed, occurrences, size

UV3 = open(__file__.rsplit("/", 1)[0] + "/golden/uv3.rt").read()


def test_variable_axiom():
    d = check(parse_context("x : [[o] -o o]"), Var("x"))
    assert d.rule == "var" and d.type == parse_type("[o] -o o") and size(d) == 1


def test_contraction_under_binder():
    d = check(parse_context("q : [[o] -o [o] -o o]"), parse_term(r"\z^{c{o,2}}. q [z] [z]"))
    assert format_type(d.type) == "[o] -o o"


def test_self_application_with_product_annotation():
    a = Arrow((O, O), O)
    alpha = direct_sum(identity((a,)), make_contraction(O, 2))
    t = Abs("x", alpha, App(Var("x"), (Var("x"), Var("x"))))
    assert infer_closed(t).type == Arrow((a, O), O)


def test_infer_closed_examples():
    assert format_type(infer_closed(parse_term(r"\x^{[o]}. x")).type) == "[o] -o o"
    assert load_derivation(UV3).type == O
    # the terminal annotation erases one o: the abstraction still takes [o]
    t = infer_closed(parse_term(r"\x^{T{[o]}}. \y^{[o]}. y"))
    assert format_type(t.type) == "[o] -o [o] -o o"


def test_sizes():
    assert size(check(parse_context("x : [o]"), Var("x"))) == 1
    assert size(infer_closed(parse_term(r"\x^{[o]}. x"))) == 2
    assert size(check(parse_context("x : [[o,o] -o o], y : [o], z : [o]"), parse_term("x [y, z]"))) == 5


def test_occurrences():
    assert occurrences(Var("x"), "x") == 1
    assert occurrences(parse_term(r"\x^{[o]}. x"), "x") == 0
    assert occurrences(parse_term("w [x [x [y]]] [x [y]]"), "x") == 3


@pytest.mark.parametrize("ctx, term, err", [
    ("x : [[o] -o o], y : [o, o]", "x [y]", OccurrenceCountMismatch),
    ("x : [[o] -o o], y : [[o] -o o]", "x [y]", TypeClash),
    ("q : [[o] -o [o] -o o]", r"\z^{c{o,3}}. q [z] [z]", AnnotationMismatch),
    ("", "x", UnboundVariable),
])
def test_typing_errors(ctx, term, err):
    with pytest.raises(err):
        check(parse_context(ctx) if ctx else Context(()), parse_term(term))


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_term("")
    with pytest.raises(ParseError):
        parse_term(r"\x^{c{o,2}. x")


def test_eta_long_forms():
    x = to_eta_long(check(parse_context("x : [o]"), Var("x")))
    assert format_eta(x.term) == "x"
    assert x.term.args == ()
    assert eta_type(parse_type("[o] -o [[o] -o o] -o o")) == ((O,), (Arrow((O,), O),))
    assert from_eta_type(((O,), (O,))) == parse_type("[o] -o [o] -o o")
    d = check(parse_context("q : [[o] -o [o] -o o]"), parse_term(r"\z^{c{o,2}}. q [z] [z]"))
    e = to_eta_long(d)
    assert len(e.term.body.args) == 2          # one sequence of two bags
    assert from_eta_long(e) == d


def test_uv3_round_trip():
    e = load_derivation(UV3)
    assert to_eta_long(from_eta_long(e)) == e


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_derivations_are_unique_relevant_and_round_trip(seed):
    for e in derivations(4, seed):
        d = from_eta_long(e)
        again = check(d.context, d.term)
        assert again == d
        for x, xs in d.context.entries:
            assert len(xs) == occurrences(d.term, x)
        assert to_eta_long(d) == e
        assert EtaDerivation(e.context, e.term) == e
        for sub in d.subderivations():
            if sub.rule != "bag":
                assert check(sub.context, sub.term) == sub
