import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from strucres.confluence import explore
from strucres.errors import ArityMismatch, NotARedex, OccurrenceCountMismatch, ReductionCycle
from strucres.eta import Head, Lam, Redex, alpha_eq, canonical, format_eta, occ
from strucres.generate import GenConfig, derivations, reducible_derivations
from strucres.morph import IndexMap, ListMorphism, identity, is_identity, is_permutation
from strucres.rewrite import (Kind, Strategy, exp_ground_step, exp_normalize, format_trace,
                              is_planar, lin_ground_step, lin_normalize, normalize, redexes, replay,
                              size_of, step_closure, substitute, substitute_term, trace_label)
from strucres.suites import random_subst_instance
from strucres.syntax import load_derivation, parse_eta

GOLDEN = Path(__file__).parent / "golden"
V = (r"\z^{c{o,2}}. q [z] [z]", "q : [[o] -o [o] -o o]")
CYCLE = (r"\x^{[[[o] -o o] -o o]}. \y^{[[] -o o]}. x [\z^{T{[o]}}. y []]")


# ---------------------------------------------------------------- ground steps

def test_exponential_ground_step_on_duplication():
    st_ = exp_ground_step(parse_eta(*V))
    assert format_eta(st_.result.term) == r"\z^{[o,o]}. q [z] [z]"
    assert str(st_.label) == "({q : id@[[o] -o [o] -o o]}; c{o,2} -o id@o)"


def test_exponential_ground_step_on_weakening():
    st_ = exp_ground_step(parse_eta(r"\x^{T{[o]}}. y", "y : [o]"))
    assert format_eta(st_.result.term) == r"\x^{[]}. y"
    assert str(st_.label.typ) == "T{[o]} -o id@o"
    with pytest.raises(NotARedex):
        exp_ground_step(st_.result)


def test_linear_ground_steps():
    st_ = lin_ground_step(parse_eta(r"(\x^{[o]}. x) [y]", "y : [o]"))
    assert format_eta(st_.result.term) == "y" and st_.label.is_identity()
    st_ = lin_ground_step(parse_eta(r"(\x^{[o,o]}. w [x] [x]) [y, y]", "w : [[o] -o [o] -o o], y : [o,o]"))
    assert format_eta(st_.result.term) == "w [y] [y]"
    blocked = parse_eta(r"(\x^{c{o,2}}. w [x] [x]) [y]", "w : [[o] -o [o] -o o], y : [o]")
    with pytest.raises(NotARedex):
        lin_ground_step(blocked)
    assert redexes(blocked) == [(("fun",), Kind.EXP)]


def test_step_under_binder_composes_into_annotation():
    # the argument of y steps with type label c -o o; the head's new type is
    # absorbed by y's annotation and the outer type is untouched
    d = parse_eta(r"\y^{[[[o] -o o] -o o]}. y [\z^{c{o,2}}. q [z] [z]]", "q : [[o] -o [o] -o o]")
    assert redexes(d) == [(("body", "1.1"), Kind.EXP)]
    st_ = step_closure(d, ("body", "1.1"))
    assert format_eta(st_.result.term) == (
        r"\y^{<[1]; (<[1]; c{o,2} -o id@o> : [[o,o] -o o] -> [[o] -o o]) -o id@o> : "
        r"[[[o] -o o] -o o] -> [[[o,o] -o o] -o o]}. y [\z^{[o,o]}. q [z] [z]]")
    assert st_.label.is_identity() and st_.result.type == d.type


def test_permutation_forced_then_removed():
    d = parse_eta(r"\z^{[o,[o] -o o]}. (\x^{[o]}. \y^{[[o] -o o]}. y [x]) [z] [z]")
    run = normalize(d)
    kinds = [s.kind for s in run.trace]
    assert kinds == [Kind.LIN, Kind.EXP, Kind.LIN]
    assert format_eta(run.trace[0].result.term).startswith(r"\z^{perm{[o,[o] -o o],[2,1]}}")
    assert format_eta(run.derivation.term) == r"\z^{[[o] -o o,o]}. z [z]"


def test_normal_input_is_fixed():
    d = parse_eta("w [y] [y]", "w : [[o] -o [o] -o o], y : [o,o]")
    run = normalize(d)
    assert run.derivation == d and run.trace == [] and run.label.is_identity()


def test_exp_normalize_v():
    run = exp_normalize(parse_eta(*V))
    assert format_eta(run.derivation.term) == r"\z^{[o,o]}. q [z] [z]"
    assert is_planar(run.derivation)


# ---------------------------------------------------------------- running example

def test_running_example_golden():
    from strucres.cli import main
    import contextlib
    import io
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        assert main(["reduce", "--only", "exp", str(GOLDEN / "uv3.rt")]) == 0
    assert buf.getvalue() == (GOLDEN / "uv3_exp.out").read_text()
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        assert main(["reduce", str(GOLDEN / "uv3.rt")]) == 0
    assert buf.getvalue() == (GOLDEN / "uv3_full.out").read_text()


def test_running_example_structure():
    d = load_derivation((GOLDEN / "uv3.rt").read_text())
    assert redexes(d) == [((), Kind.LIN), (("1.1",), Kind.EXP), (("1.2",), Kind.EXP), (("1.3",), Kind.EXP)]
    run = exp_normalize(d)
    assert len(run.trace) == 8 and replay(d, run.trace)
    assert trace_label(d, run.trace) == run.label
    out = run.derivation
    # s<t>^4: identity annotations, four copies of t
    assert is_planar(out) and len(out.term.args[0]) == 4
    assert is_identity(run.label.typ) and is_identity(run.label.ctx.part("w"))
    assert run.label.ctx.part("q").alpha == IndexMap((1, 2, 2, 3), 3)
    assert run.label.ctx.part("y").alpha == IndexMap((1, 1, 1, 1, 2, 2), 2)
    # a context typing q only once does not type u<v>^3
    with pytest.raises(OccurrenceCountMismatch):
        load_derivation((GOLDEN / "uv3.rt").read_text().replace(
            "q : [[o] -o [o] -o o, [o] -o [o] -o o, [o] -o [o] -o o]", "q : [[o] -o [o] -o o]"))


# ---------------------------------------------------------------- substitution

def test_substitution_examples():
    t, sigma = substitute_term(Head("x", parse_eta("y", "y : [o]").type), "x",
                               (parse_eta("y", "y : [o]").term,))
    assert format_eta(t) == "y" and all(is_identity(m) for m in sigma.values())
    d = parse_eta("w [y]", "w : [[o] -o o], y : [o], x : []")
    r = substitute(d, "x", ())
    assert r.derivation.term == d.term and all(is_identity(p) for p in r.sigma.parts)
    with pytest.raises(ArityMismatch):
        substitute(d, "x", (Head("y", d.context.lookup("y")[0]),))


def test_nested_substitution_permutes_context():
    d = parse_eta(r"(\y^{[o]}. \x^{[[o] -o o]}. x [y]) [z] [\e^{[o]}. z [e]]", "z : [o, [o] -o o]")
    run = normalize(d)
    assert format_eta(run.derivation.term) == "z [z]"
    assert str(run.derivation.context) == "z : [[o] -o o,o]"
    assert is_permutation(run.label.ctx.part("z")) and not is_identity(run.label.ctx.part("z"))


def _tag(t, counters, bound=frozenset()):
    """Rename every free occurrence n to n#k, numbering per name left to right."""
    if isinstance(t, Head):
        name = t.name
        if name not in bound:
            counters[name] = counters.get(name, 0) + 1
            name = f"{name}#{counters[name]}"
        return Head(name, t.type, tuple(tuple(_tag(s, counters, bound) for s in b) for b in t.args))
    if isinstance(t, Lam):
        return Lam(t.binders, _tag(t.body, counters, bound | set(t.names)))
    return Redex(_tag(t.fun, counters, bound),
                 tuple(tuple(_tag(s, counters, bound) for s in b) for b in t.args))


def _plug(t, x, bag, bound=frozenset()):
    """Replace tagged x#j by the j-th bag element; tagged names never clash with binders."""
    args = lambda a: tuple(tuple(_plug(s, x, bag, bound) for s in b) for b in a)
    if isinstance(t, Head):
        if t.name.startswith(x + "#"):
            new = bag[int(t.name.split("#")[1]) - 1]
            return new if not t.args else Redex(new, args(t.args))
        return Head(t.name, t.type, args(t.args))
    if isinstance(t, Lam):
        return Lam(t.binders, _plug(t.body, x, bag))
    return Redex(_plug(t.fun, x, bag), args(t.args))


def _untag(t):
    if isinstance(t, Head):
        return Head(t.name.split("#")[0], t.type, tuple(tuple(_untag(s) for s in b) for b in t.args))
    if isinstance(t, Lam):
        return Lam(t.binders, _untag(t.body))
    return Redex(_untag(t.fun), tuple(tuple(_untag(s) for s in b) for b in t.args))


def oracle_substitution(s, x, bag):
    """Result term and sigma computed by following tagged occurrences."""
    counters = {}
    tagged_s = _tag(s, counters)
    src = {n: list(v) for n, v in occ(s).items() if n != x}
    tagged_bag = tuple(_tag(t, counters) for t in bag)
    for t in bag:
        for n, v in occ(t).items():
            src.setdefault(n, []).extend(v)
    out = _plug(tagged_s, x, tagged_bag)
    sigma = {}
    order = {}
    for tag_name in _occ_order(out):
        n, k = tag_name.split("#")
        order.setdefault(n, []).append(int(k))
    for n, table in order.items():
        source = tuple(src[n])
        m = ListMorphism(source, IndexMap(tuple(table), len(source)), tuple(identity(source[i - 1]) for i in table))
        if not is_identity(m):
            sigma[n] = m
    return _untag(out), sigma


def _occ_order(t, bound=frozenset()):
    if isinstance(t, Head):
        out = [t.name] if t.name not in bound else []
        for b in t.args:
            for s in b:
                out += _occ_order(s, bound)
        return out
    if isinstance(t, Lam):
        return _occ_order(t.body, bound | set(t.names))
    out = _occ_order(t.fun, bound)
    for b in t.args:
        for s in b:
            out += _occ_order(s, bound)
    return out


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_substitution_matches_occurrence_oracle(seed):
    inst = random_subst_instance(random.Random(seed))
    if inst is None:
        return
    for x, bag in ((inst.x, inst.bag_x), (inst.y, inst.bag_y[:len(occ(inst.s).get(inst.y, ()))])):
        t, sigma = substitute_term(inst.s, x, bag)
        t2, sigma2 = oracle_substitution(inst.s, x, bag)
        assert alpha_eq(t, t2)
        assert {n: m for n, m in sigma.items() if not is_identity(m)} == sigma2


# ---------------------------------------------------------------- traces, sizes, termination

def test_linear_steps_shrink_and_traces_replay():
    for d in reducible_derivations(40, seed=5, max_size=25):
        for strategy in Strategy:
            run = normalize(d, strategy, seed=1)
            assert replay(d, run.trace)
            assert trace_label(d, run.trace) == run.label
            for s in run.trace:
                if s.kind is Kind.LIN:
                    assert size_of(s.result) < size_of(s.source)
                    assert is_identity(s.label.typ) and all(is_permutation(p) for p in s.label.ctx.parts)
                assert s.label.ctx.source == s.source.context and s.label.ctx.target == s.result.context
                assert s.label.typ.dom == s.result.type and s.label.typ.cod == s.source.type
            assert not redexes(run.derivation)


def test_planar_iff_exp_normal():
    for d in derivations(60, seed=8):
        ann = []

        def walk(t):
            if isinstance(t, Lam):
                ann.extend(t.annotations)
                walk(t.body)
            else:
                if isinstance(t, Redex):
                    walk(t.fun)
                for b in t.args:
                    for s in b:
                        walk(s)
        walk(d.term)
        assert is_planar(d) == all(is_identity(f) for f in ann)


def test_lin_normalize_of_planar_redex():
    d = parse_eta(r"(\x^{[o,o]}. w [x] [x]) [y, y]", "w : [[o] -o [o] -o o], y : [o,o]")
    assert format_eta(lin_normalize(d).derivation.term) == "w [y] [y]"
    assert exp_normalize(d).trace == []


def test_machine_trace_is_json_lines():
    import json
    run = exp_normalize(parse_eta(*V))
    rec = json.loads(format_trace(run.trace, machine=True).strip())
    assert rec["kind"] == "exp" and rec["position"] == "." and rec["index"] == 1


# ---------------------------------------------------------------- the exponential cycle

def test_exponential_reduction_can_cycle():
    d = parse_eta(CYCLE)
    assert [k for _, k in redexes(d)] == [Kind.EXP]
    with pytest.raises(ReductionCycle) as info:
        exp_normalize(d)
    err = info.value
    assert err.start == 0 and len(err.trace) == 2
    assert canonical(err.trace[-1].result.term) == canonical(d.term)
    g = explore(d, only=Kind.EXP)
    assert len(g.nodes) == 2 and not g.normal_forms()


def test_generator_at_type_depth_three_reaches_cycles():
    cyclic = 0
    for d in reducible_derivations(200, seed=7, cfg=GenConfig(type_depth=3), max_size=25):
        try:
            normalize(d)
        except ReductionCycle:
            cyclic += 1
    assert cyclic > 0
