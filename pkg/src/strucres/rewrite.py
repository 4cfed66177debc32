"""Linear substitution, the exponential and linear rewrite steps, and normalization.

A step ``s ->(theta; f) s'`` records ``theta : context(s) -> context(s')`` and
``f : type(s') -> type(s)``.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .action import (_EMPTY, _co, _co_seq, _rcompose, _rid, _rsum, contravariant_term)
from .errors import (ArityMismatch, InvalidPosition, NotARedex,
                     ReductionCycle, StepBudgetExceeded, TypeMismatch)
from .eta import (EtaDerivation, Head, Lam, Redex, _Fresh, all_names, canonical, children, format_eta,
                  format_path, occ, occ_seq, rename_free, type_of, eta_size)
from .morph import (AtomId, Context, ContextMorphism, IndexMap, ListMorphism,
                    arrow_of, compose, format_morphism, format_type,
                    ground, identity, is_identity, is_permutation, spine_of)

DEFAULT_BUDGET = 10 ** 6


class Kind(Enum):
    EXP = "exp"
    LIN = "lin"


class Strategy(Enum):
    LEFTMOST_OUTERMOST = "leftmost-outermost"
    EXPONENTIAL_FIRST = "exponential-first"
    LINEAR_FIRST = "linear-first"
    RANDOM = "random"


# ---------------------------------------------------------------- labels

@dataclass(frozen=True)
class ReductionLabel:
    ctx: ContextMorphism
    typ: object

    @staticmethod
    def unit(d: EtaDerivation) -> "ReductionLabel":
        return ReductionLabel(ContextMorphism.identity(d.context), identity(d.type))

    def then(self, later: "ReductionLabel") -> "ReductionLabel":
        """``later . self``: contexts compose forwards, types backwards."""
        return ReductionLabel(compose(later.ctx, self.ctx), compose(self.typ, later.typ))

    def is_identity(self) -> bool:
        return is_identity(self.ctx) and is_identity(self.typ)

    def __str__(self):
        return f"({self.ctx}; {format_morphism(self.typ)})"


def product(l2: ReductionLabel, l1: ReductionLabel) -> ReductionLabel:
    """The partial monoid product ``l2 . l1`` (``l1`` first)."""
    return l1.then(l2)


@dataclass(frozen=True)
class SubstResult:
    derivation: EtaDerivation
    sigma: ContextMorphism


@dataclass(frozen=True)
class Step:
    kind: Kind
    position: tuple
    label: ReductionLabel
    source: EtaDerivation
    result: EtaDerivation

    def record(self, index: int) -> dict:
        return {
            "index": index,
            "kind": self.kind.value,
            "position": format_path(self.position),
            "theta": str(self.label.ctx),
            "f": format_morphism(self.label.typ),
            "pre": format_eta(self.source.term),
            "post": format_eta(self.result.term),
        }


# ---------------------------------------------------------------- substitution

def _shuffle(gammas, deltas) -> dict:
    """Block permutation ``(tensor gamma_i) (x) (tensor delta_i) -> tensor (gamma_i (x) delta_i)``."""
    names = []
    for b in list(gammas) + list(deltas):
        for n in b:
            if n not in names:
                names.append(n)
    out = {}
    for n in names:
        gl = [tuple(g.get(n, ())) for g in gammas]
        dl = [tuple(d.get(n, ())) for d in deltas]
        source = sum(gl, ()) + sum(dl, ())
        goff, doff = [], []
        pos = 0
        for g in gl:
            goff.append(pos)
            pos += len(g)
        for d in dl:
            doff.append(pos)
            pos += len(d)
        table = []
        for i in range(len(gl)):
            table.extend(goff[i] + k + 1 for k in range(len(gl[i])))
            table.extend(doff[i] + k + 1 for k in range(len(dl[i])))
        out[n] = ground(source, IndexMap(tuple(table), len(source)))
    return out


def _without(d: dict, x: str) -> dict:
    return {k: v for k, v in d.items() if k != x}


def _subst(t, x: str, bag: tuple):
    """``t<bag/x>`` and the permutation ``sigma : (gamma (x) delta) -> result context``."""
    if isinstance(t, Lam):
        if x in t.names:
            if bag:
                raise ArityMismatch(f"{x} is bound here but {len(bag)} terms remain")
            return t, _rid(t)
        body, sigma = _subst(t.body, x, bag)
        binders = tuple((n, compose(sigma.get(n, _EMPTY), f)) for n, f in t.binders)
        return Lam(binders, body), {k: v for k, v in sigma.items() if k not in t.names}
    parts = []
    if isinstance(t, Head):
        if t.name == x:
            if not bag:
                raise ArityMismatch(f"no term left for an occurrence of {x}")
            parts.append(("x", bag[0]))
        else:
            parts.append(("var", t))
    else:
        parts.append(("term", t.fun))
    for b in t.args:
        for s in b:
            parts.append(("term", s))
    need = [1 if k == "x" else 0 if k == "var" else len(occ(p).get(x, ())) for k, p in parts]
    if sum(need) != len(bag):
        raise ArityMismatch(f"{len(bag)} terms for {sum(need)} occurrences of {x}")
    gammas, deltas, sigmas, results = [], [], [], []
    pos = 0
    for (kind, p), k in zip(parts, need):
        chunk = bag[pos:pos + k]
        pos += k
        if kind == "x":
            gammas.append({})
            deltas.append(occ(p))
            sigmas.append(_rid(p))
            results.append(p)
        elif kind == "var":
            gammas.append({p.name: [p.type]})
            deltas.append({})
            sigmas.append({p.name: identity((p.type,))})
            results.append(p)
        else:
            gammas.append(_without(occ(p), x))
            deltas.append(occ_seq((chunk,)))
            r, s = _subst(p, x, chunk)
            sigmas.append(s)
            results.append(r)
    sigma = _rcompose(_rsum(*sigmas), _shuffle(gammas, deltas))
    head, rest = results[0], results[1:]
    args, i = [], 0
    for b in t.args:
        args.append(tuple(rest[i:i + len(b)]))
        i += len(b)
    if isinstance(t, Redex) or parts[0][0] == "x":
        if not args:
            return head, sigma
        if not isinstance(head, Lam):
            raise TypeMismatch("substituted head of arrow type must be an abstraction")
        return Redex(head, tuple(args)), sigma
    return Head(t.name, t.type, tuple(args)), sigma


def substitute_term(t, x: str, bag: tuple):
    """Substitute a bag for ``x``; returns the term and sigma as a dict of ground permutations."""
    found = occ(t).get(x, ())
    if len(found) != len(bag):
        raise ArityMismatch(f"{x} occurs {len(found)} times but the bag has {len(bag)} elements")
    for a, s in zip(found, bag):
        if type_of(s) != a:
            raise TypeMismatch(f"bag element for {x}", format_type(a), format_type(type_of(s)))
    bound = _binders(t)
    free = set(occ_seq((bag,)))
    clash = bound & free
    if clash:
        t = _rename_bound(t, clash, free | all_names(t))
    return _subst(t, x, tuple(bag))


def _binders(t, out=None) -> set:
    if out is None:
        out = set()
    if isinstance(t, Lam):
        out.update(t.names)
        _binders(t.body, out)
        return out
    if isinstance(t, Redex):
        _binders(t.fun, out)
    for b in t.args:
        for s in b:
            _binders(s, out)
    return out


def _rename_bound(t, clash: set, used: set):
    fresh = _Fresh(used)

    def go(t):
        if isinstance(t, Head):
            return Head(t.name, t.type, tuple(tuple(go(s) for s in b) for b in t.args))
        if isinstance(t, Redex):
            return Redex(go(t.fun), tuple(tuple(go(s) for s in b) for b in t.args))
        body = t.body
        binders = []
        for n, f in t.binders:
            if n in clash:
                m = fresh(n.rstrip("0123456789") or "v")
                body = rename_free(body, n, m)
                binders.append((m, f))
            else:
                binders.append((n, f))
        return Lam(tuple(binders), go(body))

    return go(t)


def substitute(d: EtaDerivation, x: str, bag: EtaDerivation | tuple, bag_context: Context = None) -> SubstResult:
    """``d<bag/x>`` with result context ``(gamma (x) delta)^[sigma]``.

    ``bag`` is a tuple of eta-long terms; its context ``delta`` ranges over the
    same variables as ``d`` minus ``x``.
    """
    names = tuple(n for n in d.names if n != x)
    t, sigma = substitute_term(d.term, x, tuple(bag))
    found = occ(t)
    out = EtaDerivation(Context(tuple((n, tuple(found.get(n, ()))) for n in names)), t)
    gamma = Context(tuple((n, d.context.lookup(n)) for n in names))
    delta_occ = occ_seq((tuple(bag),))
    src = {n: gamma.lookup(n) + tuple(delta_occ.get(n, ())) for n in names}
    parts = {n: sigma.get(n, identity(src[n])) for n in names}
    return SubstResult(out, ContextMorphism(names, tuple(parts[n] for n in names)))


def substitute_many(t, xs, bags):
    """Sequential substitution of each bag for its binder; sigma composed accordingly."""
    clash = set(xs) & set(occ_seq(tuple(bags)))
    if clash:
        raise ArityMismatch(f"binders {sorted(clash)} occur free in the arguments")
    sigma = None
    for x, bag in zip(xs, bags):
        delta = occ_seq((tuple(bag),))
        t, s = substitute_term(t, x, tuple(bag))
        if sigma is None:
            sigma = s
        else:
            # x is consumed here; its occurrences were untouched by earlier substitutions
            prev = _rsum(_without(sigma, x), {n: identity(tuple(v)) for n, v in delta.items()})
            sigma = _rcompose(s, prev)
    return t, sigma if sigma is not None else {}


# ---------------------------------------------------------------- ground steps

def _exp_ground(t: Lam):
    if not isinstance(t, Lam) or all(is_identity(f) for f in t.annotations):
        raise NotARedex("exponential step needs an abstraction with a non-identity annotation")
    theta = {n: f for n, f in t.binders}
    body, nu = contravariant_term(t.body, theta)
    nus = [nu.get(n, _EMPTY) for n in t.names]
    lam = Lam(tuple((n, identity(m.cod)) for n, m in zip(t.names, nus)), body)
    outer = {k: v for k, v in nu.items() if k not in t.names}
    return lam, outer, arrow_of(nus)


def _lin_ground(t: Redex):
    if not isinstance(t, Redex) or not all(is_permutation(f) for f in t.fun.annotations):
        raise NotARedex("linear step needs a redex whose annotations are ground permutations")
    lam = t.fun
    clash = set(lam.names) & set(occ_seq(t.args))
    if clash:
        lam = _rename_bound(lam, clash, all_names(t))
    args, mu = _co_seq(t.args, lam.annotations)
    gamma = occ(lam)
    new, sigma = substitute_many(lam.body, lam.names, args)
    fun_id = {n: identity(tuple(v)) for n, v in gamma.items()}
    label = _rcompose(sigma, _rsum(fun_id, mu))
    return new, label


# ---------------------------------------------------------------- closure

def _step(t, path):
    """Rewrite at ``path``; returns (term, context label dict, type label)."""
    if not path:
        if isinstance(t, Lam):
            lam, theta, f = _exp_ground(t)
            return Kind.EXP, lam, theta, f
        if isinstance(t, Redex):
            new, theta = _lin_ground(t)
            return Kind.LIN, new, theta, AtomId()
        raise NotARedex("no redex at a variable application")
    step, rest = path[0], path[1:]
    if isinstance(t, Lam):
        if step != "body":
            raise InvalidPosition(f"abstraction has no child {step!r}")
        kind, body, theta, _ = _step(t.body, rest)
        binders = tuple((n, compose(theta.get(n, identity(f.cod)), f)) for n, f in t.binders)
        return kind, Lam(binders, body), {k: v for k, v in theta.items() if k not in t.names}, identity(type_of(t))
    if step == "fun":
        if not isinstance(t, Redex):
            raise InvalidPosition("only a redex has a function child")
        kind, fun, theta, f = _step(t.fun, rest)
        args, mu = _co_seq(t.args, spine_of(f))
        return kind, Redex(fun, args), _rsum(theta, mu), AtomId()
    try:
        i, j = (int(v) for v in step.split("."))
        elem = t.args[i - 1][j - 1]
    except (ValueError, IndexError, AttributeError):
        raise InvalidPosition(f"no subterm at step {step!r}") from None
    kind, new, theta, f = _step(elem, rest)
    lefts, pieces = [], []
    args = []
    for bi, bag in enumerate(t.args, 1):
        nested, newbag = [], []
        for bj, s in enumerate(bag, 1):
            if (bi, bj) == (i, j):
                nested.append(f)
                newbag.append(new)
                pieces.append(theta)
            else:
                nested.append(identity(type_of(s)))
                newbag.append(s)
                pieces.append(_rid(s))
        args.append(tuple(newbag))
        lefts.append(ListMorphism(tuple(m.dom for m in nested), IndexMap.identity(len(nested)), tuple(nested)))
    g = arrow_of(lefts)
    if isinstance(t, Head):
        new_type = g.cod
        head = {t.name: ListMorphism((t.type,), IndexMap.identity(1), (g,))}
        return kind, Head(t.name, new_type, tuple(args)), _rsum(head, *pieces), AtomId()
    fun, mu = _co(t.fun, g)
    return kind, Redex(fun, tuple(args)), _rsum(mu, *pieces), AtomId()


def step_closure(d: EtaDerivation, position) -> Step:
    position = tuple(position)
    kind, t, theta, f = _step(d.term, position)
    found = occ(t)
    out = EtaDerivation(Context(tuple((n, tuple(found.get(n, ()))) for n in d.names)), t)
    ctx = ContextMorphism.from_dict(d.names, theta, d.context)
    return Step(kind, position, ReductionLabel(ctx, f), d, out)


def exp_ground_step(d: EtaDerivation) -> Step:
    if not isinstance(d.term, Lam):
        raise NotARedex("exponential ground step needs an abstraction")
    return step_closure(d, ())


def lin_ground_step(d: EtaDerivation) -> Step:
    if not isinstance(d.term, Redex):
        raise NotARedex("linear ground step needs a redex")
    return step_closure(d, ())


# ---------------------------------------------------------------- redexes and strategies

def redexes(d) -> list:
    """All (position, kind) pairs, leftmost-outermost first."""
    t = d.term if isinstance(d, EtaDerivation) else d
    out = []

    def go(t, path):
        if isinstance(t, Lam):
            if not all(is_identity(f) for f in t.annotations):
                out.append((path, Kind.EXP))
        elif isinstance(t, Redex):
            if all(is_permutation(f) for f in t.fun.annotations):
                out.append((path, Kind.LIN))
        for step, s in children(t):
            go(s, path + (step,))

    go(t, ())
    return out


def is_planar(d) -> bool:
    return not any(k is Kind.EXP for _, k in redexes(d))


def is_normal(d) -> bool:
    return not redexes(d)


def choose(rs, strategy: Strategy, rng: Optional[random.Random] = None, only: Optional[Kind] = None):
    if only is not None:
        rs = [r for r in rs if r[1] is only]
    if not rs:
        return None
    if strategy is Strategy.LEFTMOST_OUTERMOST:
        return rs[0]
    if strategy is Strategy.EXPONENTIAL_FIRST:
        return next((r for r in rs if r[1] is Kind.EXP), rs[0])
    if strategy is Strategy.LINEAR_FIRST:
        return next((r for r in rs if r[1] is Kind.LIN), rs[0])
    return rs[(rng or random.Random(0)).randrange(len(rs))]


@dataclass
class Normalization:
    derivation: EtaDerivation
    label: ReductionLabel
    trace: list = field(default_factory=list)


def normalize(d: EtaDerivation, strategy: Strategy = Strategy.LEFTMOST_OUTERMOST, seed: int = 0,
              only: Optional[Kind] = None, budget: int = DEFAULT_BUDGET) -> Normalization:
    """Reduce until no redex (of kind ``only``) is left.

    Under a deterministic strategy a revisited derivation means the run can never
    stop, so it is reported as :class:`ReductionCycle` rather than spinning until
    the budget runs out.
    """
    rng = random.Random(seed)
    label = ReductionLabel.unit(d)
    trace = []
    cur = d
    seen = {} if strategy is not Strategy.RANDOM else None
    while True:
        pick = choose(redexes(cur), strategy, rng, only)
        if pick is None:
            return Normalization(cur, label, trace)
        if seen is not None:
            k = (cur.context, canonical(cur.term))
            if k in seen:
                raise ReductionCycle(f"reduction returns to step {seen[k]} after {len(trace)} steps",
                                     trace, seen[k])
            seen[k] = len(trace)
        if len(trace) >= budget:
            raise StepBudgetExceeded(f"no normal form within {budget} steps")
        st = step_closure(cur, pick[0])
        trace.append(st)
        label = label.then(st.label)
        cur = st.result


def exp_normalize(d: EtaDerivation, **kw) -> Normalization:
    return normalize(d, only=Kind.EXP, **kw)


def lin_normalize(d: EtaDerivation, **kw) -> Normalization:
    return normalize(d, only=Kind.LIN, **kw)


def trace_label(d: EtaDerivation, trace) -> ReductionLabel:
    label = ReductionLabel.unit(d)
    for st in trace:
        label = label.then(st.label)
    return label


# ---------------------------------------------------------------- traces

def format_trace(trace, machine: bool = False) -> str:
    lines = []
    for i, st in enumerate(trace, 1):
        rec = st.record(i)
        if machine:
            lines.append(json.dumps(rec, ensure_ascii=False, sort_keys=True))
        else:
            lines.append(f"{rec['index']}\t{rec['kind']}\t{rec['position']}\t{rec['theta']}\t{rec['f']}\t"
                         f"{rec['pre']}\t{rec['post']}")
    return "\n".join(lines)


def replay(d: EtaDerivation, trace) -> bool:
    """Re-run every recorded step from ``d`` and compare results and labels."""
    cur = d
    for st in trace:
        again = step_closure(cur, st.position)
        if again.result != st.result or again.label != st.label or again.kind != st.kind:
            return False
        cur = again.result
    return True


def size_of(d) -> int:
    t = d.term if isinstance(d, EtaDerivation) else d
    return eta_size(t)
