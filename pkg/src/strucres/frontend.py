"""Simple and idempotent intersection typing for lambda-terms, and their coarse
approximations as cartesian resource terms.

A typing derivation follows the four rules of the idempotent system; simple
types are the case where every intersection is a singleton.  For embedding
and simulation the derivation is first put in eta-long form (``TLam``,
``THead``, ``TRedex``), which has exactly the shape of an eta-long resource
term, so positions carry over unchanged.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from . import terms as T
from .confluence import iso, key
from .errors import (InvalidPosition, NotARedex, RuleViolation, SimulationMismatch,
                     UnboundVariable)
from .eta import EtaDerivation, Head, Lam, Redex, derive, format_path, to_eta_long
from .lam import (BASE, Base, Fn, LAbs, LApp, LVar, enum_key, format_lambda, format_ltype,
                  intersection, is_simple_type, lnames, lspine, parse_lambda,
                  parse_lcontext, parse_ltype)
from .morph import (O, Arrow, Context, IndexMap, ListMorphism, compose, identity, is_identity, make_contraction)
from .rewrite import Kind, ReductionLabel, redexes, step_closure

SIMPLE = "simple"
IDEMPOTENT = "intersection"


# ---------------------------------------------------------------- derivations

@dataclass(frozen=True)
class LDerivation:
    """One rule instance: ``var``, ``abs``, ``app`` or ``inter`` (the last types a term at every member of an intersection)."""
    rule: str
    term: object
    type: object
    children: tuple = ()


@dataclass(frozen=True)
class LTyping:
    context: tuple  # ((name, intersection), ...)
    derivation: LDerivation
    system: str = SIMPLE

    @property
    def term(self):
        return self.derivation.term

    @property
    def type(self):
        return self.derivation.type

    def env(self) -> dict:
        return dict(self.context)


def _fmt_inter(xs) -> str:
    if len(xs) == 1:
        return format_ltype(xs[0])
    return "{" + ", ".join(format_ltype(a) for a in xs) + "}"


def format_lcontext(ctx) -> str:
    return ", ".join(f"{n} : {_fmt_inter(a)}" for n, a in ctx)


def format_lderivation(d: LDerivation, indent: int = 0) -> str:
    """Rule-per-line tree, premises indented below their conclusion."""
    ty = _fmt_inter(d.type) if d.rule == "inter" else format_ltype(d.type)
    turn = "|-&" if d.rule == "inter" else "|-"
    lines = [f"{'  ' * indent}{d.rule:<5} {turn} {format_lambda(d.term)} : {ty}"]
    for c in d.children:
        lines.append(format_lderivation(c, indent + 1))
    return "\n".join(lines)


def _as_inter(a) -> tuple:
    return a if isinstance(a, tuple) else (a,)


class _Checker:
    def __init__(self, system: str):
        self.system = system

    def fail(self, msg, m):
        raise RuleViolation(f"{msg} at {format_lambda(m)}")

    def check(self, env, m, a) -> LDerivation:
        if isinstance(m, LAbs):
            if not isinstance(a, Fn):
                self.fail(f"abstraction checked against {format_ltype(a)}", m)
            if m.type is not None and intersection(*_as_inter(m.type)) != a.source:
                self.fail(f"binder annotated {_fmt_inter(_as_inter(m.type))}, expected {_fmt_inter(a.source)}", m)
            body = self.check({**env, m.name: a.source}, m.body, a.target)
            return LDerivation("abs", m, a, (body,))
        seen = []
        for d in self.synth(env, m):
            if d.type == a:
                return d
            seen.append(d.type)
        if not seen:
            self.fail(f"no typing at {format_ltype(a)}", m)
        self.fail(f"has type {' or '.join(format_ltype(t) for t in seen)}, expected {format_ltype(a)}", m)

    def inter(self, env, m, members) -> LDerivation:
        return LDerivation("inter", m, tuple(members), tuple(self.check(env, m, a) for a in members))

    def synth(self, env, m):
        """Every derivation of ``m`` whose type is determined bottom-up, in a fixed order."""
        if isinstance(m, LVar):
            if m.name not in env:
                raise UnboundVariable(f"unbound variable {m.name}")
            for a in env[m.name]:
                yield LDerivation("var", m, a)
            return
        if isinstance(m, LAbs):
            if m.type is None:
                self.fail("cannot infer the type of an unannotated abstraction", m)
            src = intersection(*_as_inter(m.type))
            for body in self.synth({**env, m.name: src}, m.body):
                yield LDerivation("abs", m, Fn(src, body.type), (body,))
            return
        for f in self.synth(env, m.fun):
            if not isinstance(f.type, Fn):
                continue
            try:
                arg = self.inter(env, m.arg, f.type.source)
            except RuleViolation:
                continue
            yield LDerivation("app", m, f.type.target, (f, arg))


def _normalize_context(ctx) -> tuple:
    if isinstance(ctx, str):
        ctx = parse_lcontext(ctx)
    if isinstance(ctx, dict):
        ctx = tuple(ctx.items())
    return tuple((n, intersection(*_as_inter(a))) for n, a in ctx)


def _check(system, ctx, m, a=None) -> LTyping:
    ctx = _normalize_context(ctx)
    if isinstance(m, str):
        m = parse_lambda(m)
    if isinstance(a, str):
        a = parse_ltype(a)
    chk = _Checker(system)
    env = dict(ctx)
    if a is None:
        d = next(chk.synth(env, m), None)
        if d is None:
            raise RuleViolation(f"no typing for {format_lambda(m)}")
    else:
        d = chk.check(env, m, a)
    t = LTyping(ctx, d, system)
    if system == SIMPLE:
        _require_simple(t)
    return t


def _require_simple(t: LTyping):
    for n, xs in t.context:
        if len(xs) != 1 or not is_simple_type(xs[0]):
            raise RuleViolation(f"{n} : {_fmt_inter(xs)} is not a simple type")

    def go(d):
        ty = d.type
        if d.rule == "inter":
            if len(ty) != 1:
                raise RuleViolation(f"intersection at {format_lambda(d.term)} in a simple derivation")
        elif not is_simple_type(ty):
            raise RuleViolation(f"{format_ltype(ty)} at {format_lambda(d.term)} is not a simple type")
        for c in d.children:
            go(c)

    go(t.derivation)


def check_simple(ctx, m, a=None) -> LTyping:
    """Type ``m`` in the simply typed system; binders in head position need annotations."""
    return _check(SIMPLE, ctx, m, a)


def check_idempotent(ctx, m, a=None) -> LTyping:
    """Type ``m`` with idempotent intersections; where a variable has several members, the first that works is used."""
    return _check(IDEMPOTENT, ctx, m, a)


def validate(t: LTyping):
    """Re-check every rule instance of ``t``; raises RuleViolation at the first bad node."""
    env = dict(t.context)

    def go(env, d):
        m = d.term
        if d.rule == "var":
            if not isinstance(m, LVar) or d.type not in env.get(m.name, ()):
                raise RuleViolation(f"variable axiom fails at {format_lambda(m)}")
        elif d.rule == "abs":
            (body,) = d.children
            if not isinstance(m, LAbs) or not isinstance(d.type, Fn) or body.term != m.body or body.type != d.type.target:
                raise RuleViolation(f"abstraction rule fails at {format_lambda(m)}")
            go({**env, m.name: d.type.source}, body)
        elif d.rule == "app":
            f, arg = d.children
            if (not isinstance(m, LApp) or f.term != m.fun or arg.term != m.arg or arg.rule != "inter"
                    or not isinstance(f.type, Fn) or f.type.source != arg.type or f.type.target != d.type):
                raise RuleViolation(f"application rule fails at {format_lambda(m)}")
            go(env, f)
            go(env, arg)
        elif d.rule == "inter":
            if not d.type or tuple(c.type for c in d.children) != d.type or any(c.term != m for c in d.children):
                raise RuleViolation(f"intersection rule fails at {format_lambda(m)}")
            for c in d.children:
                go(env, c)
        else:
            raise RuleViolation(f"unknown rule {d.rule}")

    go(env, t.derivation)
    if t.system == SIMPLE:
        _require_simple(t)
    return t


# ---------------------------------------------------------------- eta-long typed terms

@dataclass(frozen=True)
class THead:
    name: str
    type: object
    args: tuple = ()  # one bag per source intersection, members in sorted order


@dataclass(frozen=True)
class TLam:
    binders: tuple  # ((name, intersection), ...)
    body: object

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self.binders)


@dataclass(frozen=True)
class TRedex:
    fun: TLam
    args: tuple


@dataclass(frozen=True)
class TypedEta:
    context: tuple
    term: object
    system: str = SIMPLE

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self.context)


def ttype(t):
    if isinstance(t, TLam):
        out = BASE
        for _, src in reversed(t.binders):
            out = Fn(src, out)
        return out
    return BASE


def _tnames(t, out):
    if isinstance(t, THead):
        out.add(t.name)
        for bag in t.args:
            for s in bag:
                _tnames(s, out)
    elif isinstance(t, TLam):
        out.update(t.names)
        _tnames(t.body, out)
    else:
        _tnames(t.fun, out)
        for bag in t.args:
            for s in bag:
                _tnames(s, out)
    return out


class _Fresh:
    def __init__(self, used):
        self.used = set(used)
        self.counter = itertools.count(1)

    def __call__(self, base="z"):
        while True:
            name = f"{base}{next(self.counter)}"
            if name not in self.used:
                self.used.add(name)
                return name


def _expand_var(x, a, fresh):
    srcs = lspine(a)
    if not srcs:
        return THead(x, a, ())
    zs = [fresh() for _ in srcs]
    body = THead(x, a, tuple(tuple(_expand_var(z, b, fresh) for b in src) for z, src in zip(zs, srcs)))
    return TLam(tuple(zip(zs, srcs)), body)


def eta_long(t: LTyping) -> TypedEta:
    """Eta-expand a derivation; every bag member is expanded at its own type."""
    used = lnames(t.term) | {n for n, _ in t.context}
    fresh = _Fresh(used)

    def go(d):
        if d.rule == "abs":
            binders = []
            node = d
            while node.rule == "abs":
                binders.append((node.term.name, node.type.source))
                node = node.children[0]
            body = go(node)
            if isinstance(body, TLam):
                return TLam(tuple(binders) + body.binders, body.body)
            return TLam(tuple(binders), body)
        bags = []
        node = d
        while node.rule == "app":
            f, arg = node.children
            bags.insert(0, tuple(go(c) for c in arg.children))
            node = f
        extra = lspine(d.type)
        zs = [fresh() for _ in extra]
        zbags = [tuple(_expand_var(z, b, fresh) for b in src) for z, src in zip(zs, extra)]
        args = tuple(bags) + tuple(zbags)
        if node.rule == "var":
            core = THead(node.term.name, node.type, args)
        else:
            core = TRedex(go(node), args)
        if extra:
            return TLam(tuple(zip(zs, extra)), core)
        return core

    return TypedEta(t.context, go(t.derivation), t.system)


def to_lambda(t):
    """The ordinary lambda-term under a typed eta-long term (first member of each bag)."""
    if isinstance(t, THead):
        out = LVar(t.name)
        for bag in t.args:
            out = LApp(out, to_lambda(bag[0]))
        return out
    if isinstance(t, TLam):
        out = to_lambda(t.body)
        for n, _ in reversed(t.binders):
            out = LAbs(n, out)
        return out
    out = to_lambda(t.fun)
    for bag in t.args:
        out = LApp(out, to_lambda(bag[0]))
    return out


def tsubterm(t, path):
    for step in path:
        if step == "body" and isinstance(t, TLam):
            t = t.body
        elif step == "fun" and isinstance(t, TRedex):
            t = t.fun
        elif isinstance(step, str) and "." in step and isinstance(t, (THead, TRedex)):
            i, j = (int(k) for k in step.split("."))
            try:
                t = t.args[i - 1][j - 1]
            except IndexError:
                raise InvalidPosition(f"no argument {step}") from None
        else:
            raise InvalidPosition(f"no subterm at step {step!r}")
    return t


def treplace(t, path, new):
    if not path:
        return new
    step, rest = path[0], path[1:]
    if step == "body" and isinstance(t, TLam):
        return TLam(t.binders, treplace(t.body, rest, new))
    if step == "fun" and isinstance(t, TRedex):
        return TRedex(treplace(t.fun, rest, new), t.args)
    if isinstance(step, str) and "." in step and isinstance(t, (THead, TRedex)):
        i, j = (int(k) for k in step.split("."))
        args = [list(b) for b in t.args]
        args[i - 1][j - 1] = treplace(args[i - 1][j - 1], rest, new)
        args = tuple(tuple(b) for b in args)
        return THead(t.name, t.type, args) if isinstance(t, THead) else TRedex(t.fun, args)
    raise InvalidPosition(f"no subterm at step {step!r}")


def typed_redexes(t, path=()) -> list:
    """Positions of spine redexes, outermost first."""
    out = []
    if isinstance(t, TRedex):
        out.append(path)
        out += typed_redexes(t.fun, path + ("fun",))
    if isinstance(t, TLam):
        out += typed_redexes(t.body, path + ("body",))
    if isinstance(t, (THead, TRedex)):
        for i, bag in enumerate(t.args, 1):
            for j, s in enumerate(bag, 1):
                out += typed_redexes(s, path + (f"{i}.{j}",))
    return out


def _tfree(t, bound=frozenset(), out=None) -> set:
    if out is None:
        out = set()
    if isinstance(t, THead):
        if t.name not in bound:
            out.add(t.name)
        for bag in t.args:
            for s in bag:
                _tfree(s, bound, out)
    elif isinstance(t, TLam):
        _tfree(t.body, bound | set(t.names), out)
    else:
        _tfree(t.fun, bound, out)
        for bag in t.args:
            for s in bag:
                _tfree(s, bound, out)
    return out


def _apply(f, args):
    """Put a substituted term in head position; an abstraction becomes a redex."""
    if not args:
        return f
    if isinstance(f, TLam):
        return TRedex(f, args)
    raise RuleViolation("a base-type term cannot take arguments")


def _tsubst(t, sub: dict, avoid: set, fresh):
    """Simultaneous substitution; ``sub`` maps a name to ``(source, bag)`` and each occurrence takes the member of its type."""
    if isinstance(t, THead):
        args = tuple(tuple(_tsubst(s, sub, avoid, fresh) for s in bag) for bag in t.args)
        if t.name in sub:
            src, bag = sub[t.name]
            return _apply(bag[src.index(t.type)], args)
        return THead(t.name, t.type, args)
    if isinstance(t, TLam):
        binders, inner = [], dict(sub)
        renames = {}
        for n, src in t.binders:
            inner.pop(n, None)
            if n in avoid:
                new = fresh(n.rstrip("0123456789") or "v")
                renames[n] = new
                binders.append((new, src))
            else:
                binders.append((n, src))
        body = t.body
        if renames:
            body = _trename(body, renames)
        return TLam(tuple(binders), _tsubst(body, inner, avoid, fresh))
    fun = _tsubst(t.fun, sub, avoid, fresh)
    args = tuple(tuple(_tsubst(s, sub, avoid, fresh) for s in bag) for bag in t.args)
    return TRedex(fun, args)


def _trename(t, ren: dict):
    if isinstance(t, THead):
        return THead(ren.get(t.name, t.name), t.type,
                     tuple(tuple(_trename(s, ren) for s in bag) for bag in t.args))
    if isinstance(t, TLam):
        inner = {k: v for k, v in ren.items() if k not in t.names}
        return TLam(t.binders, _trename(t.body, inner))
    return TRedex(_trename(t.fun, ren), tuple(tuple(_trename(s, ren) for s in bag) for bag in t.args))


def beta_typed(t: TypedEta, position) -> TypedEta:
    """Contract the spine redex at ``position``: every binder of its abstraction at once."""
    position = tuple(position)
    r = tsubterm(t.term, position)
    if not isinstance(r, TRedex):
        raise NotARedex(f"no beta-redex at {format_path(position)}")
    avoid = set()
    for bag in r.args:
        for s in bag:
            _tfree(s, out=avoid)
    fresh = _Fresh(_tnames(t.term, set()) | {n for n, _ in t.context})
    sub = {n: (src, bag) for (n, src), bag in zip(r.fun.binders, r.args)}
    new = _tsubst(r.fun.body, sub, avoid, fresh)
    return TypedEta(t.context, treplace(t.term, position, new), t.system)


def typed_normalize(t: TypedEta, budget: int = 10000):
    steps = 0
    while True:
        rs = typed_redexes(t.term)
        if not rs:
            return t, steps
        if steps >= budget:
            from .errors import StepBudgetExceeded
            raise StepBudgetExceeded(f"no normal form within {budget} spine steps")
        t = beta_typed(t, rs[0])
        steps += 1


def _occ_types(t, x, out=None) -> list:
    """Types of the free occurrences of ``x``, left to right."""
    if out is None:
        out = []
    if isinstance(t, THead):
        if t.name == x:
            out.append(t.type)
        for bag in t.args:
            for s in bag:
                _occ_types(s, x, out)
    elif isinstance(t, TLam):
        if x not in t.names:
            _occ_types(t.body, x, out)
    else:
        _occ_types(t.fun, x, out)
        for bag in t.args:
            for s in bag:
                _occ_types(s, x, out)
    return out


# ---------------------------------------------------------------- embeddings

def simple_type_image(a):
    """``<<o>> = o`` and ``<<A => B>> = [<<A>>] -o <<B>>``."""
    if isinstance(a, Base):
        return O
    if len(a.source) != 1:
        raise RuleViolation(f"{format_ltype(a)} is not a simple type")
    return Arrow((simple_type_image(a.source[0]),), simple_type_image(a.target))


def idem_type_image(a):
    """Intersections become lists in the fixed type order."""
    if isinstance(a, Base):
        return O
    return Arrow(idem_list_image(a.source), idem_type_image(a.target))


def idem_list_image(xs) -> tuple:
    return tuple(idem_type_image(b) for b in sorted(xs, key=enum_key))


def cart(a, n: int) -> ListMorphism:
    """``cart^n_A : [<<A>>] -> [<<A>>]^n``."""
    return make_contraction(simple_type_image(a), n)


def _embed_simple_term(t):
    if isinstance(t, THead):
        return Head(t.name, simple_type_image(t.type),
                    tuple(tuple(_embed_simple_term(s) for s in bag) for bag in t.args))
    if isinstance(t, TLam):
        binders = []
        for n, src in t.binders:
            (a,) = src
            binders.append((n, cart(a, len(_occ_types(t.body, n)))))
        return Lam(tuple(binders), _embed_simple_term(t.body))
    return Redex(_embed_simple_term(t.fun), tuple(tuple(_embed_simple_term(s) for s in bag) for bag in t.args))


def _as_typed(t) -> TypedEta:
    return eta_long(t) if isinstance(t, LTyping) else t


def embed_simple(t) -> EtaDerivation:
    """Coarse approximation of a simple typing: binders annotated ``cart^n``, singleton bags."""
    t = _as_typed(t)
    for n, xs in t.context:
        if len(xs) != 1:
            raise RuleViolation(f"{n} : {_fmt_inter(xs)} is not a simple type")
    return derive(_embed_simple_term(t.term), t.names)


def _inter_annotation(src, occs) -> ListMorphism:
    """``x : [<<A_1>>..<<A_k>>] -> occurrence list``: each occurrence picks its member."""
    source = idem_list_image(src)
    table = tuple(src.index(a) + 1 for a in occs)
    return ListMorphism(source, IndexMap(table, len(source)), tuple(identity(source[i - 1]) for i in table))


def _embed_inter_term(t):
    if isinstance(t, THead):
        return Head(t.name, idem_type_image(t.type),
                    tuple(tuple(_embed_inter_term(s) for s in bag) for bag in t.args))
    if isinstance(t, TLam):
        binders = tuple((n, _inter_annotation(src, _occ_types(t.body, n))) for n, src in t.binders)
        return Lam(binders, _embed_inter_term(t.body))
    return Redex(_embed_inter_term(t.fun), tuple(tuple(_embed_inter_term(s) for s in bag) for bag in t.args))


def embed_intersection(t) -> EtaDerivation:
    """Coarse approximation of an idempotent typing; a ``&``-introduction becomes a bag."""
    t = _as_typed(t)
    return derive(_embed_inter_term(t.term), t.names)


def embed(t) -> EtaDerivation:
    t = _as_typed(t)
    return embed_simple(t) if t.system == SIMPLE else embed_intersection(t)


def embed_curried(t: LTyping) -> EtaDerivation:
    """The simple embedding read off the derivation clause by clause on curried terms, then eta-expanded."""
    if t.system != SIMPLE:
        raise RuleViolation("the curried route handles simple typings only")

    def count(d, x):
        if d.rule == "var":
            return int(d.term.name == x)
        if d.rule == "abs":
            return 0 if d.term.name == x else count(d.children[0], x)
        return sum(count(c, x) for c in d.children)

    def go(d):
        if d.rule == "var":
            return T.Var(d.term.name)
        if d.rule == "abs":
            (a,) = d.type.source
            return T.Abs(d.term.name, cart(a, count(d.children[0], d.term.name)), go(d.children[0]))
        if d.rule == "app":
            f, arg = d.children
            return T.App(go(f), tuple(go(c) for c in arg.children))
        raise RuleViolation(f"unexpected rule {d.rule}")

    ctx = Context(tuple((n, (simple_type_image(xs[0]),) * count(t.derivation, n)) for n, xs in t.context))
    return to_eta_long(T.check(ctx, go(t.derivation)))


# ---------------------------------------------------------------- simulation

@dataclass(frozen=True)
class SimulationReport:
    source: EtaDerivation          # <<M>>
    target: EtaDerivation          # <<N>>
    steps: tuple                   # the exponential then linear steps taken
    endpoint: EtaDerivation
    label: ReductionLabel
    exact: bool                    # endpoint equals <<N>> up to bound names
    label_equation: Optional[bool]  # simple case only
    reduct: TypedEta

    @property
    def ok(self) -> bool:
        return self.exact if self.label_equation is None else (self.exact and self.label_equation)


def cart_family(t: TypedEta, d: EtaDerivation) -> dict:
    """``cart^{n}_Gamma`` for the free variables of ``d``, one ``cart^n`` per variable."""
    return {n: cart(xs[0], len(d.context.lookup(n))) for n, xs in t.context}


def simulate_beta(t, position) -> SimulationReport:
    """Factor the spine beta-step at ``position`` as an exponential step followed by a linear one."""
    t = _as_typed(t)
    position = tuple(position)
    if not isinstance(tsubterm(t.term, position), TRedex):
        raise NotARedex(f"no beta-redex at {format_path(position)}")
    source = embed(t)
    reduct = beta_typed(t, position)
    target = embed(reduct)
    kinds = dict(redexes(source))
    steps = []
    cur = source
    label = ReductionLabel.unit(source)
    lam = position + ("fun",)
    if kinds.get(lam) is Kind.EXP:
        st = step_closure(cur, lam)
        steps.append(st)
        label = label.then(st.label)
        cur = st.result
    st = step_closure(cur, position)
    if st.kind is not Kind.LIN:
        raise SimulationMismatch(f"expected a linear step at {format_path(position)}, found {st.kind.value}")
    steps.append(st)
    label = label.then(st.label)
    cur = st.result
    equation = None
    if t.system == SIMPLE:
        exact = key(cur) == key(target)
        before, after = cart_family(t, source), cart_family(reduct, target)
        equation = is_identity(label.typ) and all(
            compose(label.ctx.part(n), before[n]) == after[n] for n in t.names)
    else:
        exact = iso(cur, target) is not None
    return SimulationReport(source, target, tuple(steps), cur, label, exact, equation, reduct)


def require_simulation(t, position) -> SimulationReport:
    rep = simulate_beta(t, position)
    if not rep.ok:
        raise SimulationMismatch(
            f"beta-step at {format_path(tuple(position))} does not factor:\n"
            f"  reached  {rep.endpoint}\n  expected {rep.target}\n"
            f"  label equation {rep.label_equation}")
    return rep


def beta_graph(t, limit: int = 2000) -> list:
    """Every spine-beta reduct of ``t`` (including ``t``), breadth first, deduplicated up to bound names."""
    t = _as_typed(t)
    seen = {key(embed(t))}
    out = [t]
    i = 0
    while i < len(out):
        cur = out[i]
        i += 1
        for p in typed_redexes(cur.term):
            nxt = beta_typed(cur, p)
            k = key(embed(nxt))
            if k not in seen:
                if len(seen) >= limit:
                    from .errors import BoundExceeded
                    raise BoundExceeded(f"more than {limit} beta-reducts")
                seen.add(k)
                out.append(nxt)
    return out


# ---------------------------------------------------------------- corpus

@dataclass(frozen=True)
class CorpusEntry:
    name: str
    context: str
    term: str
    type: Optional[str] = None
    system: str = SIMPLE

    def typing(self, system: Optional[str] = None) -> LTyping:
        system = system or self.system
        chk = check_simple if system == SIMPLE else check_idempotent
        return chk(self.context, self.term, self.type)


_NAT = "(o -> o) -> o -> o"


def church(n: int) -> str:
    body = "x"
    for _ in range(n):
        body = f"f ({body})"
    return f"(\\f:o -> o. \\x:o. {body})"


ADD = f"(\\m:{_NAT}. \\n:{_NAT}. \\f:o -> o. \\x:o. m f (n f x))"

CORPUS = (
    CorpusEntry("I", "y : o", "(\\x:o. x) y"),
    CorpusEntry("I-fun", "", "(\\x:o -> o. x) (\\y:o. y)"),
    CorpusEntry("K", "y : o, u : o", "(\\x:o. \\z:o. x) y u"),
    CorpusEntry("K-partial", "y : o", "(\\x:o. \\z:o. x) y", "o -> o"),
    CorpusEntry("S", "w : o -> o -> o, h : o -> o, y : o",
                "(\\x:o -> o -> o. \\g:o -> o. \\z:o. x z (g z)) w h y"),
    *(CorpusEntry(f"c{n}", "", church(n), _NAT) for n in range(4)),
    CorpusEntry("add-c0-c1", "f : o -> o, y : o", f"{ADD} {church(0)} {church(1)} f y"),
    CorpusEntry("add-c1-c2", "f : o -> o, y : o", f"{ADD} {church(1)} {church(2)} f y"),
    CorpusEntry("add-c2-c1", "", f"{ADD} {church(2)} {church(1)}", _NAT),
    CorpusEntry("MN", "w : o -> o -> o, y : o, q : o -> o -> o",
                "(\\x:o -> o. w (x (x y)) (x y)) (\\z:o. q z z)"),
)

INTERSECTION_CORPUS = (
    CorpusEntry("self-app", "", "(\\x:{o -> o, (o -> o) -> o -> o}. x x) (\\y. y)", "o -> o", IDEMPOTENT),
    CorpusEntry("self-app-var", "y : {o, o -> o}", "(\\x:{o, o -> o}. x x) y", "o", IDEMPOTENT),
    CorpusEntry("two-members", "w : o -> o -> o, y : {o, o -> o}",
                "(\\x:{o, o -> o}. w (x x) (x (x x))) y", "o", IDEMPOTENT),
)


def corpus_entry(name: str) -> CorpusEntry:
    for e in CORPUS + INTERSECTION_CORPUS:
        if e.name == name:
            return e
    raise KeyError(name)


def corpus_typings() -> list:
    """Every corpus term in both systems, plus the genuinely intersection-typed extras."""
    out = []
    for e in CORPUS:
        out.append((e, e.typing(SIMPLE)))
        out.append((e, e.typing(IDEMPOTENT)))
    for e in INTERSECTION_CORPUS:
        out.append((e, e.typing()))
    return out
