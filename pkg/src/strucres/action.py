"""Covariant and contravariant actions of morphisms on eta-long terms.

Both actions return the transformed term together with a ground residual
per free variable, built bottom-up by tensoring the children's residuals.
Internally a nested context morphism ``<id; f_1..f_k>`` on a variable is
consumed one component per occurrence, left to right.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import ContextMismatch, TypeMismatch, NotEtaLong
from .eta import EtaDerivation, Head, Lam, Redex, occ, type_of
from .morph import (AtomId, Context, ContextMorphism, IndexMap, ListMorphism,
                    compose, direct_sum, factorize, format_list, format_type, ground,
                    identity, spine_of)


@dataclass(frozen=True)
class ActionResult:
    derivation: EtaDerivation
    residual: ContextMorphism


# ---------------------------------------------------------------- residual bookkeeping

_EMPTY = identity(())


def _rsum(*rs) -> dict:
    """Tensor of residual maps; absent variables count as the empty identity."""
    out = {}
    for r in rs:
        for n, m in r.items():
            out[n] = direct_sum(out[n], m) if n in out else m
    return out


def _rid(t) -> dict:
    return {n: identity(tuple(xs)) for n, xs in occ(t).items()}


def _rcompose(second: dict, first: dict) -> dict:
    keys = list(first) + [k for k in second if k not in first]
    return {k: compose(second.get(k, _EMPTY), first.get(k, _EMPTY)) for k in keys}


# ---------------------------------------------------------------- covariant

def _co(t, f):
    """``[f] t`` for a term; ``f : type(t) -> b``."""
    if isinstance(f, AtomId):
        if type_of(t) != f.dom:
            raise TypeMismatch("covariant action at o on a term of arrow type")
        return t, _rid(t)
    if not isinstance(t, Lam):
        raise NotEtaLong("a term of arrow type must be an abstraction")
    lefts = spine_of(f)
    if len(lefts) != len(t.binders):
        raise TypeMismatch("arrow morphism arity differs from the binder count")
    binders = []
    for (n, g), h in zip(t.binders, lefts):
        if h.cod != g.source:
            raise TypeMismatch(f"covariant action on binder {n}", format_list(g.source), format_list(h.cod))
        binders.append((n, compose(g, h)))
    return Lam(tuple(binders), t.body), _rid(t)


def _co_bag(bag, m: ListMorphism):
    """``[<alpha; f_j>] <t_1..t_k> = <[f_j] t_alpha(j)>`` with residual ``(tensor mu_j) . alpha*``."""
    if len(bag) != len(m.source):
        raise TypeMismatch("bag length differs from the morphism source")
    blocks = [occ(t) for t in bag]
    new, mus = [], []
    for fj, a in zip(m.nested, m.alpha.table):
        s, mu = _co(bag[a - 1], fj)
        new.append(s)
        mus.append(mu)
    star = _alpha_star(blocks, m.alpha)
    return tuple(new), _rcompose(_rsum(*mus), star)


def _alpha_star(blocks, alpha: IndexMap) -> dict:
    """Canonical ground map ``(tensor gamma_i) -> (tensor gamma_alpha(j))`` duplicating, erasing and permuting blocks."""
    names = []
    for b in blocks:
        for n in b:
            if n not in names:
                names.append(n)
    out = {}
    for n in names:
        source, offsets = [], []
        for b in blocks:
            offsets.append(len(source))
            source.extend(b.get(n, ()))
        table = []
        for a in alpha.table:
            k = len(blocks[a - 1].get(n, ()))
            table.extend(offsets[a - 1] + i + 1 for i in range(k))
        out[n] = ground(tuple(source), IndexMap(tuple(table), len(source)))
    return out


def _co_seq(args, ms):
    if len(args) != len(ms):
        raise TypeMismatch("sequence length differs from the morphism arity")
    new, rs = [], []
    for bag, m in zip(args, ms):
        b, r = _co_bag(bag, m)
        new.append(b)
        rs.append(r)
    return tuple(new), _rsum(*rs)


# ---------------------------------------------------------------- contravariant

def _contra(t, queues: dict):
    """``t{theta}`` for nested ``theta`` given as per-variable occurrence queues."""
    if isinstance(t, Head):
        eta = queues[t.name].popleft()
        if eta.cod != t.type:
            raise TypeMismatch(f"contravariant action at {t.name}", format_type(t.type), format_type(eta.cod))
        args, nu2 = _contra_seq(t.args, queues)
        args, mu = _co_seq(args, spine_of(eta))
        head = {t.name: identity((eta.dom,))}
        return Head(t.name, eta.dom, args), _rsum(head, _rcompose(mu, nu2))
    if isinstance(t, Lam):
        saved = {n: queues.get(n) for n in t.names}
        inner = occ(t.body)
        for n in t.names:
            queues[n] = deque(identity(a) for a in inner.get(n, ()))
        try:
            body, nu = _contra(t.body, queues)
        finally:
            for n, q in saved.items():
                if q is None:
                    queues.pop(n, None)
                else:
                    queues[n] = q
        binders = tuple((n, compose(nu.get(n, _EMPTY), f)) for n, f in t.binders)
        return Lam(binders, body), {k: v for k, v in nu.items() if k not in t.names}
    fun, nu0 = _contra(t.fun, queues)
    args, nu1 = _contra_seq(t.args, queues)
    return Redex(fun, args), _rsum(nu0, nu1)


def _contra_seq(args, queues):
    new, rs = [], []
    for bag in args:
        b = []
        for s in bag:
            s2, r = _contra(s, queues)
            b.append(s2)
            rs.append(r)
        new.append(tuple(b))
    return tuple(new), _rsum(*rs)


def contravariant_term(t, theta: dict):
    """Act on a bare term with ``theta`` given as ``{name: ListMorphism}`` into its occurrence lists.

    Returns the new term and the residual as a dict of ground list morphisms.
    """
    found = occ(t)
    grounds, queues = {}, {}
    for n, m in theta.items():
        if m.cod != tuple(found.get(n, ())):
            raise ContextMismatch(f"morphism on {n} ends in {format_list(m.cod)}, "
                                  f"term uses {format_list(found.get(n, ()))}")
        g, nst = factorize(m)
        grounds[n] = g
        queues[n] = deque(nst.nested)
    for n, xs in found.items():
        if n not in queues:
            grounds[n] = identity(tuple(xs))
            queues[n] = deque(identity(a) for a in xs)
    new, nu = _contra(t, queues)
    out = {}
    for n, g in grounds.items():
        out[n] = compose(nu.get(n, identity(g.cod)), g)
    return new, out


def covariant_term(t, f):
    return _co(t, f)


def covariant_sequence(args, ms):
    return _co_seq(args, ms)


# ---------------------------------------------------------------- public API

def _residual(names, ctx: Context, r: dict) -> ContextMorphism:
    return ContextMorphism.from_dict(names, r, ctx)


def covariant(d: EtaDerivation, f) -> ActionResult:
    """``[f] d`` for ``f : type(d) -> b``; residual ``mu : context(d) -> new context``."""
    if f.dom != d.type:
        raise TypeMismatch("covariant action", format_type(d.type), format_type(f.dom))
    t, mu = _co(d.term, f)
    out = _rebuild(d.names, t)
    return ActionResult(out, _residual(d.names, d.context, mu))


def contravariant(d: EtaDerivation, theta: ContextMorphism) -> ActionResult:
    """``d{theta}`` for ``theta : delta -> context(d)``; residual ``nu : delta -> new context``."""
    if theta.target != d.context:
        raise ContextMismatch(f"morphism ends in {theta.target}, derivation context is {d.context}")
    t, nu = contravariant_term(d.term, theta.as_dict())
    out = _rebuild(d.names, t)
    return ActionResult(out, _residual(d.names, theta.source, nu))


def _rebuild(names, t) -> EtaDerivation:
    found = occ(t)
    return EtaDerivation(Context(tuple((n, tuple(found.get(n, ()))) for n in names)), t)


# ---------------------------------------------------------------- law checks

def compose_check(d: EtaDerivation, f, g) -> bool:
    """``[g]([f]d) = [gf]d`` with ``mu^{gf} = mu^g_{[f]d} . mu^f_d``."""
    r1 = covariant(d, f)
    r2 = covariant(r1.derivation, g)
    r = covariant(d, compose(g, f))
    return r2.derivation == r.derivation and compose(r2.residual, r1.residual) == r.residual


def compose_check_contra(d: EtaDerivation, theta: ContextMorphism, eta: ContextMorphism) -> bool:
    """``d{theta}{nu . eta} = d{theta . eta}`` with matching residuals."""
    r1 = contravariant(d, theta)
    r2 = contravariant(r1.derivation, compose(r1.residual, eta))
    r = contravariant(d, compose(theta, eta))
    return r2.derivation == r.derivation and r2.residual == r.residual


def interchange_check(d: EtaDerivation, f, theta: ContextMorphism) -> bool:
    """``[f](d{theta}) = ([f]d){mu . theta}`` with matching total residuals."""
    a1 = contravariant(d, theta)
    a2 = covariant(a1.derivation, f)
    b1 = covariant(d, f)
    b2 = contravariant(b1.derivation, compose(b1.residual, theta))
    return a2.derivation == b2.derivation and compose(a2.residual, a1.residual) == b2.residual


def identity_check(d: EtaDerivation) -> bool:
    a = covariant(d, identity(d.type))
    b = contravariant(d, ContextMorphism.identity(d.context))
    ident = ContextMorphism.identity(d.context)
    return a.derivation == d and b.derivation == d and a.residual == ident and b.residual == ident
