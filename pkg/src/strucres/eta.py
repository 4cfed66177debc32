"""Resource terms in eta-long form.

Every application is total and of type ``o``.  Each variable occurrence
carries its own type, so a term determines its unique derivation: the
context is the left-to-right list of occurrence types of each free variable.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Union

from .errors import (AnnotationMismatch, ContextMismatch, InvalidPosition,
                     NotEtaLong, TypeClash, UnboundVariable)
from .morph import (O, Arrow, Context, arrows, format_list,
                    format_type, identity, spine)
from . import terms as T


@dataclass(frozen=True)
class Head:
    """``x q_1 ... q_n`` with ``x`` at the stated type; total application."""
    name: str
    type: object
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(tuple(b) for b in self.args))


@dataclass(frozen=True)
class Lam:
    """``\\(x_1^{f_1} ... x_n^{f_n}). body`` with ``body : o``."""
    binders: tuple
    body: object

    def __post_init__(self):
        object.__setattr__(self, "binders", tuple((n, f) for n, f in self.binders))

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self.binders)

    @property
    def annotations(self) -> tuple:
        return tuple(f for _, f in self.binders)


@dataclass(frozen=True)
class Redex:
    """``(\\x.. s) q_1 ... q_n``, again total."""
    fun: Lam
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(tuple(b) for b in self.args))


EtaTerm = Union[Head, Lam, Redex]


def type_of(t):
    if isinstance(t, Lam):
        return arrows(tuple(f.source for f in t.annotations))
    return O


def eta_type(a) -> tuple:
    """``a`` read as ``(a_1 ... a_n) -o o``; returns the tuple of argument lists."""
    return spine(a)


def from_eta_type(lists) -> object:
    return arrows(lists)


# ---------------------------------------------------------------- traversal

def occ(t, out=None) -> dict:
    """Free occurrence types per variable, left to right."""
    if out is None:
        out = {}
    if isinstance(t, Head):
        out.setdefault(t.name, []).append(t.type)
        for bag in t.args:
            for s in bag:
                occ(s, out)
    elif isinstance(t, Lam):
        inner = occ(t.body, {})
        for n in t.names:
            inner.pop(n, None)
        for n, xs in inner.items():
            out.setdefault(n, []).extend(xs)
    else:
        occ(t.fun, out)
        for bag in t.args:
            for s in bag:
                occ(s, out)
    return out


def occ_seq(args) -> dict:
    out = {}
    for bag in args:
        for s in bag:
            occ(s, out)
    return out


def free_names(t) -> list:
    return list(occ(t).keys())


def all_names(t, out=None) -> set:
    if out is None:
        out = set()
    if isinstance(t, Head):
        out.add(t.name)
        for bag in t.args:
            for s in bag:
                all_names(s, out)
    elif isinstance(t, Lam):
        out.update(t.names)
        all_names(t.body, out)
    else:
        all_names(t.fun, out)
        for bag in t.args:
            for s in bag:
                all_names(s, out)
    return out


def eta_size(t) -> int:
    """Size of the corresponding curried derivation (bags counted as nodes)."""
    if isinstance(t, Head):
        return 1 + sum(2 + sum(eta_size(s) for s in bag) for bag in t.args)
    if isinstance(t, Lam):
        return len(t.binders) + eta_size(t.body)
    return eta_size(t.fun) + sum(2 + sum(eta_size(s) for s in bag) for bag in t.args)


def validate(t):
    """Raise unless ``t`` is a well-typed eta-long term; returns its type."""
    if isinstance(t, Head):
        lists = spine(t.type)
        if len(lists) != len(t.args):
            raise NotEtaLong(f"{t.name} : {format_type(t.type)} applied to {len(t.args)} bags")
        for want, bag in zip(lists, t.args):
            _check_bag(bag, want)
        return O
    if isinstance(t, Lam):
        if not t.binders:
            raise NotEtaLong("abstraction without binders")
        if len(set(t.names)) != len(t.names):
            raise NotEtaLong(f"repeated binder in {t.names}")
        if validate(t.body) != O:
            raise NotEtaLong("abstraction body must have type o")
        inner = occ(t.body)
        for n, f in t.binders:
            got = tuple(inner.get(n, ()))
            if got != f.cod:
                raise AnnotationMismatch(f"annotation of {n} ends in {format_list(f.cod)} "
                                         f"but the body uses {format_list(got)}")
        return type_of(t)
    if not isinstance(t.fun, Lam):
        raise NotEtaLong("redex head must be an abstraction")
    validate(t.fun)
    lists = tuple(f.source for f in t.fun.annotations)
    if len(lists) != len(t.args):
        raise NotEtaLong("redex must be totally applied")
    for want, bag in zip(lists, t.args):
        _check_bag(bag, want)
    return O


def _check_bag(bag, want):
    if len(bag) != len(want):
        raise TypeClash(f"bag of {len(bag)} elements where {format_list(want)} is demanded")
    for s, a in zip(bag, want):
        got = validate(s)
        if got != a:
            raise TypeClash(f"bag element of type {format_type(got)} where {format_type(a)} is demanded")


# ---------------------------------------------------------------- typed wrapper

@dataclass(frozen=True)
class EtaDerivation:
    """``context |- term : type`` for an eta-long term; validated at construction."""
    context: Context
    term: object

    def __post_init__(self):
        validate(self.term)
        found = occ(self.term)
        for n in found:
            if n not in self.context:
                raise UnboundVariable(f"unbound variable {n}")
        for n, a in self.context.entries:
            if tuple(found.get(n, ())) != a:
                raise ContextMismatch(f"{n} is declared {format_list(a)} but occurs as {format_list(found.get(n, ()))}")

    @cached_property
    def type(self):
        return type_of(self.term)

    @property
    def names(self) -> tuple:
        return self.context.names

    def __str__(self):
        return f"{self.context} |- {format_eta(self.term)} : {format_type(self.type)}"


def derive(term, names=None) -> EtaDerivation:
    """Wrap a term, listing its free variables in ``names`` order (first occurrence by default)."""
    found = occ(term)
    if names is None:
        names = list(found)
    else:
        names = list(names) + [n for n in found if n not in names]
    return EtaDerivation(Context(tuple((n, tuple(found.get(n, ()))) for n in names)), term)


# ---------------------------------------------------------------- conversions

class _Fresh:
    def __init__(self, used):
        self.used = set(used)
        self.counter = itertools.count(1)

    def __call__(self, base="e"):
        while True:
            name = f"{base}{next(self.counter)}"
            if name not in self.used:
                self.used.add(name)
                return name


def expand_var(x: str, a, fresh) -> object:
    """The eta-expansion of a variable occurrence at type ``a``."""
    lists = spine(a)
    if not lists:
        return Head(x, a, ())
    ys = [fresh() for _ in lists]
    body = Head(x, a, tuple(tuple(expand_var(y, b, fresh) for b in xs) for y, xs in zip(ys, lists)))
    return Lam(tuple((y, identity(xs)) for y, xs in zip(ys, lists)), body)


def _surface_names(t, out):
    if isinstance(t, T.Var):
        out.add(t.name)
    elif isinstance(t, T.Abs):
        out.add(t.name)
        _surface_names(t.body, out)
    else:
        _surface_names(t.fun, out)
        for s in t.bag:
            _surface_names(s, out)
    return out


def to_eta_long(d: T.Derivation) -> EtaDerivation:
    """Regroup curried abstractions and applications; eta-expand partial applications."""
    fresh = _Fresh(_surface_names(d.term, set()) | set(d.context.names))

    def go(d):
        if d.rule == "var":
            return expand_var(d.term.name, d.type, fresh)
        if d.rule == "abs":
            binders = []
            node = d
            while node.rule == "abs":
                binders.append((node.term.name, node.annotation))
                node = node.children[0]
            body = go(node)
            if isinstance(node.type, Arrow):
                return Lam(tuple(binders) + body.binders, body.body)
            return Lam(tuple(binders), body)
        bags = []
        node = d
        while node.rule == "app":
            bags.insert(0, tuple(go(k) for k in node.children[1].children))
            node = node.children[0]
        extra = spine(d.type)
        zs = [fresh() for _ in extra]
        zbags = [tuple(expand_var(z, b, fresh) for b in xs) for z, xs in zip(zs, extra)]
        if node.rule == "var":
            core = Head(node.term.name, node.type, tuple(bags) + tuple(zbags))
        else:
            core = Redex(go(node), tuple(bags) + tuple(zbags))
        if extra:
            return Lam(tuple((z, identity(xs)) for z, xs in zip(zs, extra)), core)
        return core

    return EtaDerivation(d.context, go(d))


def to_surface(t):
    if isinstance(t, Head):
        out = T.Var(t.name)
        for bag in t.args:
            out = T.App(out, tuple(to_surface(s) for s in bag))
        return out
    if isinstance(t, Lam):
        out = to_surface(t.body)
        for n, f in reversed(t.binders):
            out = T.Abs(n, f, out)
        return out
    out = to_surface(t.fun)
    for bag in t.args:
        out = T.App(out, tuple(to_surface(s) for s in bag))
    return out


def from_eta_long(e: EtaDerivation) -> T.Derivation:
    return T.check(e.context, to_surface(e.term))


def eta_of(gamma: Context, s) -> EtaDerivation:
    return to_eta_long(T.check(gamma, s))


def format_eta(t) -> str:
    return T.format_term(to_surface(t))


def format_sequence(args) -> str:
    return "(" + " ".join(T.format_term(tuple(to_surface(s) for s in bag)) for bag in args) + ")"


# ---------------------------------------------------------------- positions

def children(t):
    """Pairs (step, subterm) in left-to-right order."""
    if isinstance(t, Lam):
        return [("body", t.body)]
    out = []
    if isinstance(t, Redex):
        out.append(("fun", t.fun))
    for i, bag in enumerate(t.args, 1):
        for j, s in enumerate(bag, 1):
            out.append((f"{i}.{j}", s))
    return out


def subterm(t, path):
    for step in path:
        t = _child(t, step)
    return t


def _child(t, step):
    if step == "body" and isinstance(t, Lam):
        return t.body
    if step == "fun" and isinstance(t, Redex):
        return t.fun
    if isinstance(t, (Head, Redex)) and "." in step:
        i, j = (int(v) for v in step.split("."))
        try:
            return t.args[i - 1][j - 1]
        except IndexError:
            pass
    raise InvalidPosition(f"no subterm at step {step!r}")


def replace(t, path, new):
    if not path:
        return new
    step, rest = path[0], path[1:]
    child = replace(_child(t, step), rest, new)
    if step == "body":
        return Lam(t.binders, child)
    if step == "fun":
        return Redex(child, t.args)
    i, j = (int(v) for v in step.split("."))
    args = list(t.args)
    bag = list(args[i - 1])
    bag[j - 1] = child
    args[i - 1] = tuple(bag)
    if isinstance(t, Head):
        return Head(t.name, t.type, tuple(args))
    return Redex(t.fun, tuple(args))


def format_path(path) -> str:
    return "/".join(path) if path else "."


def parse_path(text: str) -> tuple:
    text = text.strip()
    if text in ("", "."):
        return ()
    return tuple(text.split("/"))


# ---------------------------------------------------------------- renaming

def rename_free(t, old: str, new: str):
    if isinstance(t, Head):
        name = new if t.name == old else t.name
        return Head(name, t.type, tuple(tuple(rename_free(s, old, new) for s in bag) for bag in t.args))
    if isinstance(t, Lam):
        if old in t.names:
            return t
        return Lam(t.binders, rename_free(t.body, old, new))
    return Redex(rename_free(t.fun, old, new), tuple(tuple(rename_free(s, old, new) for s in bag) for bag in t.args))


def canonical(t, counter=None):
    """Rename bound variables to ``_1, _2, ...`` in binder order; equality of results is alpha-equivalence."""
    if counter is None:
        counter = itertools.count(1)
    if isinstance(t, Head):
        return Head(t.name, t.type, tuple(tuple(canonical(s, counter) for s in bag) for bag in t.args))
    if isinstance(t, Lam):
        body = t.body
        binders = []
        for n, f in t.binders:
            m = f"_{next(counter)}"
            body = rename_free(body, n, m)
            binders.append((m, f))
        return Lam(tuple(binders), canonical(body, counter))
    return Redex(canonical(t.fun, counter), tuple(tuple(canonical(s, counter) for s in bag) for bag in t.args))


def alpha_eq(s, t) -> bool:
    return canonical(s) == canonical(t)
