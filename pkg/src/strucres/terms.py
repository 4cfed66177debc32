"""Structural resource terms and their syntax-directed typing."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import (AnnotationMismatch, OccurrenceCountMismatch, TypeClash,
                     UnboundVariable, ContextMismatch)
from .morph import (Arrow, Context, ListMorphism, format_list, format_morphism,
                    format_type, identity, is_identity)


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Abs:
    name: str
    annotation: Optional[ListMorphism]  # None: identity on whatever the checker expects
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    bag: tuple

    def __post_init__(self):
        if not isinstance(self.bag, tuple):
            object.__setattr__(self, "bag", tuple(self.bag))


Term = Union[Var, Abs, App]


def format_term(t) -> str:
    if isinstance(t, tuple):
        return "[" + ", ".join(format_term(s) for s in t) + "]"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Abs):
        ann = "" if t.annotation is None else "^{" + _format_annotation(t.annotation) + "}"
        return f"\\{t.name}{ann}. {format_term(t.body)}"
    fun = format_term(t.fun)
    if isinstance(t.fun, Abs):
        fun = f"({fun})"
    return f"{fun} {format_term(t.bag)}"


def _format_annotation(f: ListMorphism) -> str:
    if is_identity(f):
        return format_list(f.source)
    return format_morphism(f)


def free_vars(t) -> list:
    """Free variables in order of first occurrence."""
    out = []

    def go(t, bound):
        if isinstance(t, Var):
            if t.name not in bound and t.name not in out:
                out.append(t.name)
        elif isinstance(t, Abs):
            go(t.body, bound | {t.name})
        else:
            go(t.fun, bound)
            for s in t.bag:
                go(s, bound)

    go(t, frozenset())
    return out


def occurrences(s, x: str) -> int:
    if isinstance(s, tuple):
        return sum(occurrences(t, x) for t in s)
    if isinstance(s, Var):
        return int(s.name == x)
    if isinstance(s, Abs):
        return 0 if s.name == x else occurrences(s.body, x)
    return occurrences(s.fun, x) + occurrences(s.bag, x)


def term_size(t) -> int:
    """Judgment count: one per variable, abstraction and application, plus one per bag."""
    if isinstance(t, tuple):
        return 1 + sum(term_size(s) for s in t)
    if isinstance(t, Var):
        return 1
    if isinstance(t, Abs):
        return 1 + term_size(t.body)
    return 1 + term_size(t.fun) + term_size(t.bag)


# ---------------------------------------------------------------- derivations

@dataclass(frozen=True)
class Derivation:
    rule: str            # "var", "abs", "app" or "bag"
    term: object         # Term, or a tuple for bag nodes
    context: Context
    type: object         # ResourceType, or a tuple for bag nodes
    children: tuple = ()
    annotation: Optional[ListMorphism] = field(default=None)

    def subderivations(self):
        yield self
        for c in self.children:
            yield from c.subderivations()

    def __str__(self):
        return format_derivation(self)


def size(d: Derivation) -> int:
    return sum(1 for _ in d.subderivations())


def format_derivation(d: Derivation, indent: int = 0) -> str:
    """One node per line: rule, context, subject and type; children indented."""
    from .morph import format_context
    pad = "  " * indent
    lines = [f"{pad}{d.rule} | {format_context(d.context)} |- {format_term(d.term)} : {format_type(d.type)}"]
    for c in d.children:
        lines.append(format_derivation(c, indent + 1))
    return "\n".join(lines)


class _Checker:
    """Bottom-up checker; the i-th occurrence of a variable reads the i-th entry of its list."""

    def __init__(self, gamma: Context):
        self.names = gamma.names
        self.lists = {n: list(a) for n, a in gamma.entries}
        self.counters = {n: 0 for n in gamma.names}
        self.scope = []  # stack of (name, saved list, saved counter)

    def leaf_context(self, x, a) -> Context:
        return Context(tuple((n, (a,) if n == x else ()) for n in self.current_names()))

    def current_names(self):
        names = list(self.names)
        for n, _, _ in self.scope:
            if n not in names:
                names.append(n)
        return names

    def var(self, t: Var) -> Derivation:
        x = t.name
        if x not in self.lists:
            raise UnboundVariable(f"unbound variable {x}")
        i = self.counters[x]
        if i >= len(self.lists[x]):
            raise OccurrenceCountMismatch(f"{x} occurs more often than its {len(self.lists[x])} declared types")
        self.counters[x] = i + 1
        a = self.lists[x][i]
        return Derivation("var", t, self.leaf_context(x, a), a)

    def abs(self, t: Abs, expected=None) -> Derivation:
        f = t.annotation
        if f is None:
            if expected is None:
                raise AnnotationMismatch(f"cannot infer the annotation of {t.name}; write it explicitly")
            f = identity(expected.source)
        elif expected is not None and f.source != expected.source:
            raise TypeClash(f"abstraction over {t.name} has source {format_list(f.source)}, "
                            f"expected {format_list(expected.source)}")
        x = t.name
        self.scope.append((x, self.lists.get(x), self.counters.get(x)))
        self.lists[x] = list(f.cod)
        self.counters[x] = 0
        try:
            body = self.check(t.body, None if expected is None else expected.target)
            if self.counters[x] != len(f.cod):
                raise AnnotationMismatch(
                    f"annotation of {x} has codomain {format_list(f.cod)} but {x} occurs {self.counters[x]} times")
        finally:
            _, saved_list, saved_counter = self.scope.pop()
            if saved_list is None:
                del self.lists[x]
                del self.counters[x]
            else:
                self.lists[x] = saved_list
                self.counters[x] = saved_counter
        ctx = _drop_bound(body.context, x, self.current_names())
        term = Abs(x, f, body.term)
        return Derivation("abs", term, ctx, Arrow(f.source, body.type), (body,), f)

    def app(self, t: App, expected=None) -> Derivation:
        fun = self.check(t.fun)
        if not isinstance(fun.type, Arrow):
            raise TypeClash(f"{format_term(t.fun)} has type o and cannot be applied")
        want = fun.type.source
        if len(want) != len(t.bag):
            raise TypeClash(f"bag of {len(t.bag)} elements given where {format_list(want)} is demanded")
        kids = [self.check(s, a) for s, a in zip(t.bag, want)]
        for k, a in zip(kids, want):
            if k.type != a:
                raise TypeClash(
                    f"bag element {format_term(k.term)} has type {format_type(k.type)}, expected {format_type(a)}")
        names = self.current_names()
        bag_ctx = _tensor_all([k.context for k in kids], names)
        bag = Derivation("bag", tuple(k.term for k in kids), bag_ctx, tuple(want), tuple(kids))
        ctx = _tensor_all([fun.context, bag_ctx], names)
        if expected is not None and fun.type.target != expected:
            raise TypeClash(f"application has type {format_type(fun.type.target)}, expected {format_type(expected)}")
        return Derivation("app", App(fun.term, bag.term), ctx, fun.type.target, (fun, bag))

    def check(self, t, expected=None) -> Derivation:
        if isinstance(t, Var):
            d = self.var(t)
            if expected is not None and d.type != expected:
                raise TypeClash(f"{t.name} has type {format_type(d.type)}, expected {format_type(expected)}")
            return d
        if isinstance(t, Abs):
            if expected is not None and not isinstance(expected, Arrow):
                raise TypeClash("abstraction checked against type o")
            return self.abs(t, expected)
        return self.app(t, expected)


def _tensor_all(ctxs, names) -> Context:
    out = {n: () for n in names}
    for c in ctxs:
        for n, a in c.entries:
            out[n] = out.get(n, ()) + a
    return Context(tuple((n, out[n]) for n in names))


def _drop_bound(ctx: Context, x: str, outer_names) -> Context:
    d = ctx.as_dict()
    return Context(tuple((n, () if n == x else d.get(n, ())) for n in outer_names))


def check(gamma: Context, s, expected=None) -> Derivation:
    """The unique derivation of ``gamma |- s : a``; ``a`` is synthesized."""
    checker = _Checker(gamma)
    d = checker.check(s, expected)
    for n in gamma.names:
        if checker.counters[n] != len(gamma.lookup(n)):
            raise OccurrenceCountMismatch(
                f"{n} is declared with {len(gamma.lookup(n))} types but occurs {checker.counters[n]} times")
    if d.context != gamma:
        raise ContextMismatch(f"synthesized context {d.context} differs from {gamma}")
    return d


def infer_closed(s) -> Derivation:
    return check(Context(()), s)


def check_open(s, types: dict) -> Derivation:
    """Check against the context listing ``types[x]`` for every free variable, in first-occurrence order."""
    names = free_vars(s)
    return check(Context(tuple((n, tuple(types[n])) for n in names)), s)
