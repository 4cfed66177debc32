"""Ordinary lambda-terms, simple and idempotent intersection types, and beta-reduction."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .errors import InvalidPosition, NotARedex, ParseError
from .syntax import tokenize


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class Base:
    def __str__(self):
        return "o"


BASE = Base()


def enum_key(a) -> tuple:
    """Structural total order on types: the base type first, arrows by (sorted source, target)."""
    if isinstance(a, Base):
        return (0,)
    return (1, tuple(enum_key(s) for s in a.source), enum_key(a.target))


@dataclass(frozen=True)
class Fn:
    """``A_1 & ... & A_k => B``; the source is kept sorted and duplicate-free, so a
    simple arrow is the singleton case."""
    source: tuple
    target: object

    def __post_init__(self):
        src = tuple(sorted(set(self.source), key=enum_key))
        if not src:
            from .errors import RuleViolation
            raise RuleViolation("an intersection needs at least one member")
        object.__setattr__(self, "source", src)

    def __str__(self):
        return format_ltype(self)


LType = Union[Base, Fn]


def simple(a, b) -> Fn:
    return Fn((a,), b)


def intersection(*members) -> tuple:
    return tuple(sorted(set(members), key=enum_key))


def type_enum_order(a, b) -> int:
    """-1, 0 or 1."""
    ka, kb = enum_key(a), enum_key(b)
    return (ka > kb) - (ka < kb)


def is_simple_type(a) -> bool:
    if isinstance(a, Base):
        return True
    return len(a.source) == 1 and is_simple_type(a.source[0]) and is_simple_type(a.target)


def lspine(a) -> tuple:
    out = []
    while isinstance(a, Fn):
        out.append(a.source)
        a = a.target
    return tuple(out)


def format_ltype(a) -> str:
    if isinstance(a, Base):
        return "o"
    if len(a.source) == 1:
        s = a.source[0]
        left = format_ltype(s) if isinstance(s, Base) else f"({format_ltype(s)})"
    else:
        left = "{" + ", ".join(format_ltype(s) for s in a.source) + "}"
    return f"{left} -> {format_ltype(a.target)}"


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class LVar:
    name: str


@dataclass(frozen=True)
class LAbs:
    name: str
    body: "LambdaTerm"
    type: Optional[object] = None  # a type or an intersection tuple


@dataclass(frozen=True)
class LApp:
    fun: "LambdaTerm"
    arg: "LambdaTerm"


LambdaTerm = Union[LVar, LAbs, LApp]


def format_lambda(m) -> str:
    if isinstance(m, LVar):
        return m.name
    if isinstance(m, LAbs):
        ann = ""
        if m.type is not None:
            ann = ":" + (format_ltype(m.type) if not isinstance(m.type, tuple) else
                         "{" + ", ".join(format_ltype(a) for a in m.type) + "}")
        return f"\\{m.name}{ann}. {format_lambda(m.body)}"
    fun = format_lambda(m.fun)
    if isinstance(m.fun, LAbs):
        fun = f"({fun})"
    arg = format_lambda(m.arg)
    if not isinstance(m.arg, LVar):
        arg = f"({arg})"
    return f"{fun} {arg}"


def lfree(m, bound=frozenset()) -> list:
    out = []

    def go(m, bound):
        if isinstance(m, LVar):
            if m.name not in bound and m.name not in out:
                out.append(m.name)
        elif isinstance(m, LAbs):
            go(m.body, bound | {m.name})
        else:
            go(m.fun, bound)
            go(m.arg, bound)

    go(m, frozenset(bound))
    return out


def lnames(m, out=None) -> set:
    if out is None:
        out = set()
    if isinstance(m, LVar):
        out.add(m.name)
    elif isinstance(m, LAbs):
        out.add(m.name)
        lnames(m.body, out)
    else:
        lnames(m.fun, out)
        lnames(m.arg, out)
    return out


def strip_types(m):
    if isinstance(m, LVar):
        return m
    if isinstance(m, LAbs):
        return LAbs(m.name, strip_types(m.body))
    return LApp(strip_types(m.fun), strip_types(m.arg))


def lcanonical(m, counter=None, env=None):
    """Bound names renamed ``_1, _2, ...``; annotations dropped."""
    counter = counter or itertools.count(1)
    env = env or {}
    if isinstance(m, LVar):
        return LVar(env.get(m.name, m.name))
    if isinstance(m, LAbs):
        new = f"_{next(counter)}"
        return LAbs(new, lcanonical(m.body, counter, {**env, m.name: new}))
    return LApp(lcanonical(m.fun, counter, env), lcanonical(m.arg, counter, env))


def lalpha_eq(m, n) -> bool:
    return lcanonical(m) == lcanonical(n)


def lsize(m) -> int:
    if isinstance(m, LVar):
        return 1
    if isinstance(m, LAbs):
        return 1 + lsize(m.body)
    return 1 + lsize(m.fun) + lsize(m.arg)


def count_free(m, x: str) -> int:
    if isinstance(m, LVar):
        return int(m.name == x)
    if isinstance(m, LAbs):
        return 0 if m.name == x else count_free(m.body, x)
    return count_free(m.fun, x) + count_free(m.arg, x)


# ---------------------------------------------------------------- substitution and beta

def fresh_name(base: str, avoid) -> str:
    base = base.rstrip("0123456789'") or "v"
    for i in itertools.count(1):
        cand = f"{base}{i}"
        if cand not in avoid:
            return cand


def lsubst(m, x: str, n):
    """Capture-avoiding ``m[n/x]``."""
    if isinstance(m, LVar):
        return n if m.name == x else m
    if isinstance(m, LApp):
        return LApp(lsubst(m.fun, x, n), lsubst(m.arg, x, n))
    if m.name == x:
        return m
    if m.name in lfree(n) and x in lfree(m.body):
        new = fresh_name(m.name, lnames(m.body) | lnames(n) | {x})
        body = lsubst(m.body, m.name, LVar(new))
        return LAbs(new, lsubst(body, x, n), m.type)
    return LAbs(m.name, lsubst(m.body, x, n), m.type)


def lsubterm(m, path):
    for step in path:
        if step == "body" and isinstance(m, LAbs):
            m = m.body
        elif step == "fun" and isinstance(m, LApp):
            m = m.fun
        elif step == "arg" and isinstance(m, LApp):
            m = m.arg
        else:
            raise InvalidPosition(f"no subterm at step {step!r}")
    return m


def lreplace(m, path, new):
    if not path:
        return new
    step, rest = path[0], path[1:]
    if step == "body" and isinstance(m, LAbs):
        return LAbs(m.name, lreplace(m.body, rest, new), m.type)
    if step == "fun" and isinstance(m, LApp):
        return LApp(lreplace(m.fun, rest, new), m.arg)
    if step == "arg" and isinstance(m, LApp):
        return LApp(m.fun, lreplace(m.arg, rest, new))
    raise InvalidPosition(f"no subterm at step {step!r}")


def beta_redexes(m, path=()) -> list:
    """Positions of beta-redexes, leftmost-outermost first."""
    out = []
    if isinstance(m, LApp):
        if isinstance(m.fun, LAbs):
            out.append(path)
        out += beta_redexes(m.fun, path + ("fun",))
        out += beta_redexes(m.arg, path + ("arg",))
    elif isinstance(m, LAbs):
        out += beta_redexes(m.body, path + ("body",))
    return out


def beta_step(m, position=None):
    """Contract the redex at ``position`` (the leftmost-outermost one by default)."""
    if position is None:
        rs = beta_redexes(m)
        if not rs:
            raise NotARedex("term is beta-normal")
        position = rs[0]
    r = lsubterm(m, tuple(position))
    if not (isinstance(r, LApp) and isinstance(r.fun, LAbs)):
        raise InvalidPosition("no beta-redex at this position")
    return lreplace(m, tuple(position), lsubst(r.fun.body, r.fun.name, r.arg))


def beta_normalize(m, budget: int = 10000):
    steps = 0
    while beta_redexes(m):
        if steps >= budget:
            from .errors import StepBudgetExceeded
            raise StepBudgetExceeded(f"no beta-normal form within {budget} steps")
        m = beta_step(m)
        steps += 1
    return m, steps


# ---------------------------------------------------------------- parsing

class _LParser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, v, k=0):
        tok = self.peek(k)
        return tok[1] == v and tok[0] != "eof"

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, v):
        tok = self.next()
        if tok[1] != v or tok[0] == "eof":
            raise ParseError(f"expected {v!r}, found {tok[1] or 'end of input'!r}", tok[2])

    def ident(self):
        tok = self.next()
        if tok[0] != "ident":
            raise ParseError(f"expected a name, found {tok[1] or 'end of input'!r}", tok[2])
        return tok[1]

    def done(self):
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])

    def ltype(self):
        left = self.source()
        if self.at("->"):
            self.next()
            return Fn(left, self.ltype())
        if len(left) != 1:
            raise ParseError("an intersection can only appear left of an arrow", self.peek()[2])
        return left[0]

    def source(self) -> tuple:
        if self.at("{"):
            self.next()
            xs = [self.ltype()]
            while self.at(","):
                self.next()
                xs.append(self.ltype())
            self.expect("}")
            return tuple(xs)
        return (self.atom_type(),)

    def atom_type(self):
        if self.at("("):
            self.next()
            a = self.ltype()
            self.expect(")")
            return a
        if self.at("o") or self.at("*"):
            self.next()
            return BASE
        tok = self.peek()
        raise ParseError(f"expected a type, found {tok[1] or 'end of input'!r}", tok[2])

    def binder_type(self):
        if self.at("{"):
            save = self.i
            src = self.source()
            if self.at("->"):
                self.i = save
                return self.ltype()
            return intersection(*src)
        return self.ltype()

    def term(self):
        if self.at("\\"):
            self.next()
            x = self.ident()
            ann = None
            if self.at(":"):
                self.next()
                ann = self.binder_type()
            self.expect(".")
            return LAbs(x, self.term(), ann)
        out = self.atom()
        while self.peek()[0] == "ident" or self.at("(") or self.at("\\"):
            if self.at("\\"):
                out = LApp(out, self.term())
                break
            out = LApp(out, self.atom())
        return out

    def atom(self):
        if self.at("("):
            self.next()
            m = self.term()
            self.expect(")")
            return m
        return LVar(self.ident())


def parse_lambda(text: str):
    p = _LParser(text)
    m = p.term()
    p.done()
    return m


def parse_ltype(text: str):
    p = _LParser(text)
    a = p.ltype()
    p.done()
    return a


def parse_lcontext(text: str) -> dict:
    """``x : A, y : {A, B}`` into a dict of types or intersections."""
    p = _LParser(text)
    out = {}
    while p.peek()[0] == "ident":
        x = p.ident()
        p.expect(":")
        out[x] = p.binder_type()
        if p.at(","):
            p.next()
    p.done()
    return out
