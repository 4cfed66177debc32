"""Text syntax for types, morphisms and terms.

Types ``o`` and ``[a1,...,ak] -o a``; morphisms ``id@<type>``,
``<[i1,...]; f1,...> : <src> -> <dst>``, ``c{a,n}``, ``w{[a,b],i}``,
``T{[...]}``, ``perm{[...],[...]}`` and ``m1 -o m2``; resource terms
``\\x^{<morph>}. s`` and ``s [t1,...,tk]``.
"""
from __future__ import annotations

import re

from .errors import ParseError, TypeMismatch, CalculusError
from .morph import (O, Arrow, AtomId, ArrowMorph, Context, IndexMap, ListMorphism,
                    format_list, identity, make_contraction, make_permutation,
                    make_projection, make_terminal)
from . import terms as T

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<sym>\|-|-o|->|\^\{|[\\{}\[\]();,.:<>@&*=])
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


def tokenize(text: str):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", pos))
    return out


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- primitives
    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value, k=0):
        return self.peek(k)[1] == value and self.peek(k)[0] != "eof"

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.next()
        if tok[1] != value or tok[0] == "eof":
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def ident(self):
        tok = self.next()
        if tok[0] != "ident":
            raise ParseError(f"expected a name, found {tok[1] or 'end of input'!r}", tok[2])
        return tok[1]

    def integer(self):
        tok = self.next()
        if tok[0] != "int":
            raise ParseError(f"expected a number, found {tok[1] or 'end of input'!r}", tok[2])
        return int(tok[1])

    def done(self):
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])

    # -- resource types
    def rtype(self):
        if self.at("o"):
            self.next()
            return O
        if self.at("["):
            xs = self.rlist()
            self.expect("-o")
            return Arrow(xs, self.rtype())
        tok = self.peek()
        raise ParseError(f"expected a type, found {tok[1] or 'end of input'!r}", tok[2])

    def rlist(self):
        self.expect("[")
        xs = []
        if not self.at("]"):
            xs.append(self.rtype())
            while self.at(","):
                self.next()
                xs.append(self.rtype())
        self.expect("]")
        return tuple(xs)

    def intlist(self):
        self.expect("[")
        xs = []
        if not self.at("]"):
            xs.append(self.integer())
            while self.at(","):
                self.next()
                xs.append(self.integer())
        self.expect("]")
        return tuple(xs)

    def _type_follows_arrow(self):
        return self.at("-o") and (self.at("o", 1) or self.at("[", 1))

    # -- morphisms
    def morph(self):
        left = self.morph_atom()
        if self.at("-o"):
            self.next()
            right = self.morph()
            if not isinstance(left, ListMorphism):
                raise ParseError("left side of -o must be a list morphism", self.peek()[2])
            if isinstance(right, ListMorphism):
                raise ParseError("right side of -o must be a type morphism", self.peek()[2])
            return ArrowMorph(left, right)
        return left

    def morph_atom(self):
        tok = self.peek()
        if self.at("("):
            self.next()
            m = self.morph()
            self.expect(")")
            return m
        if self.at("["):
            return identity(self.rlist())
        if self.at("<"):
            return self.full_list_morph()
        if tok[0] == "ident" and self.at("@", 1) and tok[1] == "id":
            self.next()
            self.next()
            if self.at("o"):
                self.next()
                return AtomId()
            xs = self.rlist()
            if self._type_follows_arrow():
                self.next()
                return identity(Arrow(xs, self.rtype()))
            return identity(xs)
        if tok[0] == "ident" and self.at("{", 1):
            name = self.next()[1]
            self.next()
            if name == "c":
                a = self.rtype()
                self.expect(",")
                n = self.integer()
                self.expect("}")
                return make_contraction(a, n)
            if name == "w":
                xs = self.rlist()
                self.expect(",")
                i = self.integer()
                self.expect("}")
                return make_projection(xs, i)
            if name == "T":
                xs = self.rlist()
                self.expect("}")
                return make_terminal(xs)
            if name == "perm":
                xs = self.rlist()
                self.expect(",")
                sigma = self.intlist()
                self.expect("}")
                return make_permutation(xs, sigma)
            raise ParseError(f"unknown morphism constructor {name!r}", tok[2])
        raise ParseError(f"expected a morphism, found {tok[1] or 'end of input'!r}", tok[2])

    def full_list_morph(self):
        self.expect("<")
        table = self.intlist()
        self.expect(";")
        nested = []
        if not self.at(">"):
            nested.append(self.morph())
            while self.at(","):
                self.next()
                nested.append(self.morph())
        self.expect(">")
        self.expect(":")
        src = self.rlist()
        self.expect("->")
        dst = self.rlist()
        m = ListMorphism(src, IndexMap(table, len(src)), tuple(nested))
        if m.cod != dst:
            raise TypeMismatch("declared target differs from the computed one", format_list(dst), format_list(m.cod))
        return m

    # -- resource terms
    def term(self):
        if self.at("\\"):
            self.next()
            x = self.ident()
            ann = None
            if self.at("^{"):
                self.next()
                ann = self.morph()
                self.expect("}")
                if not isinstance(ann, ListMorphism):
                    raise ParseError("an annotation must be a list morphism", self.peek()[2])
            self.expect(".")
            return T.Abs(x, ann, self.term())
        out = self.term_atom()
        while True:
            if self.at("["):
                out = T.App(out, self.bag())
            elif self.at("(") and self.at("[", 1):
                self.next()
                while self.at("["):
                    out = T.App(out, self.bag())
                self.expect(")")
            elif self.at("(") and self.at(")", 1):
                self.next()
                self.next()
            else:
                return out

    def term_atom(self):
        if self.at("("):
            self.next()
            t = self.term()
            self.expect(")")
            return t
        return T.Var(self.ident())

    def bag(self):
        self.expect("[")
        out = []
        if not self.at("]"):
            out.append(self.term())
            while self.at(","):
                self.next()
                out.append(self.term())
        self.expect("]")
        return tuple(out)

    # -- context declarations
    def context(self):
        entries = []
        while self.peek()[0] == "ident" and self.at(":", 1):
            x = self.ident()
            self.expect(":")
            entries.append((x, self.rlist()))
            if self.at(","):
                self.next()
        return Context(tuple(entries))


def parse_type(text: str):
    p = Parser(text)
    a = p.rtype()
    p.done()
    return a


def parse_list(text: str) -> tuple:
    p = Parser(text)
    xs = p.rlist()
    p.done()
    return xs


def parse_morphism(text: str):
    p = Parser(text)
    m = p.morph()
    p.done()
    return m


def parse_term(text: str):
    p = Parser(text)
    t = p.term()
    p.done()
    return t


def parse_context(text: str) -> Context:
    p = Parser(text)
    ctx = p.context()
    p.done()
    return ctx


def parse_context_morphism(text: str):
    """``x : <morph>, y : <morph>`` into a context morphism."""
    from .morph import ContextMorphism
    p = Parser(text)
    names, parts = [], []
    while p.peek()[0] == "ident":
        names.append(p.ident())
        p.expect(":")
        m = p.morph()
        if not isinstance(m, ListMorphism):
            raise ParseError("context morphism components must be list morphisms", p.peek()[2])
        parts.append(m)
        if p.at(","):
            p.next()
    p.done()
    return ContextMorphism(tuple(names), tuple(parts))


def parse_judgment(text: str):
    """A file body: context declarations, then ``|-`` and a term."""
    p = Parser(text)
    ctx = p.context()
    if p.at("|-"):
        p.next()
    t = p.term()
    p.done()
    return ctx, t


def load_derivation(text: str):
    """Parse and check; returns the eta-long typed term."""
    from .eta import eta_of
    ctx, t = parse_judgment(text)
    return eta_of(ctx, t)


def parse_eta(text: str, context: str = ""):
    """Parse a term (with optional context text) straight into eta-long form."""
    from .eta import eta_of
    ctx = parse_context(context) if context else Context(())
    return eta_of(ctx, parse_term(text))


__all__ = ["parse_type", "parse_list", "parse_morphism", "parse_term", "parse_context",
           "parse_context_morphism", "parse_judgment", "load_derivation", "parse_eta",
           "ParseError", "CalculusError"]
