"""Resource types, index maps and the categories of type morphisms.

Index maps are stored as 1-based tables.  A list morphism
``<alpha; f_1..f_l> : <a_1..a_k> -> <b_1..b_l>`` carries a backward map
``alpha : [l] -> [k]`` and, for every output position ``i``, a nested
morphism ``f_i : a_alpha(i) -> b_i``.  Only the source is stored; the
target is always recomputed from the nested morphisms.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Sequence, Union

from .errors import IndexOutOfRange, SizeMismatch, TypeMismatch, VariableMismatch


class Flavor(Enum):
    LINEAR = "linear"
    CARTESIAN = "cartesian"


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class Atom:
    def __str__(self):
        return "o"


O = Atom()


@dataclass(frozen=True)
class Arrow:
    source: tuple
    target: "ResourceType"

    def __post_init__(self):
        if not isinstance(self.source, tuple):
            object.__setattr__(self, "source", tuple(self.source))

    def __str__(self):
        return format_type(self)


ResourceType = Union[Atom, Arrow]
IntersectionType = tuple  # ordered tuple of ResourceType


def format_type(a) -> str:
    if isinstance(a, Atom):
        return "o"
    if isinstance(a, tuple):
        return format_list(a)
    return f"{format_list(a.source)} -o {format_type(a.target)}"


def format_list(xs) -> str:
    return "[" + ",".join(format_type(x) for x in xs) + "]"


def arrows(lists: Sequence[tuple], target=O):
    """Curried type ``lists[0] -o (lists[1] -o ... target)``."""
    out = target
    for xs in reversed(tuple(lists)):
        out = Arrow(tuple(xs), out)
    return out


def spine(a) -> tuple:
    """Argument lists of ``a`` read as ``(a_1 ... a_n) -o o``."""
    out = []
    while isinstance(a, Arrow):
        out.append(a.source)
        a = a.target
    return tuple(out)


def type_depth(a) -> int:
    if isinstance(a, Atom):
        return 0
    inner = max((type_depth(x) for x in a.source), default=0)
    return 1 + max(inner, type_depth(a.target) - 1)


# ---------------------------------------------------------------- index maps

@dataclass(frozen=True)
class IndexMap:
    table: tuple
    codomain: int

    def __post_init__(self):
        if not isinstance(self.table, tuple):
            object.__setattr__(self, "table", tuple(self.table))
        for v in self.table:
            if not 1 <= v <= self.codomain:
                raise IndexOutOfRange(f"entry {v} outside [1..{self.codomain}]")

    @property
    def domain(self) -> int:
        return len(self.table)

    def __call__(self, i: int) -> int:
        return self.table[i - 1]

    @staticmethod
    def identity(n: int) -> "IndexMap":
        return IndexMap(tuple(range(1, n + 1)), n)

    def is_identity(self) -> bool:
        return self.domain == self.codomain and all(v == i + 1 for i, v in enumerate(self.table))

    def is_bijection(self) -> bool:
        return self.domain == self.codomain and sorted(self.table) == list(range(1, self.codomain + 1))

    def inverse(self) -> "IndexMap":
        if not self.is_bijection():
            raise IndexOutOfRange("only bijections have inverses")
        inv = [0] * self.domain
        for i, v in enumerate(self.table):
            inv[v - 1] = i + 1
        return IndexMap(tuple(inv), self.domain)

    def __str__(self):
        return "[" + ",".join(map(str, self.table)) + "]"


def apply_index(xs: Sequence, alpha: IndexMap) -> tuple:
    if alpha.codomain != len(xs):
        raise IndexOutOfRange(f"map into [{alpha.codomain}] applied to a list of length {len(xs)}")
    return tuple(xs[v - 1] for v in alpha.table)


def compose_index(alpha: IndexMap, beta: IndexMap) -> IndexMap:
    """``alpha . beta``, i.e. ``i |-> alpha(beta(i))``."""
    if alpha.domain != beta.codomain:
        raise SizeMismatch(f"cannot compose a map from [{alpha.domain}] after one into [{beta.codomain}]")
    return IndexMap(tuple(alpha.table[v - 1] for v in beta.table), alpha.codomain)


def sum_index(alpha: IndexMap, beta: IndexMap) -> IndexMap:
    shift = alpha.codomain
    return IndexMap(alpha.table + tuple(v + shift for v in beta.table), alpha.codomain + beta.codomain)


# ---------------------------------------------------------------- morphisms

@dataclass(frozen=True)
class AtomId:
    @property
    def dom(self):
        return O

    @property
    def cod(self):
        return O

    def __str__(self):
        return "id@o"


@dataclass(frozen=True, eq=True)
class ListMorphism:
    source: tuple
    alpha: IndexMap
    nested: tuple

    def __post_init__(self):
        if not isinstance(self.source, tuple):
            object.__setattr__(self, "source", tuple(self.source))
        if not isinstance(self.nested, tuple):
            object.__setattr__(self, "nested", tuple(self.nested))
        if self.alpha.codomain != len(self.source):
            raise SizeMismatch(f"index map into [{self.alpha.codomain}] but source has length {len(self.source)}")
        if self.alpha.domain != len(self.nested):
            raise SizeMismatch(f"index map from [{self.alpha.domain}] but {len(self.nested)} nested morphisms")
        for i, f in enumerate(self.nested):
            want = self.source[self.alpha.table[i] - 1]
            if f.dom != want:
                raise TypeMismatch(f"nested morphism {i + 1} has the wrong domain", want, f.dom)

    @property
    def dom(self):
        return self.source

    @cached_property
    def cod(self) -> tuple:
        return tuple(f.cod for f in self.nested)

    @property
    def target(self) -> tuple:
        return self.cod

    def __len__(self):
        return len(self.nested)

    def __str__(self):
        return format_morphism(self)


@dataclass(frozen=True)
class ArrowMorph:
    """``left -o right : (cod(left) -o dom(right)) -> (dom(left) -o cod(right))``."""
    left: ListMorphism
    right: "TypeMorphism"

    @cached_property
    def dom(self):
        return Arrow(self.left.cod, self.right.dom)

    @cached_property
    def cod(self):
        return Arrow(self.left.source, self.right.cod)

    def __str__(self):
        return format_morphism(self)


TypeMorphism = Union[AtomId, ArrowMorph]


def identity(a):
    """Identity on a resource type, or on a list when given a tuple."""
    if isinstance(a, tuple):
        return ListMorphism(a, IndexMap.identity(len(a)), tuple(identity(x) for x in a))
    if isinstance(a, Atom):
        return AtomId()
    return ArrowMorph(identity(a.source), identity(a.target))


def compose(g, f):
    """``g . f`` for type, list or context morphisms; ``f`` acts first."""
    if isinstance(f, ContextMorphism):
        if not isinstance(g, ContextMorphism) or g.names != f.names:
            raise VariableMismatch("context morphisms over different variables")
        return ContextMorphism(f.names, tuple(compose(gp, fp) for gp, fp in zip(g.parts, f.parts)))
    if isinstance(f, ListMorphism):
        if not isinstance(g, ListMorphism):
            raise TypeMismatch("list morphism composed with a type morphism")
        if f.cod != g.source:
            raise TypeMismatch("boundary mismatch in composition", format_list(f.cod), format_list(g.source))
        nested = tuple(compose(gj, f.nested[b - 1]) for gj, b in zip(g.nested, g.alpha.table))
        return ListMorphism(f.source, compose_index(f.alpha, g.alpha), nested)
    if f.cod != g.dom:
        raise TypeMismatch("boundary mismatch in composition", format_type(f.cod), format_type(g.dom))
    if isinstance(f, AtomId):
        return AtomId()
    return ArrowMorph(compose(f.left, g.left), compose(g.right, f.right))


def is_identity(m) -> bool:
    if isinstance(m, AtomId):
        return True
    if isinstance(m, ArrowMorph):
        return is_identity(m.left) and is_identity(m.right)
    if isinstance(m, ContextMorphism):
        return all(is_identity(p) for p in m.parts)
    return m.alpha.is_identity() and all(is_identity(f) for f in m.nested)


def is_linear(m) -> bool:
    if isinstance(m, AtomId):
        return True
    if isinstance(m, ArrowMorph):
        return is_linear(m.left) and is_linear(m.right)
    if isinstance(m, ContextMorphism):
        return all(is_linear(p) for p in m.parts)
    return m.alpha.is_bijection() and all(is_linear(f) for f in m.nested)


def is_ground(m) -> bool:
    if isinstance(m, ContextMorphism):
        return all(is_ground(p) for p in m.parts)
    return all(is_identity(f) for f in m.nested)


def is_permutation(m) -> bool:
    """Ground and bijective: a pure reshuffling of positions."""
    if isinstance(m, ContextMorphism):
        return all(is_permutation(p) for p in m.parts)
    return m.alpha.is_bijection() and is_ground(m)


def morphism_depth(m) -> int:
    if isinstance(m, AtomId):
        return 0
    if isinstance(m, ArrowMorph):
        return max(morphism_depth(m.left), morphism_depth(m.right))
    return 1 + max((morphism_depth(f) for f in m.nested), default=0)


def check_flavor(m, flavor: Flavor):
    if flavor is Flavor.LINEAR and not is_linear(m):
        raise IndexOutOfRange("non-bijective index map in the linear flavor")
    return m


# ---------------------------------------------------------------- constructions

def ground(source: tuple, alpha: IndexMap) -> ListMorphism:
    """``<alpha; id, ..., id> : source -> source^[alpha]``."""
    return ListMorphism(source, alpha, tuple(identity(x) for x in apply_index(source, alpha)))


def nest(nested: Sequence) -> ListMorphism:
    """``<id; f_1..f_l>``."""
    nested = tuple(nested)
    return ListMorphism(tuple(f.dom for f in nested), IndexMap.identity(len(nested)), nested)


def factorize(m):
    """Split ``m`` into ``(ground part, nested part)`` with ``m = nested . ground``."""
    if isinstance(m, ContextMorphism):
        pairs = [factorize(p) for p in m.parts]
        return (ContextMorphism(m.names, tuple(p[0] for p in pairs)),
                ContextMorphism(m.names, tuple(p[1] for p in pairs)))
    return ground(m.source, m.alpha), nest(m.nested)


def make_contraction(a, n: int, flavor: Flavor = Flavor.CARTESIAN) -> ListMorphism:
    """The n-ary diagonal ``<a> -> <a,...,a>``; n = 0 is the terminal map, n = 1 the identity."""
    if n < 0:
        raise IndexOutOfRange("contraction arity must be non-negative")
    return check_flavor(ground((a,), IndexMap((1,) * n, 1)), flavor)


def make_projection(xs: tuple, i: int, flavor: Flavor = Flavor.CARTESIAN) -> ListMorphism:
    if not 1 <= i <= len(xs):
        raise IndexOutOfRange(f"projection {i} out of a list of length {len(xs)}")
    return check_flavor(ground(tuple(xs), IndexMap((i,), len(xs))), flavor)


def make_terminal(xs: tuple, flavor: Flavor = Flavor.CARTESIAN) -> ListMorphism:
    return check_flavor(ground(tuple(xs), IndexMap((), len(xs))), flavor)


def make_permutation(xs: tuple, sigma: Sequence[int]) -> ListMorphism:
    alpha = IndexMap(tuple(sigma), len(xs))
    if not alpha.is_bijection():
        raise IndexOutOfRange(f"{list(sigma)} is not a permutation")
    return ground(tuple(xs), alpha)


def make_list_morphism(source, table, nested, flavor: Flavor = Flavor.CARTESIAN) -> ListMorphism:
    return check_flavor(ListMorphism(tuple(source), IndexMap(tuple(table), len(source)), tuple(nested)), flavor)


def direct_sum(m1: ListMorphism, m2: ListMorphism) -> ListMorphism:
    """Pointwise concatenation ``m1 (+) m2``."""
    return ListMorphism(m1.source + m2.source, sum_index(m1.alpha, m2.alpha), m1.nested + m2.nested)


def direct_sum_all(ms, empty=()) -> ListMorphism:
    out = identity(tuple(empty))
    for m in ms:
        out = direct_sum(out, m)
    return out


def arrow_of(lefts: Sequence[ListMorphism], tail=None):
    """``(f_1 ... f_n) -o o`` as a curried arrow morphism."""
    out = AtomId() if tail is None else tail
    for f in reversed(tuple(lefts)):
        out = ArrowMorph(f, out)
    return out


def spine_of(m) -> tuple:
    out = []
    while isinstance(m, ArrowMorph):
        out.append(m.left)
        m = m.right
    return tuple(out)


def tensor(x, y):
    """Pointwise concatenation on lists, contexts and context morphisms."""
    if isinstance(x, tuple):
        return x + tuple(y)
    if isinstance(x, Context):
        if x.names != y.names:
            raise VariableMismatch(f"contexts over {x.names} and {y.names}")
        return Context(tuple((n, a + b) for (n, a), (_, b) in zip(x.entries, y.entries)))
    if isinstance(x, ContextMorphism):
        if x.names != y.names:
            raise VariableMismatch(f"context morphisms over {x.names} and {y.names}")
        return ContextMorphism(x.names, tuple(direct_sum(p, q) for p, q in zip(x.parts, y.parts)))
    if isinstance(x, ListMorphism):
        return direct_sum(x, y)
    raise TypeError(f"cannot tensor {type(x).__name__}")


# ---------------------------------------------------------------- contexts

@dataclass(frozen=True)
class Context:
    entries: tuple

    def __post_init__(self):
        entries = tuple((n, tuple(a)) for n, a in self.entries)
        object.__setattr__(self, "entries", entries)
        names = [n for n, _ in entries]
        if len(set(names)) != len(names):
            raise VariableMismatch(f"duplicate variable in context {names}")

    @staticmethod
    def of(*pairs) -> "Context":
        return Context(tuple(pairs))

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self.entries)

    def lookup(self, x: str) -> tuple:
        for n, a in self.entries:
            if n == x:
                return a
        raise KeyError(x)

    def __contains__(self, x):
        return any(n == x for n, _ in self.entries)

    def as_dict(self) -> dict:
        return dict(self.entries)

    def empty_like(self) -> "Context":
        return Context(tuple((n, ()) for n in self.names))

    def restrict(self, names) -> "Context":
        return Context(tuple((n, self.lookup(n) if n in self else ()) for n in names))

    def extend(self, x: str, a: tuple) -> "Context":
        return Context(self.entries + ((x, tuple(a)),))

    def __str__(self):
        return format_context(self)


def format_context(ctx: Context) -> str:
    return ", ".join(f"{n} : {format_list(a)}" for n, a in ctx.entries)


@dataclass(frozen=True)
class ContextMorphism:
    names: tuple
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "parts", tuple(self.parts))
        if len(self.names) != len(self.parts):
            raise VariableMismatch("one list morphism per variable expected")
        if len(set(self.names)) != len(self.names):
            raise VariableMismatch("duplicate variable in context morphism")

    @property
    def source(self) -> Context:
        return Context(tuple(zip(self.names, (p.source for p in self.parts))))

    @property
    def target(self) -> Context:
        return Context(tuple(zip(self.names, (p.cod for p in self.parts))))

    def part(self, x: str) -> ListMorphism:
        return self.parts[self.names.index(x)]

    def as_dict(self) -> dict:
        return dict(zip(self.names, self.parts))

    @staticmethod
    def identity(ctx: Context) -> "ContextMorphism":
        return ContextMorphism(ctx.names, tuple(identity(a) for _, a in ctx.entries))

    @staticmethod
    def from_dict(names, parts: dict, ctx: Context = None) -> "ContextMorphism":
        """Missing variables get the identity on their entry in ``ctx`` (empty if absent)."""
        out = []
        for n in names:
            if n in parts:
                out.append(parts[n])
            else:
                out.append(identity(ctx.lookup(n) if ctx is not None and n in ctx else ()))
        return ContextMorphism(tuple(names), tuple(out))

    def __str__(self):
        return format_context_morphism(self)


def format_context_morphism(theta: ContextMorphism) -> str:
    if not theta.names:
        return "{}"
    return "{" + ", ".join(f"{n} : {format_morphism(p)}" for n, p in zip(theta.names, theta.parts)) + "}"


# ---------------------------------------------------------------- printing

def format_morphism(m) -> str:
    if isinstance(m, AtomId):
        return "id@o"
    if isinstance(m, ArrowMorph):
        if is_identity(m):
            return "id@" + format_type(m.dom)
        left = format_morphism(m.left)
        if left.startswith("<"):
            left = f"({left})"
        right = format_morphism(m.right)
        return f"{left} -o {right}"
    if isinstance(m, ContextMorphism):
        return format_context_morphism(m)
    return _format_list_morphism(m)


def _format_list_morphism(m: ListMorphism) -> str:
    src = m.source
    if is_identity(m):
        return "id@" + format_list(src)
    if is_ground(m):
        table = m.alpha.table
        if len(src) == 1 and len(table) >= 2:
            return f"c{{{format_type(src[0])},{len(table)}}}"
        if not table:
            return f"T{{{format_list(src)}}}"
        if len(table) == 1 and len(src) >= 2:
            return f"w{{{format_list(src)},{table[0]}}}"
        if m.alpha.is_bijection():
            return f"perm{{{format_list(src)},{m.alpha}}}"
    nested = ",".join(format_morphism(f) for f in m.nested)
    return f"<{m.alpha}; {nested}> : {format_list(src)} -> {format_list(m.cod)}"
