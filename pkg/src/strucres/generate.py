"""Random well-typed eta-long terms and morphisms.

Every abstraction first draws its annotation ``f : source -> occurrences``;
the occurrences it demands become obligations that the body must place as
heads, left to right.  Free variables come from a small pool and take
whatever type their position needs, so every output typechecks by
construction.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .eta import EtaDerivation, Head, Lam, Redex, derive, eta_size
from .morph import (O, AtomId, Flavor, IndexMap, ListMorphism, arrow_of, arrows,
                    identity, spine)

FREE_POOL = ("w", "q", "y")


@dataclass(frozen=True)
class GenConfig:
    depth: int = 3
    bag_width: int = 2
    arity: int = 2
    type_depth: int = 2
    flavor: Flavor = Flavor.CARTESIAN
    p_redex: float = 0.3
    p_nontrivial: float = 0.6


# ---------------------------------------------------------------- types and morphisms

def random_type(rng: random.Random, depth: int, width: int = 2):
    if depth <= 0 or rng.random() < 0.5:
        return O
    n = rng.randint(1, 2)
    return arrows([tuple(random_type(rng, depth - 1, width) for _ in range(rng.randint(0, width)))
                   for _ in range(n)])


def random_list(rng, depth, width=2) -> tuple:
    return tuple(random_type(rng, depth, width) for _ in range(rng.randint(0, width)))


def _random_lists_morph(rng, a, depth, flavor, outward: bool):
    lefts = []
    for xs in spine(a):
        if outward:
            lefts.append(random_into(rng, xs, depth - 1, flavor))
        else:
            lefts.append(random_from(rng, xs, depth - 1, flavor))
    return lefts


def random_type_from(rng, a, depth: int, flavor=Flavor.CARTESIAN):
    """A random ``f : a -> b``."""
    if a == O:
        return AtomId()
    if depth <= 0:
        return identity(a)
    return arrow_of(_random_lists_morph(rng, a, depth, flavor, outward=True))


def random_type_into(rng, b, depth: int, flavor=Flavor.CARTESIAN):
    """A random ``f : a -> b``."""
    if b == O:
        return AtomId()
    if depth <= 0:
        return identity(b)
    return arrow_of(_random_lists_morph(rng, b, depth, flavor, outward=False))


def random_from(rng, source: tuple, depth: int, flavor=Flavor.CARTESIAN, width: int = 3) -> ListMorphism:
    """A random list morphism out of ``source``."""
    k = len(source)
    if flavor is Flavor.LINEAR:
        table = list(range(1, k + 1))
        rng.shuffle(table)
    else:
        n = rng.randint(0, width) if k else 0
        table = [rng.randint(1, k) for _ in range(n)]
    nested = tuple(random_type_from(rng, source[i - 1], depth, flavor) for i in table)
    return ListMorphism(source, IndexMap(tuple(table), k), nested)


def random_into(rng, cod: tuple, depth: int, flavor=Flavor.CARTESIAN, width: int = 2) -> ListMorphism:
    """A random list morphism into ``cod``: contractions share a source slot, weakenings add unused ones."""
    nested = [random_type_into(rng, b, depth, flavor) for b in cod]
    slots, table = [], []
    for g in nested:
        share = [i for i, a in enumerate(slots) if a == g.dom]
        if flavor is Flavor.CARTESIAN and share and rng.random() < 0.5:
            table.append(rng.choice(share))
        else:
            slots.append(g.dom)
            table.append(len(slots) - 1)
    if flavor is Flavor.CARTESIAN:
        for _ in range(rng.randint(0, 1)):
            slots.append(random_type(rng, 1, width))
    order = list(range(len(slots)))
    rng.shuffle(order)
    where = {old: new for new, old in enumerate(order)}
    source = tuple(slots[i] for i in order)
    return ListMorphism(source, IndexMap(tuple(where[i] + 1 for i in table), len(source)), tuple(nested))


def random_morphism(rng, depth: int = 3, flavor=Flavor.CARTESIAN, width: int = 2) -> ListMorphism:
    return random_from(rng, random_list(rng, 2, width), depth, flavor, width + 1)


# ---------------------------------------------------------------- terms

class _TermGen:
    def __init__(self, rng: random.Random, cfg: GenConfig):
        self.rng = rng
        self.cfg = cfg
        self.counter = 0

    def fresh(self) -> str:
        self.counter += 1
        return f"x{self.counter}"

    def annotation(self, source: tuple) -> ListMorphism:
        if self.cfg.flavor is Flavor.LINEAR or self.rng.random() > self.cfg.p_nontrivial:
            m = identity(source)
            if self.cfg.flavor is Flavor.LINEAR and len(source) > 1 and self.rng.random() < 0.5:
                table = list(range(1, len(source) + 1))
                self.rng.shuffle(table)
                m = ListMorphism(source, IndexMap(tuple(table), len(source)), tuple(identity(source[i - 1]) for i in table))
            return m
        return random_from(self.rng, source, 1 if self.rng.random() < 0.5 else 0, self.cfg.flavor, self.cfg.bag_width)

    def lam(self, source_lists, obligations, depth):
        binders, own = [], []
        for xs in source_lists:
            x = self.fresh()
            f = self.annotation(xs)
            binders.append((x, f))
            own.append([(x, a) for a in f.cod])
        merged = self.interleave([list(obligations)] + own)
        return Lam(tuple(binders), self.at_o(merged, depth - 1))

    def interleave(self, queues):
        queues = [list(q) for q in queues if q]
        out = []
        while queues:
            q = self.rng.choice(queues)
            out.append(q.pop(0))
            queues = [q for q in queues if q]
        return out

    def check(self, a, obligations, depth):
        if a == O:
            return self.at_o(obligations, depth)
        return self.lam(spine(a), obligations, depth)

    def split(self, obligations, n):
        """Cut the obligation list into ``n`` contiguous chunks."""
        if n == 0:
            return []
        cuts = sorted(self.rng.randint(0, len(obligations)) for _ in range(n - 1))
        bounds = [0] + cuts + [len(obligations)]
        return [obligations[bounds[i]:bounds[i + 1]] for i in range(n)]

    def fill(self, lists, obligations, depth):
        flat = [a for xs in lists for a in xs]
        if not flat and obligations:
            raise ValueError("obligations left with no argument to place them in")
        chunks = self.split(list(obligations), len(flat))
        it = iter(zip(flat, chunks))
        return tuple(tuple(self.check(a, ch, depth) for a, ch in (next(it) for _ in xs)) for xs in lists)

    def at_o(self, obligations, depth):
        rng, cfg = self.rng, self.cfg
        obligations = list(obligations)
        if obligations:
            x, a = obligations[0]
            rest = obligations[1:]
            room = sum(len(xs) for xs in spine(a))
            if (not rest or room) and (rng.random() < 0.7 or depth <= 0):
                return Head(x, a, self.fill(spine(a), rest, depth))
        if depth > 0 and rng.random() < cfg.p_redex:
            source = tuple(random_list(rng, cfg.type_depth - 1, cfg.bag_width) for _ in range(rng.randint(1, cfg.arity)))
            fun_part, arg_part = self.split(obligations, 2)
            if not any(source):
                fun_part, arg_part = obligations, []
            fun = self.lam(source, fun_part, depth)
            return Redex(fun, self.fill(source, arg_part, depth - 1))
        name = rng.choice(FREE_POOL)
        if depth <= 0:
            if not obligations:
                return Head(name, O, ())
            lists = ((O,) * len(obligations),)
            return Head(name, arrows(lists), (tuple(self.at_o([ob], depth) for ob in obligations),))
        n = rng.randint(0, cfg.arity)
        lists = [tuple(random_type(rng, cfg.type_depth - 1, cfg.bag_width)
                       for _ in range(rng.randint(0, cfg.bag_width))) for _ in range(n)]
        if obligations and not any(lists):
            lists = [(O,)] + lists
        return Head(name, arrows(lists), self.fill(lists, obligations, depth - 1))


def random_term(rng: random.Random, cfg: GenConfig = GenConfig(), at_type=None):
    gen = _TermGen(rng, cfg)
    a = at_type if at_type is not None else (O if rng.random() < 0.5 else random_type(rng, cfg.type_depth))
    return gen.check(a, [], cfg.depth)


def random_derivation(seed: int, cfg: GenConfig = GenConfig(), max_size: int = None, tries: int = 200) -> EtaDerivation:
    """A random derivation of size at most ``max_size``, deterministic in ``seed``."""
    rng = random.Random(seed)
    for _ in range(tries):
        t = random_term(rng, cfg)
        if max_size is None or eta_size(t) <= max_size:
            return derive(t, FREE_POOL)
    raise ValueError(f"no term of size <= {max_size} within {tries} draws")


def derivations(count: int, seed: int = 0, cfg: GenConfig = GenConfig(), max_size: int = None) -> list:
    return [random_derivation(seed * 100003 + i, cfg, max_size) for i in range(count)]


def reducible_derivations(count: int, seed: int = 0, cfg: GenConfig = GenConfig(), max_size: int = None) -> list:
    """Like :func:`derivations`, keeping only terms with at least one redex."""
    from .rewrite import redexes
    out = []
    for i in itertools.count():
        if len(out) >= count:
            return out
        d = random_derivation(seed * 100003 + i, cfg, max_size)
        if redexes(d):
            out.append(d)
