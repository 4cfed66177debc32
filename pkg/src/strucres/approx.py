"""Approximation of lambda-terms by resource terms, coherence, and the uniform fragments.

All three relations are computed on a nameless form (de Bruijn indices) so
that alpha-equivalent inputs behave identically and results can be cached.
Eta-long resource terms are compared against arbitrary lambda-terms: an
abstraction facing a non-abstraction is matched against the eta-expansion
of the latter.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from . import terms as T
from .errors import BoundExceeded
from .eta import EtaDerivation, Head, Lam, Redex, derive, eta_size, occ, to_surface, type_of
from .lam import LAbs, LApp, LVar, lnames
from .morph import (O, Arrow, Flavor, IndexMap, ListMorphism, arrows, identity, is_ground)

# nameless shapes: ("free", name) | ("bound", k) | ("lam", body) | ("app", fun, bag)
# resource terms keep a bag tuple; lambda-terms use a 1-tuple as their "bag".


def _resource_nameless(s, env=()):
    if isinstance(s, (Head, Lam, Redex)):
        s = to_surface(s)
    if isinstance(s, T.Var):
        return ("bound", env.index(s.name)) if s.name in env else ("free", s.name)
    if isinstance(s, T.Abs):
        return ("lam", _resource_nameless(s.body, (s.name,) + env))
    return ("app", _resource_nameless(s.fun, env), tuple(_resource_nameless(t, env) for t in s.bag))


def _lambda_nameless(m, env=()):
    if isinstance(m, LVar):
        return ("bound", env.index(m.name)) if m.name in env else ("free", m.name)
    if isinstance(m, LAbs):
        return ("lam", _lambda_nameless(m.body, (m.name,) + env))
    return ("app", _lambda_nameless(m.fun, env), (_lambda_nameless(m.arg, env),))


def _shift(t, by=1, cutoff=0):
    tag = t[0]
    if tag == "bound":
        return ("bound", t[1] + by) if t[1] >= cutoff else t
    if tag in ("free", "hole"):
        return t
    if tag == "lam":
        return ("lam", _shift(t[1], by, cutoff + 1))
    return ("app", _shift(t[1], by, cutoff), tuple(_shift(u, by, cutoff) for u in t[2]))


def _eta(t):
    """``t`` under one more binder, applied to it."""
    return ("app", _shift(t), (("bound", 0),))


def _strip(d):
    if isinstance(d, EtaDerivation):
        return d.term
    return d


# ---------------------------------------------------------------- approximation

@lru_cache(maxsize=None)
def _approx(s, m) -> bool:
    if s[0] == "lam":
        if m[0] == "lam":
            return _approx(s[1], m[1])
        return _approx(s[1], _eta(m))
    if s[0] != m[0]:
        return False
    if s[0] in ("free", "bound"):
        return s == m
    (arg,) = m[2]
    return _approx(s[1], m[1]) and all(_approx(t, arg) for t in s[2])


def approximates(s, m) -> bool:
    """``s`` approximates the lambda-term ``m``; a bag approximates ``m`` when each element does."""
    s = _strip(s)
    if isinstance(s, tuple) and not (s and isinstance(s[0], str)):
        mm = _lambda_nameless(m)
        return all(_approx(_resource_nameless(t), mm) for t in s)
    return _approx(_resource_nameless(s), _lambda_nameless(m))


# ---------------------------------------------------------------- coherence

@lru_cache(maxsize=None)
def _coh(s, t) -> bool:
    if s[0] == "lam" and t[0] == "lam":
        return _coh(s[1], t[1])
    if s[0] == "lam":
        return _coh(s[1], _eta(t))
    if t[0] == "lam":
        return _coh(_eta(s), t[1])
    if s[0] != t[0]:
        return False
    if s[0] in ("free", "bound"):
        return s == t
    return _coh(s[1], t[1]) and all(_coh(a, b) for a in s[2] for b in t[2])


def coherent(s, t) -> bool:
    """``s`` and ``t`` are coherent; bags are compared all against all."""
    s, t = _strip(s), _strip(t)
    if isinstance(s, tuple) and isinstance(t, tuple):
        return all(_coh(_resource_nameless(a), _resource_nameless(b)) for a in s for b in t)
    return _coh(_resource_nameless(s), _resource_nameless(t))


def coherent_types(a, b) -> bool:
    if isinstance(a, tuple) and isinstance(b, tuple):
        return all(coherent_types(x, y) for x in a for y in b)
    if a == O or b == O:
        return a == b
    return coherent_types(a.source, b.source) and coherent_types(a.target, b.target)


# ---------------------------------------------------------------- a common lambda-term for coherent terms

_HOLE = ("hole",)


def _skeleton(s):
    if s[0] in ("free", "bound"):
        return s
    if s[0] == "lam":
        return ("lam", _skeleton(s[1]))
    out = _HOLE
    for t in s[2]:
        out = _merge(out, _skeleton(t))
        if out is None:
            return None
    f = _skeleton(s[1])
    return None if f is None else ("app", f, (out,))


def _free_in(t, k=0) -> bool:
    tag = t[0]
    if tag == "bound":
        return t[1] == k
    if tag in ("free", "hole"):
        return False
    if tag == "lam":
        return _free_in(t[1], k + 1)
    return _free_in(t[1], k) or any(_free_in(u, k) for u in t[2])


def _merge(m, n):
    if m is None or n is None:
        return None
    if m == _HOLE:
        return n
    if n == _HOLE:
        return m
    if m[0] == "lam" and n[0] == "lam":
        b = _merge(m[1], n[1])
        return None if b is None else ("lam", b)
    if m[0] == "lam" or n[0] == "lam":
        lam, other = (m, n) if m[0] == "lam" else (n, m)
        b = _merge(lam[1], _eta(other))
        # only an eta-redex can be read back without the abstraction
        if b is None or b[0] != "app" or b[2] != (("bound", 0),) or _free_in(b[1]):
            return None
        return _unshift(b[1])
    if m[0] != n[0]:
        return None
    if m[0] in ("free", "bound"):
        return m if m == n else None
    f = _merge(m[1], n[1])
    a = _merge(m[2][0], n[2][0])
    return None if f is None or a is None else ("app", f, (a,))


def _unshift(t, cutoff=0):
    tag = t[0]
    if tag == "bound":
        return ("bound", t[1] - 1) if t[1] > cutoff else t
    if tag in ("free", "hole"):
        return t
    if tag == "lam":
        return ("lam", _unshift(t[1], cutoff + 1))
    return ("app", _unshift(t[1], cutoff), tuple(_unshift(u, cutoff) for u in t[2]))


def _named(t, env=(), counter=None, hole="_"):
    counter = counter if counter is not None else itertools.count(1)
    tag = t[0]
    if tag == "free":
        return LVar(t[1])
    if tag == "hole":
        return LVar(hole)
    if tag == "bound":
        return LVar(env[t[1]])
    if tag == "lam":
        x = f"v{next(counter)}"
        return LAbs(x, _named(t[1], (x,) + env, counter, hole))
    return LApp(_named(t[1], env, counter, hole), _named(t[2][0], env, counter, hole))


def common_approximated(s, t):
    """A lambda-term approximated by both ``s`` and ``t``, or None."""
    m = _merge(_skeleton(_resource_nameless(_strip(s))), _skeleton(_resource_nameless(_strip(t))))
    if m is None:
        return None
    return _named(m)


# ---------------------------------------------------------------- fragments

def _walk(t):
    yield t
    if isinstance(t, Lam):
        yield from _walk(t.body)
    elif isinstance(t, (Head, Redex)):
        if isinstance(t, Redex):
            yield from _walk(t.fun)
        for bag in t.args:
            for s in bag:
                yield from _walk(s)


def _bags(t):
    for u in _walk(t):
        if isinstance(u, (Head, Redex)):
            yield from u.args


def is_uniform(s) -> bool:
    """Ground annotations, and every bag non-empty with pairwise coherent elements."""
    t = _strip(s)
    for u in _walk(t):
        if isinstance(u, Lam) and not all(is_ground(f) for f in u.annotations):
            return False
    for bag in _bags(t):
        if not bag or not coherent(bag, bag):
            return False
    return True


def is_strongly_uniform(s) -> bool:
    """Ground annotations, and every bag non-empty with alpha-equal elements."""
    t = _strip(s)
    for u in _walk(t):
        if isinstance(u, Lam) and not all(is_ground(f) for f in u.annotations):
            return False
    for bag in _bags(t):
        if not bag:
            return False
        first = _resource_nameless(bag[0])
        if any(_resource_nameless(x) != first for x in bag[1:]):
            return False
    return True


def _singleton_type(a) -> bool:
    if a == O:
        return True
    return len(a.source) == 1 and _singleton_type(a.source[0]) and _singleton_type(a.target)


def is_qualitative(d: EtaDerivation) -> bool:
    """Strongly uniform, singleton bags and lists throughout, each context entry copies of one type."""
    if not is_strongly_uniform(d):
        return False
    for bag in _bags(d.term):
        if len(bag) != 1:
            return False
    for u in _walk(d.term):
        if isinstance(u, Head) and not _singleton_type(u.type):
            return False
        if isinstance(u, Lam) and not all(len(f.source) == 1 and _singleton_type(f.source[0]) for f in u.annotations):
            return False
    if not _singleton_type(d.type):
        return False
    for _, xs in d.context.entries:
        if len(set(xs)) > 1 or not all(_singleton_type(a) for a in xs):
            return False
    return True


# ---------------------------------------------------------------- enumeration

def type_key(a) -> tuple:
    if a == O:
        return (0,)
    return (1, tuple(type_key(b) for b in a.source), type_key(a.target))


WEAKEN_UNIVERSE = (O, Arrow((O,), O))


@dataclass(frozen=True)
class EnumConfig:
    width: int = 2               # longest bag or binder source
    eta: int = 1                 # extra eta-binders allowed where the lambda-term has no abstraction
    weaken: tuple = WEAKEN_UNIVERSE  # types a cartesian binder may discard
    max_count: int = 200000


def _lam_chain(m):
    names = []
    while isinstance(m, LAbs):
        names.append(m.name)
        m = m.body
    return names, m


def _app_spine(m):
    args = []
    while isinstance(m, LApp):
        args.insert(0, m.arg)
        m = m.fun
    return m, args


class _Enumerator:
    def __init__(self, flavor: Flavor, cfg: EnumConfig, used):
        self.flavor = flavor
        self.cfg = cfg
        self.used = set(used)
        self.counter = itertools.count(1)
        self.memo = {}
        self.produced = 0

    def fresh(self) -> str:
        while True:
            n = f"e{next(self.counter)}"
            if n not in self.used:
                self.used.add(n)
                return n

    def tally(self, k):
        self.produced += k
        if self.produced > self.cfg.max_count:
            raise BoundExceeded(f"more than {self.cfg.max_count} candidate approximants")

    # -- binder sources

    def sources(self, occs: list) -> list:
        """Admissible ``(source, annotation)`` pairs for a binder used at ``occs``, up to reordering the source."""
        w = self.cfg.width
        if self.flavor is Flavor.LINEAR:
            if len(occs) > w:
                return []
            src = tuple(sorted(occs, key=type_key))
            pool = list(range(1, len(src) + 1))
            table = []
            for a in occs:
                k = next(i for i in pool if src[i - 1] == a)
                pool.remove(k)
                table.append(k)
            return [(src, ListMorphism(src, IndexMap(tuple(table), len(src)), tuple(identity(a) for a in occs)))]
        need = sorted(set(occs), key=type_key)
        pool = sorted(set(need) | set(self.cfg.weaken), key=type_key)
        out = []
        room = max(0, w - len(need))
        for extra_n in range(room + 1):
            for extra in itertools.combinations_with_replacement(pool, extra_n):
                src = tuple(sorted(tuple(need) + extra, key=type_key))
                table = tuple(src.index(a) + 1 for a in occs)
                out.append((src, ListMorphism(src, IndexMap(table, len(src)), tuple(identity(a) for a in occs))))
        return out

    # -- terms of any type

    def any(self, m, budget: int) -> list:
        k = ("any", m, budget)
        if k in self.memo:
            return self.memo[k]
        out = []
        names, body = _lam_chain(m)
        for e in range(self.cfg.eta + 1):
            n = len(names) + e
            if n == 0:
                out.extend(self.base(m, (), budget))
                continue
            if n > budget:
                break
            zs = tuple(self.fresh() for _ in range(e))
            for b, size in self.base(body, zs, budget - n):
                for binders in self.binders(tuple(names) + zs, b):
                    out.append((Lam(binders, b), size + n))
        self.tally(len(out))
        self.memo[k] = out
        return out

    def binders(self, names, body) -> list:
        found = occ(body)
        choices = [self.sources(found.get(x, [])) for x in names]
        return [tuple((x, f) for x, (_, f) in zip(names, pick)) for pick in itertools.product(*choices)]

    # -- terms of type o

    def base(self, m, extra: tuple, budget: int) -> list:
        k = ("base", m, extra, budget)
        if k in self.memo:
            return self.memo[k]
        head, args = _app_spine(m)
        args = list(args) + [LVar(z) for z in extra]
        out = []
        if isinstance(head, LVar):
            if budget >= 1:
                for bags, size in self.bag_seq(args, budget - 1):
                    lists = tuple(tuple(type_of(t) for t in bag) for bag in bags)
                    out.append((Head(head.name, arrows(lists), bags), size + 1))
        else:
            out = self.redex(head, args, budget)
        self.tally(len(out))
        self.memo[k] = out
        return out

    def redex(self, head, args, budget) -> list:
        names, body = _lam_chain(head)
        n = len(args)
        if len(names) > n:
            return []
        ws = tuple(self.fresh() for _ in range(n - len(names)))
        binder_names = tuple(names) + ws
        out = []
        for b, bsize in self.base(body, ws, budget - n):
            found = occ(b)
            choices = [self.sources(found.get(x, [])) for x in binder_names]
            for pick in itertools.product(*choices):
                rest = budget - n - bsize
                for bags, size in self.typed_bags(args, [src for src, _ in pick], rest):
                    lam = Lam(tuple((x, f) for x, (_, f) in zip(binder_names, pick)), b)
                    out.append((Redex(lam, bags), n + bsize + size))
        return out

    def bag_seq(self, args, budget) -> list:
        if not args:
            return [((), 0)]
        out = []
        for bag, s in self.bags(args[0], budget):
            for rest, r in self.bag_seq(args[1:], budget - s):
                out.append(((bag,) + rest, s + r))
        return out

    def bags(self, m, budget) -> list:
        """Bags of 0..width approximants of ``m``; a bag costs 2 plus its elements."""
        if budget < 2:
            return []
        elems = self.any(m, budget - 2)
        out = [((), 2)]
        frontier = [((), 2)]
        for _ in range(self.cfg.width):
            nxt = []
            for bag, size in frontier:
                for t, s in elems:
                    if size + s <= budget:
                        nxt.append((bag + (t,), size + s))
            out.extend(nxt)
            frontier = nxt
        return out

    def typed_bags(self, args, sources, budget) -> list:
        if not args:
            return [((), 0)]
        out = []
        for bag, s in self.bag_of_types(args[0], sources[0], budget):
            for rest, r in self.typed_bags(args[1:], sources[1:], budget - s):
                out.append(((bag,) + rest, s + r))
        return out

    def bag_of_types(self, m, src, budget) -> list:
        if budget < 2:
            return []
        elems = self.any(m, budget - 2)
        out = [((), 2)]
        for a in src:
            nxt = []
            for bag, size in out:
                for t, s in elems:
                    if type_of(t) == a and size + s <= budget:
                        nxt.append((bag + (t,), size + s))
            out = nxt
        return out


def enumerate_approximants(m, bound: int, flavor: Flavor = Flavor.CARTESIAN,
                           cfg: EnumConfig = EnumConfig(), names=None) -> list:
    """Every eta-long ``s`` approximating ``m`` with derivation size at most ``bound``.

    Binder sources are taken up to reordering (sorted), which is all the
    multiset semantics can observe.  Results are sorted by size, then text.
    """
    en = _Enumerator(flavor, cfg, lnames(m) | set(names or ()))
    seen = {}
    for t, size in en.any(m, bound):
        d = derive(t, names)
        k = (d.context, _resource_nameless(t), _annotations(t))
        if k not in seen:
            seen[k] = d
    out = sorted(seen.values(), key=lambda d: (eta_size(d.term), str(d)))
    for d in out:
        if not approximates(d, m):  # typability was checked by derive; this is the relation itself
            raise AssertionError(f"enumerated {d} does not approximate its term")
    return out


def _annotations(t) -> tuple:
    return tuple(u.annotations for u in _walk(t) if isinstance(u, Lam))
