"""Multitype semantics of lambda-terms, the Scott preorder, and the collapse.

A judgment of a lambda-term is read off a typed approximant by forgetting
the order of every list.  Approximants are searched per judgment: for each
subterm we keep one smallest witness for every (context, type) pair it can
have, so witnesses far larger than the judgment itself stay reachable.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .approx import _app_spine, _lam_chain, approximates, type_key
from .errors import BoundExceeded, ReductionCycle
from .eta import EtaDerivation, Head, Lam, Redex, canonical, derive, eta_size, format_eta, occ
from .lam import LVar, format_lambda, lfree, lnames
from .morph import (O, Arrow, Flavor, IndexMap, ListMorphism, format_morphism, format_type, identity,
                    is_permutation, spine)
from .rewrite import ReductionLabel, exp_normalize, is_planar


# ---------------------------------------------------------------- multitypes

def multitype(a):
    """``a`` with every list read as a multiset (kept as a sorted tuple)."""
    if isinstance(a, tuple):
        return tuple(sorted((multitype(x) for x in a), key=type_key))
    if a == O:
        return O
    return Arrow(multitype(a.source), multitype(a.target))


def mt_size(a) -> int:
    """Node count: the base type is 1, a list is 1 plus its members, an arrow is 1 plus its source and target."""
    if isinstance(a, tuple):
        return 1 + sum(mt_size(x) for x in a)
    if a == O:
        return 1
    return 1 + mt_size(a.source) + mt_size(a.target)


def format_multitype(a) -> str:
    return format_type(a)


@dataclass(frozen=True, order=False)
class Judgment:
    """A multiset context (sorted by variable) and a multitype."""
    context: tuple
    type: object

    @staticmethod
    def of(context, a) -> "Judgment":
        if isinstance(context, dict):
            context = context.items()
        elif hasattr(context, "entries"):
            context = context.entries
        ctx = tuple(sorted((n, multitype(tuple(xs))) for n, xs in context if xs))
        return Judgment(ctx, multitype(a))

    @property
    def size(self) -> int:
        return sum(mt_size(xs) for _, xs in self.context) + mt_size(self.type)

    def sort_key(self):
        return (self.size, tuple((n, type_key(Arrow(xs, O))) for n, xs in self.context), type_key(self.type))

    def __str__(self):
        ctx = ", ".join(f"{n} : {format_type(xs)}" for n, xs in self.context)
        return f"{ctx} |- {format_type(self.type)}"


def judgment_of(d: EtaDerivation) -> Judgment:
    return Judgment.of(d.context, d.type)


# ---------------------------------------------------------------- the Scott preorder

def scott_leq(a, b) -> bool:
    """``a <= b`` in the preorder generated by duplication, projection and erasure.

    On multisets: every member of ``b`` lies above some member of ``a``.
    Arrows are contravariant in their source and covariant in their target.
    """
    return _leq(multitype(a), multitype(b))


@lru_cache(maxsize=None)
def _leq(a, b) -> bool:
    if isinstance(a, tuple):
        return all(any(_leq(x, y) for x in a) for y in b)
    if a == O or b == O:
        return a == b
    return _leq(b.source, a.source) and _leq(a.target, b.target)


def context_leq(g: tuple, d: tuple) -> bool:
    """Pointwise on multiset contexts given as sorted ``(name, multiset)`` pairs."""
    gd, dd = dict(g), dict(d)
    return all(scott_leq(gd.get(n, ()), dd.get(n, ())) for n in set(gd) | set(dd))


def morphism_leq(m) -> bool:
    """A cartesian morphism ``m : x -> y`` read as ``x <= y``."""
    return scott_leq(m.dom, m.cod)


# -- brute-force closure of the three rules, used to validate scott_leq

def small_types(depth: int, width: int = 2) -> list:
    """Types built from ``o`` and ``X -o o`` with multisets of at most ``width`` members, nested ``depth`` deep."""
    if depth <= 1:
        return [O]
    inner = small_multisets(depth - 1, width)
    return [O] + [Arrow(xs, O) for xs in inner]


def small_multisets(depth: int, width: int = 2) -> list:
    ts = small_types(depth, width)
    out = []
    for k in range(width + 1):
        out.extend(tuple(sorted(c, key=type_key)) for c in itertools.combinations_with_replacement(ts, k))
    return out


def _multiset_steps(xs, up: dict, width: int) -> set:
    """One rule application on ``xs``, possibly under congruence; ``up`` gives one-step-larger types."""
    out = set()
    for i, a in enumerate(xs):
        if len(xs) < width:
            out.add(tuple(sorted(xs + (a,), key=type_key)))          # [A] <= [A, A]
        rest = xs[:i] + xs[i + 1:]
        for a2 in up.get(a, ()):
            out.add(tuple(sorted(rest + (a2,), key=type_key)))
    for k in range(1, len(xs) + 1):                                   # erasure, and projection
        for drop in itertools.combinations(range(len(xs)), k):
            out.add(tuple(x for j, x in enumerate(xs) if j not in drop))
    return out


def rule_steps(depth: int = 3, width: int = 2) -> dict:
    """The one-step relation on multisets nested at most ``depth`` deep, built level by level.

    An arrow steps up when its source steps down, so each level reverses the
    multiset steps of the level below.
    """
    up = {}
    steps = {}
    for d in range(1, depth + 1):
        level = small_multisets(d, width)
        below = steps
        up = {}
        for ys, targets in below.items():
            for xs in targets:
                up.setdefault(Arrow(xs, O), set()).add(Arrow(ys, O))
        steps = {xs: {ys for ys in _multiset_steps(xs, up, width) if len(ys) <= width} for xs in level}
    return steps


def rule_closure(depth: int = 3, width: int = 2, limit: int = 10 ** 7) -> dict:
    """For each multiset of the universe, everything reachable by rule steps (reflexive-transitive)."""
    succ = rule_steps(depth, width)
    out = {}
    work = 0
    for xs in succ:
        seen = {xs}
        todo = [xs]
        while todo:
            cur = todo.pop()
            for ys in succ[cur]:
                if ys not in seen:
                    seen.add(ys)
                    todo.append(ys)
                    work += 1
                    if work > limit:
                        raise BoundExceeded("rule closure did not settle within its step limit")
        out[xs] = seen
    return out


def validate_scott_leq(depth: int = 3, width: int = 2) -> tuple:
    """Compare ``scott_leq`` with the rule closure on every pair; returns (pairs, disagreements)."""
    closure = rule_closure(depth, width)
    bad = []
    pairs = 0
    for xs, above in closure.items():
        for ys in closure:
            pairs += 1
            if scott_leq(xs, ys) != (ys in above):
                bad.append((xs, ys))
    return pairs, bad


# ---------------------------------------------------------------- approximants by judgment

@lru_cache(maxsize=None)
def type_universe(max_size: int, width: int = 2) -> tuple:
    """Every canonical type (sorted lists of at most ``width`` members) of size at most ``max_size``."""
    by_size = {1: [O]}

    def lists(size):
        if size == 1:
            return [()]
        out = {}
        for combo_width in range(1, width + 1):
            for parts in _partitions(size - 1, combo_width):
                for pick in itertools.product(*[by_size.get(p, []) for p in parts]):
                    out.setdefault(tuple(sorted(pick, key=type_key)), None)
        return list(out)

    for n in range(2, max_size + 1):
        by_size[n] = [Arrow(xs, t) for ls in range(1, n - 1) for xs in lists(ls) for t in by_size[n - 1 - ls]]
    return tuple(a for n in sorted(by_size) for a in by_size[n])


def _partitions(total: int, parts: int):
    """Non-decreasing tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total // parts + 1):
        for rest in _partitions(total - first, parts - 1):
            if rest[0] >= first:
                yield (first,) + rest


@dataclass(frozen=True)
class SearchConfig:
    width: int = 2            # longest bag or binder source
    cut_type_size: int = 11   # largest member of a guessed cut source
    cut_list_size: int = 16  # largest guessed cut source
    free_type_size: int = 3   # types tried for free variables


def _ctx_merge(*ctxs) -> tuple:
    acc = {}
    for c in ctxs:
        for n, xs in c:
            acc[n] = acc.get(n, ()) + xs
    return tuple(sorted((n, tuple(sorted(xs, key=type_key))) for n, xs in acc.items()))


def _ctx_key(c) -> tuple:
    return tuple((n, tuple(type_key(x) for x in xs)) for n, xs in c)


def _ctx_size(c) -> int:
    return sum(mt_size(xs) for _, xs in c)


def _ctx_drop(c, names) -> tuple:
    return tuple((n, xs) for n, xs in c if n not in names)


def _ctx_get(c, name) -> tuple:
    for n, xs in c:
        if n == name:
            return xs
    return ()


def _sub_multiset(xs, ys) -> bool:
    pool = list(ys)
    for x in xs:
        if x not in pool:
            return False
        pool.remove(x)
    return True


@lru_cache(maxsize=None)
def _ground_annotation(flavor: Flavor, src: tuple, occs: tuple) -> Optional[ListMorphism]:
    """The ground annotation ``src -> occs`` (a permutation when linear), or None if there is none."""
    if flavor is Flavor.LINEAR:
        if sorted(occs, key=type_key) != list(src):
            return None
        pool = list(range(1, len(src) + 1))
        table = []
        for a in occs:
            k = next(i for i in pool if src[i - 1] == a)
            pool.remove(k)
            table.append(k)
    else:
        if not set(occs) <= set(src):
            return None
        table = [src.index(a) + 1 for a in occs]
    return ListMorphism(src, IndexMap(tuple(table), len(src)), tuple(identity(a) for a in occs))


@dataclass(frozen=True)
class OpenSource:
    """A cut binder whose source is not chosen yet: any of ``members`` may be used."""
    members: tuple


class _TypedSearch:
    """Approximants checked against a known type, one smallest witness per resulting context.

    Binder sources come from the type being checked, so bound variables only
    take types from their binder's source.  A redex is the one place a type
    has to be guessed: each cut source is a multiset of types the argument
    inhabits, drawn from a bounded universe.  Usage of bound variables is
    kept as a set in the cartesian system, since a binder there only needs
    every used type to be in its source.
    """

    def __init__(self, flavor: Flavor, cfg: SearchConfig, used, free_names):
        self.flavor = flavor
        self.cfg = cfg
        self.used = set(used)
        self.free = set(free_names)
        self.memo = {}
        self.free_types = tuple(a for a in type_universe(cfg.free_type_size, cfg.width))
        self.cut_types = type_universe(cfg.cut_type_size, cfg.width)

    # -- bookkeeping

    def restrict(self, env: dict, m) -> tuple:
        return tuple(sorted((x, env[x]) for x in lfree(m) if x in env))

    def fresh(self, env: dict, k: int) -> tuple:
        out, i = [], 0
        while len(out) < k:
            i += 1
            n = f"e{i}"
            if n not in env and n not in self.used:
                out.append(n)
        return tuple(out)

    def normalize_ctx(self, ctx, env) -> Optional[tuple]:
        """Collapse bound usage to a set (cartesian), or reject usage beyond the source (linear)."""
        out = []
        for n, xs in ctx:
            if n in env:
                src = env[n]
                if self.flavor is Flavor.CARTESIAN:
                    xs = tuple(sorted(set(xs), key=type_key))
                elif isinstance(src, OpenSource):
                    if len(xs) > self.cfg.width:
                        return None
                elif not _sub_multiset(xs, src):
                    return None
            out.append((n, xs))
        return tuple(out)

    @staticmethod
    def keep(table, key, term, size):
        old = table.get(key)
        if old is None or size < old[1]:
            table[key] = (term, size)

    def combine(self, states: dict, options: dict, env, extend) -> dict:
        nxt = {}
        for c, (acc, size) in states.items():
            for oc, (piece, s) in options.items():
                nc = self.normalize_ctx(_ctx_merge(c, oc), env)
                if nc is not None:
                    self.keep(nxt, nc, extend(acc, piece), size + s)
        return nxt

    def annotation(self, src: tuple, occs) -> Optional[ListMorphism]:
        return _ground_annotation(self.flavor, src, tuple(occs))

    def bind(self, names, sources, body):
        found = occ(body)
        binders = []
        for x, src in zip(names, sources):
            f = self.annotation(src, found.get(x, []))
            if f is None:
                return None
            binders.append((x, f))
        return Lam(tuple(binders), body)

    # -- checking against a type

    def check(self, m, a, env: dict) -> dict:
        key = ("check", m, a, self.restrict(env, m))
        if key in self.memo:
            return self.memo[key]
        out = {}
        lists = spine(a)
        names, body = _lam_chain(m)
        if len(names) <= len(lists):
            if not lists:
                out = self.base(m, (), env)
            else:
                inner = {x: v for x, v in env.items() if x not in names}
                zs = self.fresh({**inner, **{x: () for x in names}}, len(lists) - len(names))
                bnames = tuple(names) + zs
                env2 = {**inner, **dict(zip(bnames, lists))}
                for ctx, (b, size) in self.base(body, zs, env2).items():
                    lam = self.bind(bnames, lists, b)
                    if lam is not None:
                        self.keep(out, _ctx_drop(ctx, bnames), lam, size + len(bnames))
        self.memo[key] = out
        return out

    def exact_bag(self, m, src: tuple, env: dict) -> dict:
        key = ("bag", m, src, self.restrict(env, m))
        if key in self.memo:
            return self.memo[key]
        states = {(): ((), 2)}
        for c in src:
            states = self.combine(states, self.check(m, c, env), env, lambda bag, t: bag + (t,))
        self.memo[key] = states
        return states

    def base(self, m, extra: tuple, env: dict) -> dict:
        key = ("base", m, extra, tuple(sorted((x, env[x]) for x in set(lfree(m)) | set(extra) if x in env)))
        if key in self.memo:
            return self.memo[key]
        head, args = _app_spine(m)
        args = list(args) + [LVar(z) for z in extra]
        out = {}
        if isinstance(head, LVar):
            x = head.name
            if x in env:
                src = env[x]
                cands = src.members if isinstance(src, OpenSource) else dict.fromkeys(src)
            else:
                cands = self.free_types
            for c in cands:
                lists = spine(c)
                if len(lists) != len(args):
                    continue
                states = self.normalize_ctx(((x, (c,)),), env)
                states = {states: ((), 1)} if states is not None else {}
                for arg, src in zip(args, lists):
                    states = self.combine(states, self.exact_bag(arg, src, env), env, lambda bags, bag: bags + (bag,))
                for ctx, (bags, size) in states.items():
                    self.keep(out, ctx, Head(x, c, bags), size)
        else:
            self.redex(head, args, env, out)
        self.memo[key] = out
        return out

    def inhabited(self, m, env: dict) -> list:
        key = ("inhabited", m, self.restrict(env, m))
        if key not in self.memo:
            self.memo[key] = [c for c in self.cut_types if self.check(m, c, env)]
        return self.memo[key]

    def cut_sources(self, arg, used: tuple, env: dict) -> list:
        """Sources for a cut binder whose body uses it at ``used``.

        Linear: exactly the usage.  Cartesian: the used types, possibly
        repeated or joined by unused inhabited ones; for a closed argument
        those extras change no judgment, so only the bare support is kept.
        """
        w = self.cfg.width
        if self.flavor is Flavor.LINEAR:
            out = [tuple(sorted(used, key=type_key))] if len(used) <= w else []
        else:
            need = tuple(sorted(set(used), key=type_key))
            if len(need) > w:
                return []
            out = [need]
            if lfree(arg):
                pool = self.inhabited(arg, env)
                for k in range(1, w - len(need) + 1):
                    for extra in itertools.combinations_with_replacement(pool, k):
                        out.append(tuple(sorted(need + extra, key=type_key)))
        return [src for src in out if mt_size(src) <= self.cfg.cut_list_size]

    def redex(self, head, args, env, out):
        names, body = _lam_chain(head)
        n = len(args)
        if len(names) > n:
            return
        inner = {x: v for x, v in env.items() if x not in names}
        ws = self.fresh({**inner, **{x: () for x in names}}, n - len(names))
        bnames = tuple(names) + ws
        env2 = {**inner, **{x: OpenSource(tuple(self.inhabited(arg, env))) for x, arg in zip(bnames, args)}}
        for ctx, (b, bsize) in self.base(body, ws, env2).items():
            outer = self.normalize_ctx(_ctx_drop(ctx, bnames), env)
            if outer is None:
                continue
            found = occ(b)
            choices = [self.cut_sources(arg, tuple(found.get(x, ())), env) for x, arg in zip(bnames, args)]
            for srcs in itertools.product(*choices):
                lam = self.bind(bnames, srcs, b)
                if lam is None:
                    continue
                states = {outer: ((), n + bsize)}
                for arg, src in zip(args, srcs):
                    states = self.combine(states, self.exact_bag(arg, src, env), env, lambda bags, bag: bags + (bag,))
                for c, (bags, size) in states.items():
                    self.keep(out, c, Redex(lam, bags), size)


@dataclass
class Semantics:
    term: object
    flavor: Flavor
    bound: int
    config: SearchConfig
    witnesses: dict = field(default_factory=dict)  # Judgment -> EtaDerivation

    @property
    def judgments(self) -> list:
        return sorted(self.witnesses, key=Judgment.sort_key)

    @property
    def witness_size(self) -> int:
        return max((eta_size(d.term) for d in self.witnesses.values()), default=0)

    def __contains__(self, j):
        return j in self.witnesses

    def __len__(self):
        return len(self.witnesses)


def semantics(m, flavor: Flavor = Flavor.CARTESIAN, bound: int = 10,
              cfg: SearchConfig = SearchConfig(), names=None) -> Semantics:
    """Judgments of size at most ``bound`` of approximants of ``m``, each with a smallest witness.

    Contexts and types are multisets.  Free variables range over the types of
    size at most ``cfg.free_type_size``; cut sources over multisets of types
    of size at most ``cfg.cut_type_size``.  Witness sizes are not bounded and
    are reported separately.
    """
    free = list(names or ()) + [x for x in lfree(m) if x not in (names or ())]
    search = _TypedSearch(flavor, cfg, lnames(m) | set(free), free)
    out = Semantics(m, flavor, bound, cfg)
    for a in type_universe(bound, cfg.width):
        for ctx, (t, _) in search.check(m, a, {}).items():
            j = Judgment.of(ctx, a)
            if j.size > bound:
                continue
            d = derive(canonical(t), free)
            if judgment_of(d) != j:
                raise AssertionError(f"witness {format_eta(t)} does not have judgment {j}")
            if not approximates(d, m):
                raise AssertionError(f"witness {format_eta(t)} does not approximate {format_lambda(m)}")
            old = out.witnesses.get(j)
            if old is None or eta_size(d.term) < eta_size(old.term):
                out.witnesses[j] = d
    return out


# ---------------------------------------------------------------- the collapse map

@dataclass(frozen=True)
class CollapseRecord:
    source: EtaDerivation
    normal: EtaDerivation
    theta: object
    f: object
    steps: int

    @property
    def label(self) -> ReductionLabel:
        return ReductionLabel(self.theta, self.f)

    def __str__(self):
        return f"{format_eta(self.normal.term)} via ({self.theta}; {format_morphism(self.f)})"


def collapse_map(d: EtaDerivation) -> CollapseRecord:
    """Exponential normalization of a cartesian approximant, with its composite label."""
    run = exp_normalize(d)
    return CollapseRecord(d, run.derivation, run.label.ctx, run.label.typ, len(run.trace))


def is_linear_derivation(d: EtaDerivation) -> bool:
    """Every annotation is a permutation, i.e. the derivation lives in the linear system."""
    def go(t):
        if isinstance(t, Lam):
            return all(is_permutation(f) for f in t.annotations) and go(t.body)
        bags = t.args
        head_ok = go(t.fun) if isinstance(t, Redex) else True
        return head_ok and all(go(s) for bag in bags for s in bag)
    return go(d.term)


# ---------------------------------------------------------------- verification

@dataclass
class CollapseLine:
    judgment: Judgment
    witness: EtaDerivation
    record: Optional[CollapseRecord]   # None when exponential reduction cycles
    rel_judgment: Optional[Judgment]
    verdict: str                       # "ok", "FAIL" or "CYCLE"
    reasons: tuple = ()
    below: Optional[Judgment] = None   # some relational judgment under this one, found by search

    @property
    def ok(self) -> bool:
        return self.verdict == "ok"


@dataclass
class CollapseReport:
    term: object
    bound: int
    config: SearchConfig
    scott: Semantics
    rel: Semantics
    lines: list
    missing_in_scott: list

    @property
    def ok(self) -> bool:
        return all(l.ok for l in self.lines) and not self.missing_in_scott

    @property
    def cycles(self) -> list:
        return [l for l in self.lines if l.verdict == "CYCLE"]

    def summary(self) -> str:
        counts = {v: sum(l.verdict == v for l in self.lines) for v in ("ok", "FAIL", "CYCLE")}
        return (f"scott {len(self.scott)} judgments, rel {len(self.rel)}; "
                f"collapse ok {counts['ok']}, failing {counts['FAIL']}, cycling {counts['CYCLE']}; "
                f"{len(self.missing_in_scott)} rel judgments missing from scott; "
                f"judgment bound {self.bound}, largest witness {self.scott.witness_size}")

    def format(self) -> str:
        out = [f"term {format_lambda(self.term)}"]
        for l in self.lines:
            out.append(f"{l.verdict:5} {l.judgment}")
            out.append(f"      witness {format_eta(l.witness.term)}")
            if l.record is not None:
                out.append(f"      nf^e    {format_eta(l.record.normal.term)} : {l.rel_judgment}")
                out.append(f"      label   ({l.record.theta}; {format_morphism(l.record.f)})")
            for r in l.reasons:
                out.append(f"      reason  {r}")
            if not l.ok:
                out.append(f"      below   {l.below if l.below is not None else 'no relational judgment found'}")
        for j in self.missing_in_scott:
            out.append(f"FAIL  rel judgment {j} missing from scott")
        out.append(self.summary())
        return "\n".join(out)


def below_rel(j: Judgment, rel: Semantics) -> Optional[Judgment]:
    """A relational judgment lying under ``j`` in the Scott preorder, if the search found one."""
    for r in rel.judgments:
        if context_leq(j.context, r.context) and scott_leq(r.type, j.type):
            return r
    return None


def check_collapse(j: Judgment, d: EtaDerivation, m, rel: Semantics, bound: int) -> CollapseLine:
    try:
        rec = collapse_map(d)
    except ReductionCycle as e:
        return CollapseLine(j, d, None, None, "CYCLE", (f"exponential reduction cycles: {e}",),
                            below_rel(j, rel))
    nf = rec.normal
    rj = judgment_of(nf)
    reasons = []
    if not is_planar(nf):
        reasons.append("exponential normal form is not planar")
    if not is_linear_derivation(nf):
        reasons.append("exponential normal form is not a linear derivation")
    if not approximates(nf, m):
        reasons.append("exponential normal form does not approximate the term")
    if rec.theta.source != d.context or rec.theta.target != nf.context:
        reasons.append("context label has the wrong boundary")
    if rec.f.dom != nf.type or rec.f.cod != d.type:
        reasons.append("type label has the wrong boundary")
    if not all(morphism_leq(p) for p in rec.theta.parts):
        reasons.append("context label does not give gamma <= delta")
    if not morphism_leq(rec.f):
        reasons.append("type label does not give b <= a")
    if not context_leq(j.context, rj.context):
        reasons.append("context of the witness is not below the normal form's")
    if not scott_leq(rj.type, j.type):
        reasons.append("type of the normal form is not below the witness's")
    if rj.size <= bound and rj not in rel:
        reasons.append("linear judgment of the normal form missing from the relational search")
    line = CollapseLine(j, d, rec, rj, "ok" if not reasons else "FAIL", tuple(reasons))
    if reasons:
        line.below = below_rel(j, rel)
    return line


def verify_collapse(m, bound: int = 10, cfg: SearchConfig = SearchConfig(), names=None) -> CollapseReport:
    """Check the collapse on every judgment up to ``bound``.

    Below: each Scott judgment's witness normalizes exponentially to a planar
    linear approximant whose judgment lies below it, as read from the label.
    Inclusion: every relational judgment is a Scott judgment.
    """
    scott = semantics(m, Flavor.CARTESIAN, bound, cfg, names)
    rel = semantics(m, Flavor.LINEAR, bound, cfg, names)
    lines = [check_collapse(j, scott.witnesses[j], m, rel, bound) for j in scott.judgments]
    missing = [j for j in rel.judgments if j not in scott]
    return CollapseReport(m, bound, cfg, scott, rel, lines, missing)
