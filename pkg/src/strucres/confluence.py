"""Isomorphism of terms, reduction graphs, peak joining and commutation search."""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .errors import BoundExceeded, JoinFailed
from .eta import EtaDerivation, Head, Redex, canonical, format_eta
from .morph import (Arrow, ContextMorphism, IndexMap, ListMorphism, ground, is_identity)
from .rewrite import Kind, ReductionLabel, Step, normalize, redexes, step_closure

DEFAULT_MAX_NODES = 20000


# ---------------------------------------------------------------- isomorphism

@dataclass(frozen=True)
class IsoWitness:
    """``theta`` is a ground permutation between the two contexts when their lists agree as multisets."""
    theta: Optional[ContextMorphism]
    exact: bool


def erase(a):
    """Forget list order everywhere: the multiset image of a type."""
    if isinstance(a, Arrow):
        return ("->", tuple(sorted((erase(b) for b in a.source), key=repr)), erase(a.target))
    return "o"


def _same_type(a, b, strict: bool) -> bool:
    return a == b if strict else erase(a) == erase(b)


def _same_nested(f, g, strict: bool) -> bool:
    if f == g:
        return True
    if strict:
        return False
    return is_identity(f) and is_identity(g) and erase(f.dom) == erase(g.dom)


def _annotations_match(f: ListMorphism, g: ListMorphism, strict: bool) -> bool:
    """``g = sigma . f . rho`` for ground permutations ``sigma`` and ``rho`` (``rho`` trivial when strict)."""
    if len(f.source) != len(g.source) or len(f.nested) != len(g.nested):
        return False
    n = len(f.nested)
    used = [False] * n
    pi = {}

    def place(j):
        if j == n:
            return _finish(pi)
        for k in range(n):
            if used[k] or not _same_nested(f.nested[k], g.nested[j], strict):
                continue
            a, b = f.alpha(k + 1), g.alpha(j + 1)
            if strict and a != b:
                continue
            if pi.get(a, b) != b or (a not in pi and b in pi.values()):
                continue
            fresh = a not in pi
            pi[a] = b
            used[k] = True
            if place(j + 1):
                return True
            used[k] = False
            if fresh:
                del pi[a]
        return False

    def _finish(pi):
        free_f = [i for i in range(1, len(f.source) + 1) if i not in pi]
        free_g = sorted(set(range(1, len(g.source) + 1)) - set(pi.values()))
        for a, b in pi.items():
            if not _same_type(f.source[a - 1], g.source[b - 1], strict):
                return False
        if strict:
            return all(a == b for a, b in zip(free_f, free_g))
        pool = list(free_g)
        for a in free_f:
            hit = next((b for b in pool if _same_type(f.source[a - 1], g.source[b - 1], False)), None)
            if hit is None:
                return False
            pool.remove(hit)
        return True

    return place(0)


def _iso_terms(s, t, strict: bool) -> bool:
    if type(s) is not type(t):
        return False
    if isinstance(s, Head):
        if s.name != t.name or not _same_type(s.type, t.type, strict):
            return False
        return _iso_args(s.args, t.args, strict)
    if isinstance(s, Redex):
        return _iso_terms(s.fun, t.fun, strict) and _iso_args(s.args, t.args, strict)
    if s.names != t.names:
        return False
    if not all(_annotations_match(f, g, strict) for f, g in zip(s.annotations, t.annotations)):
        return False
    return _iso_terms(s.body, t.body, strict)


def _iso_args(xs, ys, strict):
    if len(xs) != len(ys):
        return False
    for b1, b2 in zip(xs, ys):
        if len(b1) != len(b2):
            return False
        if not all(_iso_terms(a, b, strict) for a, b in zip(b1, b2)):
            return False
    return True


def _context_witness(c1, c2) -> Optional[ContextMorphism]:
    if c1.names != c2.names:
        return None
    parts = []
    for n in c1.names:
        xs, ys = c1.lookup(n), c2.lookup(n)
        if sorted(map(repr, xs)) != sorted(map(repr, ys)):
            return None
        pool = list(range(1, len(xs) + 1))
        table = []
        for y in ys:
            k = next(i for i in pool if xs[i - 1] == y)
            pool.remove(k)
            table.append(k)
        parts.append(ground(xs, IndexMap(tuple(table), len(xs))))
    return ContextMorphism(c1.names, tuple(parts))


def iso(d1: EtaDerivation, d2: EtaDerivation, strict: bool = False) -> Optional[IsoWitness]:
    """``d1`` and ``d2`` are isomorphic: same skeleton up to alpha, annotations related by
    ground permutations on both sides; ``strict`` forbids reordering binder sources and types."""
    if d1.names != d2.names:
        return None
    if not _iso_terms(canonical(d1.term), canonical(d2.term), strict):
        return None
    theta = _context_witness(d1.context, d2.context)
    return IsoWitness(theta, theta is not None and d1.context == d2.context and d1.type == d2.type)


# ---------------------------------------------------------------- reduction graphs

def key(d: EtaDerivation):
    return (d.context, canonical(d.term))


@dataclass(frozen=True)
class Edge:
    source: int
    position: tuple
    kind: Kind
    label: ReductionLabel
    target: int


@dataclass
class ReductionGraph:
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    index: dict = field(default_factory=dict)

    def add(self, d) -> tuple:
        k = key(d)
        if k in self.index:
            return self.index[k], False
        self.index[k] = len(self.nodes)
        self.nodes.append(d)
        return self.index[k], True

    def successors(self, i: int) -> list:
        return [e for e in self.edges if e.source == i]

    def normal_forms(self) -> list:
        has_out = {e.source for e in self.edges}
        return [i for i in range(len(self.nodes)) if i not in has_out]

    def is_acyclic(self) -> bool:
        out = {}
        for e in self.edges:
            out.setdefault(e.source, []).append(e.target)
        state = {}
        for root in range(len(self.nodes)):
            if root in state:
                continue
            stack = [(root, iter(out.get(root, ())))]
            state[root] = 1
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    state[node] = 2
                    stack.pop()
                elif state.get(nxt) == 1:
                    return False
                elif nxt not in state:
                    state[nxt] = 1
                    stack.append((nxt, iter(out.get(nxt, ()))))
        return True


def explore(d: EtaDerivation, only: Optional[Kind] = None, max_nodes: int = DEFAULT_MAX_NODES) -> ReductionGraph:
    """Every reduct of ``d`` and every step between them."""
    g = ReductionGraph()
    g.add(d)
    todo = deque([0])
    while todo:
        i = todo.popleft()
        for pos, kind in redexes(g.nodes[i]):
            if only is not None and kind is not only:
                continue
            st = step_closure(g.nodes[i], pos)
            j, new = g.add(st.result)
            g.edges.append(Edge(i, pos, kind, st.label, j))
            if new:
                if len(g.nodes) > max_nodes:
                    raise BoundExceeded(f"reduction graph exceeds {max_nodes} nodes")
                todo.append(j)
    return g


def reachable_labels(d: EtaDerivation, only: Optional[Kind] = None, max_nodes: int = DEFAULT_MAX_NODES) -> dict:
    """Map each reduct key to (derivation, set of composite labels over all paths)."""
    g = explore(d, only, max_nodes)
    order = _topological(g)
    labels = {0: {ReductionLabel.unit(d)}}
    for i in order:
        for e in g.successors(i):
            bucket = labels.setdefault(e.target, set())
            for l in labels.get(i, ()):
                bucket.add(l.then(e.label))
    return {key(g.nodes[i]): (g.nodes[i], labels.get(i, set())) for i in range(len(g.nodes))}


def _topological(g: ReductionGraph) -> list:
    indeg = [0] * len(g.nodes)
    for e in g.edges:
        indeg[e.target] += 1
    queue = deque(i for i, k in enumerate(indeg) if k == 0)
    out = []
    while queue:
        i = queue.popleft()
        out.append(i)
        for e in g.successors(i):
            indeg[e.target] -= 1
            if indeg[e.target] == 0:
                queue.append(e.target)
    return out


# ---------------------------------------------------------------- peaks

@dataclass(frozen=True)
class PeakJoin:
    target: EtaDerivation
    left: Step
    right: Step
    h1: ReductionLabel
    h2: ReductionLabel


def join_peak(d: EtaDerivation, p1, p2, max_nodes: int = DEFAULT_MAX_NODES) -> PeakJoin:
    """Close the peak ``d -> d1``, ``d -> d2`` with ``h1 . l1 = h2 . l2``.

    Tries the common normal form first, then every common reduct and path.
    """
    s1, s2 = step_closure(d, p1), step_closure(d, p2)
    n1, n2 = normalize(s1.result), normalize(s2.result)
    if key(n1.derivation) == key(n2.derivation):
        if s1.label.then(n1.label) == s2.label.then(n2.label):
            return PeakJoin(n1.derivation, s1, s2, n1.label, n2.label)
    r1 = reachable_labels(s1.result, max_nodes=max_nodes)
    r2 = reachable_labels(s2.result, max_nodes=max_nodes)
    for k, (t, hs1) in r1.items():
        if k not in r2:
            continue
        for h1 in hs1:
            for h2 in r2[k][1]:
                if s1.label.then(h1) == s2.label.then(h2):
                    return PeakJoin(t, s1, s2, h1, h2)
    raise JoinFailed(f"peak at {p1} / {p2} of {format_eta(d.term)} does not close:\n"
                     f"  left  {format_eta(n1.derivation.term)}\n  right {format_eta(n2.derivation.term)}")


def peaks(d: EtaDerivation) -> list:
    rs = [p for p, _ in redexes(d)]
    return [(a, b) for i, a in enumerate(rs) for b in rs[i + 1:]]


# ---------------------------------------------------------------- commutation

def random_walk(d: EtaDerivation, kind: Kind, rng: random.Random, max_steps: int = 50) -> list:
    trace = []
    cur = d
    for _ in range(max_steps):
        rs = [p for p, k in redexes(cur) if k is kind]
        if not rs or rng.random() < 0.15:
            break
        st = step_closure(cur, rng.choice(rs))
        trace.append(st)
        cur = st.result
    return trace


@dataclass(frozen=True)
class Commutation:
    source: EtaDerivation
    t_prime: EtaDerivation
    u: EtaDerivation
    u_prime: EtaDerivation
    witness: IsoWitness


def commute(s: EtaDerivation, t_prime: EtaDerivation, max_nodes: int = DEFAULT_MAX_NODES) -> Commutation:
    """Given ``s ->lin* t ->exp* t'``, find ``s ->exp* u ->lin* u'`` with ``t' ~ u'``."""
    exps = explore(s, Kind.EXP, max_nodes)
    for u in exps.nodes:
        lins = explore(u, Kind.LIN, max_nodes)
        for u2 in lins.nodes:
            w = iso(t_prime, u2)
            if w is not None:
                return Commutation(s, t_prime, u, u2, w)
    raise JoinFailed(f"no exp-then-lin rearrangement of {format_eta(s.term)} reaches {format_eta(t_prime.term)}")
