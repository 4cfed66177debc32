"""Property suites over generated and corpus instances.

Each suite returns a :class:`SuiteResult`; failures carry the instance and a
message, and the smallest failing instance is the reproducer.  The CLI's
``properties`` command and the acceptance tests both run these.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import approx, frontend
from .action import (_co_bag, compose_check, compose_check_contra, identity_check,
                     interchange_check)
from .collapse import validate_scott_leq, verify_collapse
from .confluence import commute, explore, join_peak, key, peaks, random_walk
from .errors import BoundExceeded, CalculusError
from .eta import (EtaDerivation, Head, all_names, canonical, eta_of, eta_size,
                  format_eta, from_eta_long, occ, occ_seq, rename_free, type_of)
from .generate import (GenConfig, random_derivation, random_into, random_term,
                       random_type_from, reducible_derivations)
from .lam import parse_lambda, strip_types
from .morph import (ContextMorphism, IndexMap, ListMorphism, arrows, compose, direct_sum,
                    identity, morphism_depth)
from .rewrite import (Kind, Strategy, exp_normalize, is_planar, normalize, redexes, size_of,
                      step_closure, substitute_term)
from .terms import check as check_resource

MAX_NODES = 5000


@dataclass
class Failure:
    index: int
    size: int
    instance: str
    message: str


@dataclass
class SuiteResult:
    name: str
    instances: int = 0
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, index: int, instance, message: str, size: Optional[int] = None):
        text = instance if isinstance(instance, str) else str(instance)
        if size is None:
            size = eta_size(instance.term) if isinstance(instance, EtaDerivation) else len(text)
        self.failures.append(Failure(index, size, text, message))

    @property
    def reproducer(self) -> Optional[Failure]:
        return min(self.failures, key=lambda f: (f.size, f.index), default=None)

    def line(self) -> str:
        status = "pass" if self.ok else "FAIL"
        extra = "; ".join(self.notes)
        return f"{status} {self.name}: {self.instances} instances, {len(self.failures)} failures" + (
            f" ({extra})" if extra else "")


def _guard(res: SuiteResult, index: int, instance, fn: Callable):
    """Run ``fn``; a raised calculus error or false result is recorded as a failure."""
    try:
        verdict = fn()
    except (CalculusError, AssertionError, ValueError) as e:
        res.fail(index, instance, f"{type(e).__name__}: {e}")
        return None
    if verdict is False:
        res.fail(index, instance, "law does not hold")
    return verdict


# ---------------------------------------------------------------- rewriting

def termination(count: int = 500, seed: int = 0, max_size: int = 25) -> SuiteResult:
    """Finite acyclic reduction graphs; every linear edge shrinks the derivation."""
    res = SuiteResult("termination")
    edges = 0
    for i, d in enumerate(reducible_derivations(count, seed, max_size=max_size)):
        res.instances += 1
        try:
            g = explore(d, max_nodes=MAX_NODES)
        except BoundExceeded as e:
            res.fail(i, d, f"budget: {e}")
            continue
        if not g.is_acyclic():
            res.fail(i, d, "reduction graph has a cycle")
        for e in g.edges:
            edges += 1
            if e.kind is Kind.LIN and size_of(g.nodes[e.target]) >= size_of(g.nodes[e.source]):
                res.fail(i, d, f"linear step at {e.position} does not shrink {format_eta(g.nodes[e.source].term)}")
    res.notes.append(f"{edges} edges")
    return res


def local_confluence(count: int = 300, seed: int = 0, max_size: int = 25) -> SuiteResult:
    """Every critical pair closes with equal composite labels."""
    res = SuiteResult("peaks")
    i = seed
    while res.instances < count:
        d = random_derivation(i, max_size=max_size)
        for p1, p2 in peaks(d):
            if res.instances >= count:
                break
            res.instances += 1

            def run():
                j = join_peak(d, p1, p2, MAX_NODES)
                return j.left.label.then(j.h1) == j.right.label.then(j.h2)

            _guard(res, i, d, run)
        i += 1
    return res


def commutation(count: int = 200, seed: int = 0, max_size: int = 25) -> SuiteResult:
    """``s ->lin* t ->exp* t'`` rearranges to ``s ->exp* u ->lin* u'`` with ``t' ~ u'``."""
    res = SuiteResult("commutation")
    rng = random.Random(seed)
    i = seed
    while res.instances < count:
        d = random_derivation(i, max_size=max_size)
        i += 1
        lin = random_walk(d, Kind.LIN, rng)
        t = lin[-1].result if lin else d
        ex = random_walk(t, Kind.EXP, rng)
        if not lin and not ex:
            continue
        tp = ex[-1].result if ex else t
        res.instances += 1
        _guard(res, i - 1, d, lambda: commute(d, tp, MAX_NODES) is not None)
    return res


def confluence(count: int = 100, seed: int = 0, max_size: int = 15) -> SuiteResult:
    """Brute-force reduction graphs have one normal form, which every strategy reaches."""
    res = SuiteResult("confluence")
    for i, d in enumerate(reducible_derivations(count, seed, max_size=max_size)):
        res.instances += 1
        try:
            g = explore(d, max_nodes=MAX_NODES)
        except BoundExceeded as e:
            res.fail(i, d, f"budget: {e}")
            continue
        nfs = g.normal_forms()
        if len(nfs) != 1:
            res.fail(i, d, f"{len(nfs)} normal forms")
            continue
        want = key(g.nodes[nfs[0]])
        for strategy in Strategy:
            got = normalize(d, strategy, seed=i).derivation
            if key(got) != want:
                res.fail(i, d, f"{strategy.value} reaches {format_eta(got.term)}")
    return res


# ---------------------------------------------------------------- actions and substitution

def _random_context_morphism(rng, ctx, depth: int) -> Optional[ContextMorphism]:
    """A random ``theta : delta -> ctx`` whose parts have depth at most ``depth``.

    Identities on deep types are deep themselves, so parts are redrawn
    shallower until they fit; None when some entry admits no such part.
    """
    parts = []
    for _, xs in ctx.entries:
        for d in range(depth - 1, -1, -1):
            m = random_into(rng, xs, d)
            if morphism_depth(m) <= depth:
                break
        else:
            return None
        parts.append(m)
    return ContextMorphism(ctx.names, tuple(parts))


def actions(count: int = 300, seed: int = 0, depth: int = 3, max_size: int = 25) -> SuiteResult:
    """Identity, composition (both variances) and interchange, residuals included."""
    res = SuiteResult("actions")
    rng = random.Random(seed)
    deepest = 0
    i = 0
    while res.instances < count:
        d = random_derivation(seed * 100003 + i, max_size=max_size)
        i += 1
        f = random_type_from(rng, d.type, depth)
        g = random_type_from(rng, f.cod, depth)
        theta = _random_context_morphism(rng, d.context, depth)
        eta = theta and _random_context_morphism(rng, theta.source, depth)
        if eta is None or max(morphism_depth(f), morphism_depth(g)) > depth:
            continue
        res.instances += 1
        deepest = max([deepest, morphism_depth(f), morphism_depth(g)]
                      + [morphism_depth(p) for p in theta.parts + eta.parts])
        _guard(res, i, d, lambda: identity_check(d))
        _guard(res, i, d, lambda: compose_check(d, f, g))
        _guard(res, i, d, lambda: compose_check_contra(d, theta, eta))
        _guard(res, i, d, lambda: interchange_check(d, f, theta))
    res.notes.append(f"deepest morphism {deepest}")
    if deepest > depth:
        res.fail(-1, f"depth {deepest}", f"generated a morphism deeper than {depth}")
    return res


@dataclass(frozen=True)
class SubstInstance:
    s: object
    x: str
    y: str
    bag_x: tuple
    bag_y: tuple

    def __str__(self):
        show = lambda bag: "[" + ", ".join(format_eta(t) for t in bag) + "]"
        return (f"s = {format_eta(self.s)}; {self.x} := {show(self.bag_x)}; "
                f"{self.y} := {show(self.bag_y)}")


def _subst_bag(bag: tuple, x: str, qs: tuple):
    """Substitute into a whole bag by wrapping it under a fresh head."""
    used = set().union(*(all_names(t) for t in bag)) | set(occ_seq((qs,)))
    name = next(f"h{i}" for i in itertools.count() if f"h{i}" not in used)
    holder = Head(name, arrows((tuple(type_of(t) for t in bag),)), (tuple(bag),))
    out, sigma = substitute_term(holder, x, qs)
    return out.args[0], sigma


def random_subst_instance(rng, cfg: GenConfig = GenConfig(depth=2)) -> Optional[SubstInstance]:
    """``s`` with free ``X`` and ``Y``, a bag for ``X`` mentioning ``Y``, a bag for ``Y``."""
    s = rename_free(rename_free(random_term(rng, cfg), "q", "X"), "y", "Y")
    found = occ(s)
    if "X" not in found or "Y" not in found:
        return None
    bag_x = tuple(rename_free(random_term(rng, cfg, a), "y", "Y") for a in found["X"])
    want = tuple(found["Y"]) + tuple(occ_seq((bag_x,)).get("Y", ()))
    bag_y = tuple(random_term(rng, cfg, a) for a in want)
    counter = itertools.count(1)
    s = canonical(s, counter)
    bag_x = tuple(canonical(t, counter) for t in bag_x)
    bag_y = tuple(canonical(t, counter) for t in bag_y)
    return SubstInstance(s, "X", "Y", bag_x, bag_y)


def _swap_middle(a: tuple, b: tuple, c: tuple, d: tuple) -> ListMorphism:
    """The symmetry ``a.b.c.d -> a.c.b.d``."""
    offs = [0, len(a), len(a) + len(b), len(a) + len(b) + len(c)]
    table = ([offs[0] + i + 1 for i in range(len(a))] + [offs[2] + i + 1 for i in range(len(c))]
             + [offs[1] + i + 1 for i in range(len(b))] + [offs[3] + i + 1 for i in range(len(d))])
    src = a + b + c + d
    return ListMorphism(src, IndexMap(tuple(table), len(src)), tuple(identity(src[i - 1]) for i in table))


def associativity_check(inst: SubstInstance) -> tuple:
    """Both sides of substitution associativity and of its sigma-equation.

    Returns ``(terms_equal, sigma_equal)``.  The bag reindexed by a component
    of sigma has its own residual, which takes the place of the identity on
    the bag's context in the sigma-equation; the two sides start from
    contexts listed in different block orders, related by a symmetry.
    """
    s, x, y, tx, qy = inst.s, inst.x, inst.y, inst.bag_x, inst.bag_y
    k1 = len(occ(s).get(y, ()))
    q1, q2 = qy[:k1], qy[k1:]
    # left: s<t/x><q^[sigma_{s,t}]/y>
    r1, sig1 = substitute_term(s, x, tx)
    src_y = tuple(occ(s).get(y, ())) + tuple(occ_seq((tx,)).get(y, ()))
    q_re, mu = _co_bag(qy, sig1.get(y, identity(src_y)))
    left, sig2 = substitute_term(r1, y, q_re)
    # right: s<q1/y><(t<q2/y>)^[sigma_{s,q1}]/x>
    p1, tau1 = substitute_term(s, y, q1)
    tb, tau2 = _subst_bag(tx, y, q2)
    src_x = tuple(occ(s).get(x, ()))
    tb_re, mu2 = _co_bag(tb, tau1.get(x, identity(src_x)))
    right, tau3 = substitute_term(p1, x, tb_re)
    if left != right:
        return False, False

    blocks = lambda t, n: tuple(occ(t).get(n, ()))
    bag_blocks = lambda bag, n: tuple(occ_seq((bag,)).get(n, ()))
    names = (set(occ(s)) | set(occ_seq((tx,))) | set(occ_seq((qy,)))) - {x, y}
    for n in sorted(names):
        sn, tn = blocks(s, n), bag_blocks(tx, n)
        qn, q1n, q2n = bag_blocks(qy, n), bag_blocks(q1, n), bag_blocks(q2, n)
        get = lambda sig, src: sig.get(n, identity(src))
        first = direct_sum(get(sig1, sn + tn), get(mu, qn))
        lhs = compose(get(sig2, blocks(r1, n) + bag_blocks(q_re, n)), first)
        split = direct_sum(get(tau1, sn + q1n), get(tau2, tn + q2n))
        p1n, tbn = blocks(p1, n), bag_blocks(tb, n)
        mid = direct_sum(identity(p1n), get(mu2, tbn))
        last = get(tau3, p1n + bag_blocks(tb_re, n))
        rhs = compose(last, compose(mid, compose(split, _swap_middle(sn, tn, q1n, q2n))))
        if lhs != rhs:
            return True, False
    return True, True


def substitution(count: int = 200, seed: int = 0) -> SuiteResult:
    res = SuiteResult("substitution")
    rng = random.Random(seed)
    nontrivial = 0
    i = 0
    while res.instances < count:
        i += 1
        inst = random_subst_instance(rng)
        if inst is None:
            continue
        res.instances += 1
        nontrivial += bool(occ_seq((inst.bag_x,)).get("Y"))
        size = eta_size(inst.s) + sum(eta_size(t) for t in inst.bag_x + inst.bag_y)
        try:
            terms_ok, sigma_ok = associativity_check(inst)
        except CalculusError as e:
            res.fail(i, str(inst), f"{type(e).__name__}: {e}", size)
            continue
        if not terms_ok:
            res.fail(i, str(inst), "the two substitution orders give different terms", size)
        elif not sigma_ok:
            res.fail(i, str(inst), "sigma-equation fails", size)
    res.notes.append(f"{nontrivial} with Y free in the bag for X")
    return res


# ---------------------------------------------------------------- embeddings and approximation

def simulation() -> SuiteResult:
    """Every beta-step of every corpus typing factors through an exponential then a linear step."""
    res = SuiteResult("simulation")
    for e, t in frontend.corpus_typings():
        te = frontend.eta_long(t)
        for u in frontend.beta_graph(te):
            for p in frontend.typed_redexes(u.term):
                res.instances += 1
                label = f"{e.name} ({t.system}) at {p}"
                _guard(res, res.instances, label, lambda: frontend.simulate_beta(u, p).ok)
    return res


def _retypes_linearly(d: EtaDerivation) -> bool:
    from .collapse import is_linear_derivation
    again = eta_of(d.context, from_eta_long(d).term)
    return again == d and is_linear_derivation(d)


def fragments() -> SuiteResult:
    """Simple embeddings are qualitative, intersection ones uniform; exponential normal forms planar and linear."""
    res = SuiteResult("fragments")
    for e, t in frontend.corpus_typings():
        d = frontend.embed(frontend.eta_long(t))
        res.instances += 1
        name = f"{e.name} ({t.system})"
        if t.system == frontend.SIMPLE and not approx.is_qualitative(d):
            res.fail(res.instances, name, "simple embedding is not qualitative")
        if t.system == frontend.IDEMPOTENT and not approx.is_uniform(d):
            res.fail(res.instances, name, "intersection embedding is not uniform")
        nf = exp_normalize(d).derivation
        if not is_planar(nf):
            res.fail(res.instances, name, "exponential normal form is not planar")
        if not _retypes_linearly(nf):
            res.fail(res.instances, name, "exponential normal form does not retype linearly")
    return res


def corpus_lambda_terms() -> list:
    """``(name, lambda-term, free names)`` for every corpus entry, annotations dropped."""
    out = []
    for e in frontend.CORPUS + frontend.INTERSECTION_CORPUS:
        m = strip_types(parse_lambda(e.term))
        names = [n.strip().split(":")[0].strip() for n in e.context.split(",") if n.strip()]
        out.append((e.name, m, names))
    return out


def coherence(bound: int = 10) -> SuiteResult:
    """On enumerated approximants: coherence iff a common approximated term; exp steps preserve both."""
    res = SuiteResult("coherence")
    pool = []
    for name, m, names in corpus_lambda_terms():
        for d in approx.enumerate_approximants(m, bound, names=names):
            pool.append((name, m, d))
    pairs = 0
    for (n1, m1, d1), (n2, m2, d2) in itertools.combinations_with_replacement(pool, 2):
        pairs += 1
        coh = approx.coherent(d1.term, d2.term)
        m = approx.common_approximated(d1.term, d2.term)
        both = m is not None and approx.approximates(d1, m) and approx.approximates(d2, m)
        if coh != both:
            res.fail(pairs, f"{d1} / {d2}", f"coherent {coh}, common approximated term {both}")
        if n1 == n2 and not coh:
            res.fail(pairs, f"{d1} / {d2}", f"two approximants of {n1} are not coherent")
    res.instances = pairs
    edges = 0
    for i, (name, m, d) in enumerate(pool):
        for pos, kind in redexes(d):
            if kind is not Kind.EXP:
                continue
            r = step_closure(d, pos).result
            edges += 1
            if not approx.approximates(r, m):
                res.fail(i, d, f"exponential step at {pos} leaves the approximants of {name}")
            if not approx.coherent(r.term, d.term):
                res.fail(i, d, f"exponential step at {pos} breaks coherence")
    res.notes.append(f"{len(pool)} approximants, {edges} exponential edges")
    return res


def uniqueness() -> SuiteResult:
    """Checking a corpus term twice, or from its bare term, gives the identical tree."""
    res = SuiteResult("uniqueness")
    for e, t in frontend.corpus_typings():
        name = f"{e.name} ({t.system})"
        res.instances += 1
        again = e.typing(t.system)
        if again != t:
            res.fail(res.instances, name, "lambda-side derivations differ")
        d = frontend.embed(frontend.eta_long(t))
        for nf in (d, normalize(d).derivation):
            surface = from_eta_long(nf)
            first = check_resource(nf.context, surface.term)
            second = check_resource(nf.context, surface.term)
            if first != second or first != surface:
                res.fail(res.instances, name, f"resource derivation of {format_eta(nf.term)} is not unique")
    return res


def scott_order() -> SuiteResult:
    res = SuiteResult("scott-order")
    pairs, bad = validate_scott_leq(3, 2)
    res.instances = pairs
    for i, (a, b) in enumerate(bad):
        res.fail(i, f"{a} <= {b}", "scott_leq disagrees with the rule closure")
    return res


COLLAPSE_TERMS = (r"\x. x", r"\x. \y. x", r"(\x. x) (\y. y)", r"(\x. x x) (\y. y)")


def collapse(bound: int = 10) -> SuiteResult:
    res = SuiteResult("collapse")
    for i, src in enumerate(COLLAPSE_TERMS):
        rep = verify_collapse(parse_lambda(src), bound)
        res.instances += len(rep.lines)
        res.notes.append(f"{src}: {len(rep.scott)} scott / {len(rep.rel)} rel")
        for l in rep.lines:
            if not l.ok:
                res.fail(i, f"{src} at {l.judgment}", "; ".join(l.reasons))
        for j in rep.missing_in_scott:
            res.fail(i, f"{src} at {j}", "relational judgment missing from scott")
    return res


SUITES = {
    "termination": termination,
    "peaks": local_confluence,
    "commutation": commutation,
    "confluence": confluence,
    "actions": actions,
    "substitution": substitution,
    "simulation": simulation,
    "fragments": fragments,
    "coherence": coherence,
    "uniqueness": uniqueness,
    "scott-order": scott_order,
    "collapse": collapse,
}

COUNTED = {"termination", "peaks", "commutation", "confluence", "actions", "substitution"}


def run_suite(name: str, count: Optional[int] = None, seed: int = 0) -> SuiteResult:
    fn = SUITES[name]
    if name in COUNTED:
        kw = {"seed": seed}
        if count is not None:
            kw["count"] = count
        return fn(**kw)
    return fn()
