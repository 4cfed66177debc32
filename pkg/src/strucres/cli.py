"""Command-line interface: ``python -m strucres <command> ...``.

Exit codes: 0 success, 1 user error (parse, typing, budget), 2 a property
suite or collapse check found a counterexample, 3 internal invariant breach.
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys

from . import frontend
from .approx import enumerate_approximants
from .action import contravariant, covariant
from .collapse import verify_collapse
from .errors import CalculusError
from .eta import EtaDerivation, format_eta, format_path, from_eta_long
from .lam import format_lambda, parse_lambda, parse_lcontext
from .morph import Flavor, format_context, format_type
from .rewrite import Kind, Strategy, format_trace, normalize
from .suites import SUITES, run_suite
from .syntax import load_derivation, parse_context_morphism, parse_morphism
from .terms import format_derivation

EXIT_OK, EXIT_USER, EXIT_COUNTEREXAMPLE, EXIT_INTERNAL = 0, 1, 2, 3

DEFAULTS = {"seed": 0, "step_budget": 10 ** 6, "strategy": "leftmost-outermost", "bound": 10, "count": None}


class UserError(Exception):
    pass


def read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UserError(f"cannot read {path}: {e.strerror}") from None


def load_config(path) -> dict:
    """``key = value`` lines; unknown keys are rejected."""
    cfg = dict(DEFAULTS)
    if not path:
        return cfg
    parser = configparser.ConfigParser()
    parser.read_string("[run]\n" + read_source(path))
    for k, v in parser["run"].items():
        if k not in DEFAULTS:
            raise UserError(f"unknown config key {k!r}")
        cfg[k] = v if k == "strategy" else int(v)
    return cfg


def load_resource(path: str) -> EtaDerivation:
    return load_derivation(read_source(path))


def split_lambda_judgment(text: str):
    """``ctx |- M : A`` with context and type optional.

    The type is the part after the last top-level colon that is not a binder
    annotation (a binder annotation is always followed by a dot).
    """
    ctx, _, rest = text.rpartition("|-")
    depth, cut = 0, None
    for i, ch in enumerate(rest):
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        elif ch == ":" and depth == 0 and "." not in rest[i + 1:]:
            cut = i
    if cut is None:
        return ctx.strip(), rest.strip(), None
    return ctx.strip(), rest[:cut].strip(), rest[cut + 1:].strip()


def load_lambda(path: str, system: str = frontend.SIMPLE):
    ctx, term, typ = split_lambda_judgment(read_source(path))
    chk = frontend.check_simple if system == frontend.SIMPLE else frontend.check_idempotent
    return chk(ctx, term, typ or None)


def load_lambda_term(path: str):
    ctx, term, _ = split_lambda_judgment(read_source(path))
    names = list(parse_lcontext(ctx)) if ctx else []
    return parse_lambda(term), names


def machine_tree(d, depth: int = 0) -> list:
    from .terms import format_term
    out = [json.dumps({"depth": depth, "rule": d.rule, "context": format_context(d.context),
                       "subject": format_term(d.term) if d.rule != "bag" else [format_term(t) for t in d.term],
                       "type": format_type(d.type)}, ensure_ascii=False)]
    for c in d.children:
        out += machine_tree(c, depth + 1)
    return out


def show_derivation(d: EtaDerivation, fmt: str) -> str:
    tree = from_eta_long(d)
    if fmt == "machine":
        return "\n".join(machine_tree(tree))
    return format_derivation(tree)


def judgment_text(d: EtaDerivation) -> str:
    """The derivation as input text for ``check`` and ``reduce``."""
    return f"{format_context(d.context)} |- {format_eta(d.term)}"


# ---------------------------------------------------------------- commands

def cmd_check(args, cfg) -> int:
    d = load_resource(args.file)
    print(show_derivation(d, args.format))
    print(f"type {format_type(d.type)}")
    return EXIT_OK


def cmd_reduce(args, cfg) -> int:
    d = load_resource(args.file)
    strategy = Strategy(args.strategy or cfg["strategy"])
    only = Kind(args.only) if args.only else None
    seed = args.seed if args.seed is not None else cfg["seed"]
    run = normalize(d, strategy, seed=seed, only=only, budget=cfg["step_budget"])
    trace = format_trace(run.trace, machine=args.format == "machine")
    if args.trace_file:
        with open(args.trace_file, "w", encoding="utf-8") as fh:
            fh.write(trace + ("\n" if trace else ""))
    elif trace:
        print(trace)
    print(f"normal form {run.derivation}")
    print(f"label {run.label}")
    print(f"steps {len(run.trace)}")
    return EXIT_OK


def cmd_embed(args, cfg) -> int:
    system = frontend.SIMPLE if args.system == "simple" else frontend.IDEMPOTENT
    t = load_lambda(args.file, system)
    d = frontend.embed(frontend.eta_long(t))
    if args.format == "machine":
        print(show_derivation(d, "machine"))
    else:
        print(judgment_text(d))
    return EXIT_OK


def cmd_simulate(args, cfg) -> int:
    system = frontend.SIMPLE if args.system == "simple" else frontend.IDEMPOTENT
    te = frontend.eta_long(load_lambda(args.file, system))
    positions = frontend.typed_redexes(te.term)
    if not positions:
        raise UserError("the term has no beta-redex")
    if not 1 <= args.redex <= len(positions):
        raise UserError(f"--redex must be between 1 and {len(positions)}")
    rep = frontend.simulate_beta(te, positions[args.redex - 1])
    print(f"beta at {format_path(positions[args.redex - 1])}: {format_lambda(frontend.to_lambda(te.term))}"
          f" -> {format_lambda(frontend.to_lambda(rep.reduct.term))}")
    print(format_trace(list(rep.steps), machine=args.format == "machine"))
    print(f"endpoint {rep.endpoint}")
    print(f"target   {rep.target}")
    print(f"label {rep.label}")
    print(f"endpoint matches {'exactly' if system == frontend.SIMPLE else 'up to isomorphism'}: {rep.exact}")
    if rep.label_equation is not None:
        print(f"cart label equation: {rep.label_equation}")
    return EXIT_OK if rep.ok else EXIT_COUNTEREXAMPLE


def cmd_approximants(args, cfg) -> int:
    m, names = load_lambda_term(args.file)
    bound = args.bound if args.bound is not None else cfg["bound"]
    flavor = Flavor.LINEAR if args.flavor == "linear" else Flavor.CARTESIAN
    for d in enumerate_approximants(m, bound, flavor, names=names):
        print(d)
    return EXIT_OK


def cmd_collapse(args, cfg) -> int:
    m, names = load_lambda_term(args.file)
    bound = args.bound if args.bound is not None else cfg["bound"]
    rep = verify_collapse(m, bound, names=names)
    print(rep.format())
    return EXIT_OK if rep.ok else EXIT_COUNTEREXAMPLE


def cmd_properties(args, cfg) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    count = args.count if args.count is not None else cfg["count"]
    seed = args.seed if args.seed is not None else cfg["seed"]
    status = EXIT_OK
    for name in names:
        res = run_suite(name, count, seed)
        print(res.line())
        if not res.ok:
            rep = res.reproducer
            print(f"  reproducer (seed {seed}, instance {rep.index}): {rep.instance}")
            print(f"  {rep.message}")
            status = EXIT_COUNTEREXAMPLE
    return status


def cmd_act(args, cfg) -> int:
    d = load_resource(args.file)
    if (args.co is None) == (args.contra is None):
        raise UserError("give exactly one of --co and --contra")
    if args.co is not None:
        r = covariant(d, parse_morphism(args.co))
    else:
        r = contravariant(d, parse_context_morphism(args.contra))
    print(show_derivation(r.derivation, args.format) if args.format == "machine" else judgment_text(r.derivation))
    print(f"type {format_type(r.derivation.type)}")
    print(f"residual {r.residual}")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="strucres", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="key = value file (seed, step_budget, strategy, bound, count)")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="typecheck a resource judgment and print its derivation")
    c.add_argument("file")
    c.set_defaults(run=cmd_check)

    c = sub.add_parser("reduce", help="normalize with a trace")
    c.add_argument("file")
    c.add_argument("--strategy", choices=[s.value for s in Strategy])
    c.add_argument("--only", choices=("exp", "lin"))
    c.add_argument("--trace-file")
    c.add_argument("--seed", type=int)
    c.set_defaults(run=cmd_reduce)

    c = sub.add_parser("embed", help="coarse approximation of a typed lambda-term")
    c.add_argument("file")
    c.add_argument("--system", choices=("simple", "intersection"), default="simple")
    c.set_defaults(run=cmd_embed)

    c = sub.add_parser("simulate", help="factor a beta-step through structural steps")
    c.add_argument("file")
    c.add_argument("--redex", type=int, default=1, help="1-based, outermost first")
    c.add_argument("--system", choices=("simple", "intersection"), default="simple")
    c.set_defaults(run=cmd_simulate)

    c = sub.add_parser("approximants", help="enumerate approximants of a lambda-term")
    c.add_argument("file")
    c.add_argument("--bound", type=int)
    c.add_argument("--flavor", choices=("linear", "cartesian"), default="cartesian")
    c.set_defaults(run=cmd_approximants)

    c = sub.add_parser("collapse", help="check the collapse up to a judgment bound")
    c.add_argument("file")
    c.add_argument("--bound", type=int)
    c.set_defaults(run=cmd_collapse)

    c = sub.add_parser("properties", help="run a property suite")
    c.add_argument("--suite", choices=["all", *SUITES], default="all")
    c.add_argument("--count", type=int)
    c.add_argument("--seed", type=int)
    c.set_defaults(run=cmd_properties)

    c = sub.add_parser("act", help="apply a morphism to a derivation")
    c.add_argument("file")
    c.add_argument("--co", help="type morphism out of the derivation's type")
    c.add_argument("--contra", help="context morphism into the derivation's context")
    c.set_defaults(run=cmd_act)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.run(args, cfg)
    except (UserError, CalculusError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USER
    except AssertionError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
