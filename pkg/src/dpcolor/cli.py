"""Command-line front end: ``dpcolor <subcommand> ...``.

Machine-readable results go to stdout (``key=value`` lines or CSV); prose
diagnostics go to stderr.  Exit codes: 0 success, 1 reported failure (round
caps, no colouring, failed verdicts, axiom violations), 2 usage or input
error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from typing import Callable, Sequence, TextIO

from . import harness
from .colorer import color_kr_free, color_triangle_free
from .cover import Cover, CoverFormatError, parse_cover, random_cover, validate
from .exact import SearchBudget, chi_dp, find_coloring, ind_count, median_alpha, uncolorable_cover
from .graph import FAMILIES, BudgetExceeded, Graph, GraphFormatError, generate, parse_graph
from .sampler import (
    NeighborhoodInstance,
    enum_uniform,
    glauber_sample,
    layered_sample,
    star_sample,
)
from .seeding import DEFAULT_SEED, derive_seed

log = logging.getLogger("dpcolor")


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_graph(path: str) -> Graph:
    return parse_graph(_read(path))


def _load_cover(path: str, g: Graph) -> Cover:
    return parse_cover(_read(path), g)


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _emit(out: TextIO, lines: Sequence[str]) -> None:
    for line in lines:
        out.write(line + "\n")


def _dump_coloring(out: TextIO, coloring: dict[int, int]) -> None:
    _emit(out, [f"{u} -> {i}" for u, i in sorted(coloring.items())])


# --- subcommands -------------------------------------------------------------


def cmd_gen_graph(args, out: TextIO) -> int:
    params = {"seed": args.seed}
    for key in ("n", "m", "p", "d", "r"):
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    try:
        g = generate(args.family, **params)
    except KeyError as exc:
        raise UsageError(f"family {args.family} needs --{exc.args[0]}") from None
    out.write(g.to_text())
    return 0


def cmd_gen_cover(args, out: TextIO) -> int:
    g = _load_graph(args.graph)
    c = random_cover(g, args.k, args.seed, mode=args.mode, p=args.p)
    out.write(c.to_text())
    return 0


def cmd_validate(args, out: TextIO) -> int:
    g = _load_graph(args.graph)
    c = _load_cover(args.cover, g)
    violations = validate(c)
    lines = [f"violation={v.axiom} message={v.message!r} witness={v.witness}" for v in violations]
    lines.append(f"valid={'true' if not violations else 'false'}")
    _emit(out, lines)
    return 1 if violations else 0


def cmd_color(args, out: TextIO) -> int:
    g = _load_graph(args.graph)
    cover = _load_cover(args.cover, g) if args.cover else None
    if cover is not None and validate(cover):
        raise UsageError("cover violates the cover axioms; run 'validate' for details")
    if args.mode == "tf":
        report = color_triangle_free(
            g,
            args.eps,
            args.seed,
            cover=cover,
            k=args.k,
            ell=args.ell,
            degree_cap=args.degree_cap,
            max_rounds=args.max_rounds,
        )
    else:
        report = color_kr_free(g, args.r, args.seed, cover=cover, k=args.k, ell=args.ell, max_rounds=args.max_rounds)
    _emit(out, report.lines())
    if args.dump and report.coloring is not None:
        _dump_coloring(out, report.coloring)
    return 0 if report.success else 1


def cmd_exact_chi(args, out: TextIO) -> int:
    g = _load_graph(args.graph)
    budget = SearchBudget(args.budget)
    value = chi_dp(g, args.kmax, budget)
    if value is None:
        out.write(f"chi_dp=none kmax={args.kmax}\n")
        return 1
    out.write(f"chi_dp={value}\n")
    if args.witness and value > 1:
        witness = uncolorable_cover(g, value - 1, SearchBudget(args.budget))
        out.write(witness.to_text())
    return 0


def cmd_exact_find(args, out: TextIO) -> int:
    g = _load_graph(args.graph)
    c = _load_cover(args.cover, g)
    coloring = find_coloring(c, SearchBudget(args.budget))
    if coloring is None:
        out.write("result=none\n")
        return 1
    out.write("result=found\n")
    _dump_coloring(out, coloring)
    return 0


def cmd_exact_ind(args, out: TextIO) -> int:
    g = _load_graph(args.graph)
    _emit(out, [f"ind={ind_count(g)}", f"median_alpha={median_alpha(g)}"])
    return 0


def _fixed_for(args, c: Cover) -> dict[int, int]:
    if args.fixed == "empty":
        return {}
    return harness.default_fixed(c, args.u, args.seed)


def cmd_sample(args, out: TextIO) -> int:
    g = _load_graph(args.graph)
    c = _load_cover(args.cover, g)
    if not 0 <= args.u < g.n:
        raise UsageError(f"vertex {args.u} out of range")
    inst = NeighborhoodInstance.from_partial(c, args.u, _fixed_for(args, c))
    rng = random.Random(derive_seed(args.seed, "sample"))
    draw: Callable[[], dict[int, int]]
    if args.mode == "enum":
        draw = lambda: enum_uniform(inst, rng)  # noqa: E731
    elif args.mode == "star":
        draw = lambda: star_sample(inst, rng)  # noqa: E731
    elif args.mode == "layered":
        draw = lambda: layered_sample(inst, args.threshold, rng)[0]  # noqa: E731
    else:
        draw = lambda: glauber_sample(c, inst.neighbors, args.steps, rng, fixed=inst.fixed)  # noqa: E731
    nbrs = inst.neighbors
    if args.freq:
        counts: dict[str, int] = {}
        for _ in range(args.samples):
            s = draw()
            key = " ".join(f"{v}:{s[v]}" for v in nbrs if v in s)
            counts[key] = counts.get(key, 0) + 1
        out.write("state,count,frequency\n")
        for key in sorted(counts):
            out.write(f"{key},{counts[key]},{counts[key] / args.samples!r}\n")
        return 0
    out.write(",".join(["trial"] + [f"v{v}" for v in nbrs]) + "\n")
    for t in range(args.samples):
        s = draw()
        out.write(",".join([str(t)] + [str(s[v]) if v in s else "" for v in nbrs]) + "\n")
    return 0


def _experiment_cover(args) -> tuple[Cover, int]:
    if args.graph:
        g = _load_graph(args.graph)
        if not args.cover:
            raise UsageError("--graph needs --cover")
        c = _load_cover(args.cover, g)
        if not 0 <= args.u < g.n:
            raise UsageError(f"vertex {args.u} out of range")
        return c, args.u
    inst = harness.seeded_instance(
        derive_seed(args.seed, "instance"),
        degree=args.degree,
        outer=args.outer,
        k=args.k,
        density=args.density,
        inner=args.inner,
    )
    return inst.cover, inst.u


def cmd_experiment(args, out: TextIO) -> int:
    kind = args.experiment
    if kind == "sweep":
        rows = harness.sweep(
            args.family,
            args.degrees,
            args.multipliers,
            args.trials,
            args.seed,
            n=args.n,
            eps=args.eps,
            max_rounds=args.max_rounds,
            threads=args.threads,
        )
        text = harness.sweep_csv(rows)
        if args.json:
            text = json.dumps(rows, indent=2) + "\n"
        _write(args, out, text)
        return 0
    if kind == "shearer":
        report = harness.shearer_experiment(args.r, args.n_max, args.samples, args.seed, strict=False)
    elif kind == "chernoff" and not args.empirical:
        bound = harness.chernoff_check(args.expectation, args.delta, args.side)
        _write(args, out, f"bound={bound!r}\n")
        return 0
    else:
        c, u = _experiment_cover(args)
        if kind == "survival":
            report = harness.survival_experiment(c, u, args.ell, args.trials, args.seed)
        elif kind == "negcorr":
            report = harness.negcorr_experiment(c, u, args.seed)
        elif kind == "chernoff":
            report = harness.chernoff_experiment(c, u, args.delta, args.side, args.trials, args.seed)
        else:
            report = harness.factorial_bound_experiment(c, u, args.ell, args.trials, args.seed)
    _write(args, out, report.to_json() if args.json else report.to_csv())
    for v in report.verdicts:
        print(f"{v.name}: {'PASS' if v.passed else 'FAIL'}{'' if v.gated else ' (report only)'} [{v.inequality}]",
              file=sys.stderr)
    return 0 if report.passed else 1


def _write(args, out: TextIO, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


# --- parser ------------------------------------------------------------------


def _graph_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("graph_path", nargs="?", metavar="GRAPH", help="edge-list file ('-' for stdin)")
    p.add_argument("--graph", dest="graph_flag", metavar="GRAPH", help="same as the positional GRAPH")


def _seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dpcolor", description="DP-colouring tools")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate graphs and covers")
    gsub = gen.add_subparsers(dest="what", required=True)
    gg = gsub.add_parser("graph", help="graph from a family, as an edge list")
    gg.add_argument("--family", choices=FAMILIES, required=True)
    gg.add_argument("--n", type=int)
    gg.add_argument("--m", type=int, help="second part size (random_bipartite)")
    gg.add_argument("--p", type=float, help="edge probability (random_bipartite)")
    gg.add_argument("--d", type=float, help="target average degree (random_*_free)")
    gg.add_argument("--r", type=int, help="forbidden clique size (random_kr_free)")
    _seed(gg)
    gg.set_defaults(func=cmd_gen_graph)
    gc = gsub.add_parser("cover", help="random k-fold cover of a graph")
    gc.add_argument("--graph", required=True)
    gc.add_argument("--k", type=int, required=True)
    gc.add_argument("--mode", choices=("perfect", "density"), default="perfect")
    gc.add_argument("--p", type=float, default=1.0, help="pair density for --mode density")
    _seed(gc)
    gc.set_defaults(func=cmd_gen_cover)

    val = sub.add_parser("validate", help="check a cover against the cover axioms")
    val.add_argument("--graph", required=True)
    val.add_argument("--cover", required=True)
    val.set_defaults(func=cmd_validate)

    col = sub.add_parser("color", help="run the randomized two-phase colourer")
    col.add_argument("--graph", required=True)
    col.add_argument("--cover")
    col.add_argument("--mode", choices=("tf", "kr"), required=True)
    col.add_argument("--eps", type=float, default=0.5)
    col.add_argument("--r", type=int, default=4)
    col.add_argument("--k", type=int)
    col.add_argument("--ell", type=int, help="override the survival threshold")
    col.add_argument("--degree-cap", type=int, help="phase-1 cross-degree cap (tf mode)")
    col.add_argument("--max-rounds", type=int)
    col.add_argument("--dump", action="store_true", help="print 'u -> slot' lines on success")
    _seed(col)
    col.set_defaults(func=cmd_color)

    ex = sub.add_parser("exact", help="exact solvers for small instances")
    esub = ex.add_subparsers(dest="what", required=True)
    ec = esub.add_parser("chi-dp", help="DP-chromatic number by cover enumeration")
    _graph_arg(ec)
    ec.add_argument("--kmax", type=int, default=4)
    ec.add_argument("--budget", type=int, default=10**7, help="search node budget")
    ec.add_argument("--witness", action="store_true", help="print an uncolourable cover with one colour fewer")
    ec.set_defaults(func=cmd_exact_chi)
    ef = esub.add_parser("find", help="search for a colouring of a cover")
    _graph_arg(ef)
    ef.add_argument("--cover", required=True)
    ef.add_argument("--budget", type=int, default=10**7)
    ef.set_defaults(func=cmd_exact_find)
    ei = esub.add_parser("ind", help="independent-set count and median size")
    _graph_arg(ei)
    ei.set_defaults(func=cmd_exact_ind)

    sp = sub.add_parser("sample", help="draw independent subsets of a neighbourhood's residual lists")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--cover", required=True)
    sp.add_argument("--focus", dest="u", type=int, required=True, help="focus vertex u")
    sp.add_argument("--mode", choices=("enum", "star", "layered", "glauber"), required=True)
    sp.add_argument("--trials", dest="samples", type=int, default=10)
    sp.add_argument("--freq", action="store_true", help="print a frequency table instead of one line per trial")
    sp.add_argument("--fixed", choices=("glauber", "empty"), default="glauber",
                    help="picks outside N[u]: a seeded Glauber draw or none")
    sp.add_argument("--threshold", type=int, help="layered mode: ind threshold")
    sp.add_argument("--steps", type=int, help="glauber mode: chain length")
    _seed(sp)
    sp.set_defaults(func=cmd_sample)

    xp = sub.add_parser("experiment", help="Monte-Carlo and exact experiments")
    xp.add_argument("experiment", choices=("survival", "negcorr", "chernoff", "shearer", "factorial", "sweep"))
    xp.add_argument("--out", help="write the result here instead of stdout")
    xp.add_argument("--json", action="store_true", help="emit the full report as JSON")
    xp.add_argument("--threads", type=int, default=1, help="worker processes (sweep only)")
    xp.add_argument("--graph", help="instance graph (default: a seeded instance)")
    xp.add_argument("--cover")
    xp.add_argument("--u", type=int, default=0)
    xp.add_argument("--degree", type=int, default=3, help="seeded instance: degree of the focus vertex")
    xp.add_argument("--outer", type=int, default=4, help="seeded instance: outer vertices")
    xp.add_argument("--k", type=int, default=3, help="seeded instance: list size")
    xp.add_argument("--density", type=float, default=0.7, help="seeded instance: cover pair density")
    xp.add_argument("--inner", type=float, default=0.0, help="seeded instance: edge probability inside N(u)")
    xp.add_argument("--ell", type=float, default=2)
    xp.add_argument("--trials", type=int, default=10000)
    xp.add_argument("--delta", type=float, default=0.5, help="chernoff: deviation")
    xp.add_argument("--side", choices=("lower", "upper"), default="lower")
    xp.add_argument("--expectation", type=float, default=1.0, help="chernoff: E[X] for the pure bound")
    xp.add_argument("--empirical", action="store_true", help="chernoff: sample a seeded instance")
    xp.add_argument("--r", type=int, default=4)
    xp.add_argument("--n-max", type=int, default=18)
    xp.add_argument("--samples", type=int, default=100)
    xp.add_argument("--family", choices=harness.SWEEP_FAMILIES, default="random_triangle_free")
    xp.add_argument("--degrees", type=_csv_floats, default=[8.0, 16.0])
    xp.add_argument("--multipliers", type=_csv_floats, default=[1.0, 1.5, 2.0])
    xp.add_argument("--n", type=int, default=200)
    xp.add_argument("--eps", type=float, default=0.5)
    xp.add_argument("--max-rounds", type=int)
    _seed(xp)
    xp.set_defaults(func=cmd_experiment)
    return parser


def run(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if hasattr(args, "graph_flag"):
        args.graph = args.graph_flag or args.graph_path
        if args.graph is None:
            print("error: a graph file is required", file=sys.stderr)
            return 2
    try:
        return args.func(args, out)
    except (UsageError, GraphFormatError, CoverFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        out.write("result=budget\n")
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # the reader went away (e.g. `| head`); silence the flush at interpreter exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 0
    sys.exit(code)

