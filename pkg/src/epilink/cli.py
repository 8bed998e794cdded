"""Command-line front end: graph extraction, decomposition runs, theorem
verification, PAC-success sweeps, and the weak-epistasis observability
experiment.  Tabular output is CSV, graphs are DOT, everything else JSON."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import decomposition, gasim, graph, oracles
from .model import (
    DEFAULT_CAP,
    AssumptionViolationError,
    EnumerationCapError,
    bits_to_str,
    global_optimum,
)
from .problems import (
    ProblemSpecError,
    make_problem,
    unscale,
    weak_observability_problem,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_THEOREM = 4
EXIT_ASSUMPTION = 5

_KNOWN_KINDS = (
    "onemax",
    "leadingones",
    "ctrap",
    "cyctrap",
    "cniah",
    "leadingtraps",
    "onemax-prime-blocks",
    "lookup-table",
)


def _load_problem(args):
    if args.spec:
        with open(args.spec) as fh:
            spec = json.load(fh)
    else:
        if not args.kind:
            raise ProblemSpecError("pass --spec FILE or --kind with --l/--m")
        spec = {"kind": args.kind}
        if args.l is not None:
            spec["l"] = args.l
        if args.m is not None:
            spec["m"] = args.m
        if args.block_sizes:
            spec["block_sizes"] = [int(x) for x in args.block_sizes.split(",")]
    return make_problem(spec)


def _emit(text: str, output: str | None):
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header_lines: Sequence[str], columns: Sequence[str], rows) -> str:
    lines = [f"# {h}" for h in header_lines]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def cmd_eg(args) -> int:
    problem = _load_problem(args)
    G = graph.build_eg(problem, args.cap)
    cg = graph.condense(G)
    k_scc = max((len(c) for c in cg.components), default=0)
    summary = {
        "problem": problem.name,
        "size": problem.size,
        "edges": len(G.edges),
        "k_scc": k_scc,
        "k_in": G.max_in_degree(),
        "decomposition_difficulty": graph.decomposition_difficulty(G),
    }
    if args.epistasis_order_bound:
        summary["max_epistasis_order"] = graph.max_epistasis_order(
            problem, args.epistasis_order_bound, args.cap
        )
    if args.format == "dot":
        _emit(graph.to_dot(G, problem.name.replace("-", "_")), args.output)
    else:
        payload = graph.to_adjacency(G)
        payload["summary"] = summary
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
    print(json.dumps(summary), file=sys.stderr)
    return EXIT_OK


def cmd_decompose(args) -> int:
    problem = _load_problem(args)
    if args.fixture_partition:
        partition = graph.cyctrap_reference_partition(problem.size)
        partition_source = "fixture"
    else:
        G = graph.build_eg(problem, args.cap)
        partition = graph.topological_partition(G)
        partition_source = "topological"
    result = decomposition.partial_enumeration(problem, partition, args.seed, args.cap)
    optimal = None
    if 2 ** problem.size <= args.cap:
        optimal = bool(result.chromosome == global_optimum(problem, args.cap))
    payload = {
        "problem": problem.name,
        "seed": args.seed,
        "partition_source": partition_source,
        "partition": [sorted(b) for b in partition],
        "chromosome": bits_to_str(result.chromosome),
        "fitness": unscale(result.fitness),
        "evaluations": result.evaluations,
        "optimal": optimal,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_ipe(args) -> int:
    problem = _load_problem(args)
    result = decomposition.ipe(problem, args.n, args.seed, args.subset_order)
    payload = {
        "problem": problem.name,
        "n": args.n,
        "seed": args.seed,
        "outcome": bits_to_str(result.chromosome) if result.succeeded else "failure",
        "evaluations": result.trace.evaluations,
    }
    if args.trace:
        payload["trace"] = result.trace.to_json()
    if result.succeeded and 2 ** problem.size <= args.cap:
        score = oracles.ebacc(
            oracles.hypothesis_from_chromosome(result.chromosome), problem, args.cap
        )
        payload["ebacc"] = float(score.ebacc)
        G = graph.build_eg(problem, args.cap)
        payload["topological_order_ok"] = decomposition.trace_topological_check(
            result.trace, G
        )
    _emit(json.dumps(payload, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    problem = _load_problem(args)
    wanted = [t.strip() for t in args.theorems.split(",") if t.strip()]
    unknown = set(wanted) - {"decomposition", "blanket", "clique"}
    if unknown:
        raise ProblemSpecError(f"unknown theorems: {sorted(unknown)}")
    eg = graph.build_eg(problem, args.cap)
    reports = []
    if "decomposition" in wanted:
        reports.append(
            oracles.verify_decomposition_theorem(
                problem, args.weak_order, args.cap, eg=eg
            )
        )
    if "blanket" in wanted:
        for v in range(problem.size):
            reports.append(
                oracles.verify_blanket(
                    problem, {v}, args.weak_order, args.cap, eg=eg,
                    skip_weak_audit=bool(reports),
                )
            )
    if "clique" in wanted:
        reports.append(oracles.verify_clique_structure(problem, args.cap, eg=eg))
    text = "\n\n".join(r.summary() for r in reports) + "\n"
    _emit(text, args.output)
    if not all(r.ok for r in reports):
        return EXIT_THEOREM
    return EXIT_OK


def _pac_threshold(k: int, size: int, delta: float):
    """Sufficient population size from the failure-probability bound, or a
    symbolic string when the constant factor is astronomically large."""
    exponent = k * k + k ** 3
    factor_log = f"(ln {size} + ln {1 / delta:g})"
    if exponent > 40:
        return None, f"2^{exponent} * {factor_log}"
    n = math.ceil(2 ** exponent * (math.log(size) + math.log(1 / delta)))
    return n, f"2^{exponent} * {factor_log} = {n}"


@dataclass
class PacSweepRow:
    n: int
    runs: int
    success_rate: float
    wrong_rate: float
    failure_rate: float
    mean_evaluations: float


def pac_sweep(problem, n_values, runs, seed, cap=DEFAULT_CAP) -> list[PacSweepRow]:
    """IPE success statistics across population sizes, with wrong answers
    and explicit failures tallied separately."""
    g = global_optimum(problem, cap)
    root = np.random.default_rng(seed)
    rows = []
    for n in n_values:
        seeds = root.integers(0, 2 ** 63, size=runs)
        success = wrong = failed = 0
        evals = 0
        for s in seeds:
            result = decomposition.ipe(problem, n, int(s))
            evals += result.trace.evaluations
            if not result.succeeded:
                failed += 1
            elif result.chromosome == g:
                success += 1
            else:
                wrong += 1
        rows.append(
            PacSweepRow(n, runs, success / runs, wrong / runs, failed / runs, evals / runs)
        )
    return rows


def cmd_pac_sweep(args) -> int:
    problem = _load_problem(args)
    if args.delta <= 0 or args.delta >= 1:
        raise ProblemSpecError("delta must lie in (0, 1)")
    G = graph.build_eg(problem, args.cap)
    k = graph.decomposition_difficulty(G)
    threshold, threshold_text = _pac_threshold(k, problem.size, args.delta)
    if args.n_values:
        n_values = [int(x) for x in args.n_values.split(",")]
    elif threshold is not None:
        n_values = [threshold]
    else:
        raise ProblemSpecError(
            f"sufficient-n threshold is infeasible ({threshold_text}); pass --n-values"
        )
    rows = pac_sweep(problem, n_values, args.runs, args.seed, args.cap)
    text = _csv(
        [
            f"problem={problem.name} delta={args.delta} runs={args.runs} seed={args.seed}",
            f"decomposition_difficulty={k}",
            f"sufficient_n_threshold={threshold_text}",
        ],
        ["n", "runs", "success_rate", "wrong_rate", "failure_rate", "mean_evaluations"],
        (
            (r.n, r.runs, r.success_rate, r.wrong_rate, r.failure_rate, r.mean_evaluations)
            for r in rows
        ),
    )
    _emit(text, args.output)
    return EXIT_OK


def cmd_weak_observability(args) -> int:
    problem = weak_observability_problem()
    all_targets = gasim.block_targets(problem.block_sizes)
    if args.blocks:
        wanted = {int(x) for x in args.blocks.split(",")}
        targets = [t for t in all_targets if t.order in wanted]
    else:
        targets = all_targets
    sizes = [int(x) for x in args.population_sizes.split(",")]
    points = gasim.initial_observability(problem, targets, sizes, args.runs, args.seed)
    config = gasim.GaConfig(
        population_size=args.population,
        generations=args.generations,
        runs=args.runs,
        seed=args.seed + 1,
    )
    points += gasim.generational_observability(problem, targets, config)
    text = _csv(
        [f"problem={problem.name} runs={args.runs} seed={args.seed}"],
        ["block_order", "population_size", "generation", "probability", "runs", "stderr"],
        (
            (p.block_order, p.population_size, p.generation, p.probability, p.runs,
             round(p.stderr, 6))
            for p in points
        ),
    )
    _emit(text, args.output)
    return EXIT_OK


def cmd_list_problems(args) -> int:
    _emit("\n".join(_KNOWN_KINDS) + "\n", args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epilink",
        description="Epistatic-graph analysis and decomposition of small "
        "pseudo-Boolean maximization problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--spec", help="problem spec file (JSON)")
        p.add_argument("--kind", help="inline problem kind instead of --spec")
        p.add_argument("--l", type=int, help="problem size for inline specs")
        p.add_argument("--m", type=int, help="block count for inline specs")
        p.add_argument("--block-sizes", help="comma list for onemax-prime-blocks")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cap", type=int, default=DEFAULT_CAP)
        p.add_argument("--output", help="write to file instead of stdout")

    p = sub.add_parser("eg", help="extract the epistatic graph")
    common(p)
    p.add_argument("--format", choices=["dot", "json"], default="dot")
    p.add_argument("--epistasis-order-bound", type=int, default=0,
                   help="also scan for the max epistasis order up to this bound")
    p.set_defaults(func=cmd_eg)

    p = sub.add_parser("decompose", help="condense, partition, and run partial enumeration")
    common(p)
    p.add_argument("--fixture-partition", action="store_true",
                   help="use the hard-coded cyclic-trap partition")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("ipe", help="run iterative partial enumeration")
    common(p)
    p.add_argument("--n", type=int, required=True, help="population size")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--subset-order", choices=["lex", "random"], default="lex")
    p.set_defaults(func=cmd_ipe)

    p = sub.add_parser("verify", help="run brute-force theorem oracles")
    common(p)
    p.add_argument("--theorems", default="decomposition,blanket,clique")
    p.add_argument("--weak-order", type=int, default=4,
                   help="bounded weak-epistasis audit order")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("pac-sweep", help="IPE success-rate sweep over population sizes")
    common(p)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--n-values", help="comma list of population sizes to sweep")
    p.add_argument("--runs", type=int, default=100)
    p.set_defaults(func=cmd_pac_sweep)

    p = sub.add_parser("weak-observability",
                       help="weak-epistasis observability experiment (25-bit problem)")
    common(p)
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--blocks", help="comma list of block orders to keep")
    p.add_argument("--population-sizes", default="10,20,50,100,200,500,1000")
    p.add_argument("--population", type=int, default=500)
    p.add_argument("--generations", type=int, default=20)
    p.set_defaults(func=cmd_weak_observability)

    p = sub.add_parser("list-problems", help="list supported problem kinds")
    p.add_argument("--output")
    p.set_defaults(func=cmd_list_problems)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ProblemSpecError, json.JSONDecodeError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except EnumerationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except AssumptionViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION


if __name__ == "__main__":
    sys.exit(main())
