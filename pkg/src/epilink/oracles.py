"""Brute-force ground-truth checkers: stationary optima, decomposition and
blanket theorem verification, clique structure, and EBACC scoring."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .model import (
    DEFAULT_CAP,
    Assignment,
    EnumerationCapError,
    all_assignments,
    bits_to_str,
    global_optimum,
    psi_at,
    unpack_bits,
)
from . import epistasis as _ep
from . import graph as _graph

#: Free-loci bound for the stationary-optimum and blanket scans.
ORACLE_MAX_BITS = 16


@dataclass(frozen=True)
class Claim:
    name: str
    status: str  # "pass" | "fail" | "not-applicable"
    detail: str = ""

    def to_json(self) -> dict:
        return {"claim": self.name, "status": self.status, "detail": self.detail}


@dataclass
class TheoremReport:
    problem: str
    claims: list[Claim] = field(default_factory=list)
    audited_weak_order: int | None = None

    @property
    def ok(self) -> bool:
        return not any(c.status == "fail" for c in self.claims)

    @property
    def applicable(self) -> bool:
        return any(c.status != "not-applicable" for c in self.claims)

    def add(self, name: str, passed: bool, detail: str = ""):
        self.claims.append(Claim(name, "pass" if passed else "fail", detail))

    def add_na(self, name: str, detail: str = ""):
        self.claims.append(Claim(name, "not-applicable", detail))

    def to_json(self) -> dict:
        return {
            "problem": self.problem,
            "audited_weak_order": self.audited_weak_order,
            "claims": [c.to_json() for c in self.claims],
        }

    def summary(self) -> str:
        lines = [f"theorem report for {self.problem}"]
        if self.audited_weak_order is not None:
            lines.append(f"  weak-epistasis audit order: {self.audited_weak_order}")
        for c in self.claims:
            lines.append(f"  [{c.status:>14}] {c.name}" + (f" ({c.detail})" if c.detail else ""))
        return "\n".join(lines)


def is_stationary_optimum(problem, a: Assignment, cap: int = DEFAULT_CAP) -> bool:
    """Whether the pattern of ``a`` strictly beats every alternative on its
    coverage under every completion of the remaining loci (full scan)."""
    if len(a) == 0:
        raise ValueError("a stationary optimum must be a nonempty assignment")
    size = problem.size
    if size > ORACLE_MAX_BITS or 2 ** size > cap:
        raise EnumerationCapError(2 ** size, min(cap, 2 ** ORACLE_MAX_BITS))
    table = problem.fitness_table()
    assigned = sorted(a.coverage)
    free = sorted(set(range(size)) - a.coverage)

    pat_weights = np.array([1 << (size - 1 - v) for v in assigned], dtype=np.int64)
    npat = 2 ** len(assigned)
    pat_bits = (np.arange(npat)[:, None] >> np.arange(len(assigned) - 1, -1, -1)) & 1
    pat_offsets = pat_bits @ pat_weights
    candidate = int(np.dot([a[v] for v in assigned], pat_weights))
    candidate_col = int(np.where(pat_offsets == candidate)[0][0])

    free_weights = np.array([1 << (size - 1 - v) for v in free], dtype=np.int64)
    nfree = 2 ** len(free)
    free_bits = (np.arange(nfree)[:, None] >> np.arange(len(free) - 1, -1, -1)) & 1
    free_offsets = free_bits @ free_weights if free else np.zeros(1, dtype=np.int64)

    fits = table[np.add.outer(free_offsets, pat_offsets)]
    best = fits.max(axis=1)
    return bool(
        ((fits[:, candidate_col] == best) & ((fits == best[:, None]).sum(axis=1) == 1)).all()
    )


def minimum_stationary_optimum(problem, v: int, cap: int = DEFAULT_CAP) -> Assignment:
    """Smallest stationary optimum assigning locus v.

    Only all-correct candidate patterns need testing (a stationary
    optimum never assigns a wrong allele), so the search walks subsets
    containing v in ascending size, lexicographic within a size.
    """
    g = global_optimum(problem, cap)
    others = sorted(set(range(problem.size)) - {v})
    for extra in range(len(others) + 1):
        for more in itertools.combinations(others, extra):
            a = Assignment.batch_pattern((v, *more), g)
            if is_stationary_optimum(problem, a, cap):
                return a
    raise RuntimeError("unreachable: the full global optimum is always stationary")


def verify_decomposition_theorem(
    problem,
    weak_order: int = 4,
    cap: int = DEFAULT_CAP,
    eg: _graph.EpistaticGraph | None = None,
) -> TheoremReport:
    """Check coverage(minimum SO of v) == in-closure of v for every locus,
    plus the all-correct-pattern corollary.

    The claims are conditional on the absence of weak epistasis; when the
    bounded audit finds one, every claim is reported not-applicable with
    the witnesses attached.
    """
    report = TheoremReport(problem.name, audited_weak_order=weak_order)
    weak = _ep.find_weak_epistases(problem, weak_order, cap)
    if weak:
        for v in range(problem.size):
            onto_v = [S for S, w in weak if w == v]
            witnesses = "; ".join(f"{sorted(S)} => {v}" for S in onto_v)
            report.add_na(
                f"coverage(MSO({v})) == in-closure({v})",
                f"weak epistases found: {witnesses}" if onto_v
                else "weak epistases found elsewhere in the problem",
            )
        return report
    G = eg if eg is not None else _graph.build_eg(problem, cap)
    g = global_optimum(problem, cap)
    for v in range(problem.size):
        mso = minimum_stationary_optimum(problem, v, cap)
        closure = _graph.in_closure(G, v)
        ok = mso.coverage == closure
        report.add(
            f"coverage(MSO({v})) == in-closure({v})",
            ok,
            "" if ok else f"MSO coverage {sorted(mso.coverage)} != closure {sorted(closure)}",
        )
        expected = Assignment.batch_pattern(closure, g)
        report.add(
            f"MSO({v}) assigns the optimal pattern on the closure",
            mso == expected if ok else False,
        )
    return report


def verify_blanket(
    problem,
    S: Iterable[int],
    weak_order: int = 4,
    cap: int = DEFAULT_CAP,
    eg: _graph.EpistaticGraph | None = None,
    skip_weak_audit: bool = False,
) -> TheoremReport:
    """Check that correctly setting the direct in-neighbors of S keeps every
    correct allele on S constrained-optimal, for every assignment on the
    loci beyond the second in-tier."""
    S = frozenset(S)
    report = TheoremReport(problem.name, audited_weak_order=None if skip_weak_audit else weak_order)
    if not skip_weak_audit:
        weak = _ep.find_weak_epistases(problem, weak_order, cap, first_only=True)
        if weak:
            Sw, vw = weak[0]
            report.add_na(
                f"blanket holds for S={sorted(S)}",
                f"weak epistasis found: {sorted(Sw)} => {vw}",
            )
            return report
    G = eg if eg is not None else _graph.build_eg(problem, cap)
    g = global_optimum(problem, cap)
    tier1 = _graph.in_set(G, S, 1)
    tier2 = _graph.in_set(G, S, 2)
    blanket = Assignment.batch_pattern(sorted(tier1 - S), g)
    outside = sorted(set(range(problem.size)) - S - tier1 - tier2)
    if 2 ** len(outside) > cap:
        raise EnumerationCapError(2 ** len(outside), cap)
    for r in all_assignments(outside):
        constraint = blanket | r
        per = {s: psi_at(problem, constraint, s, cap) for s in sorted(S)}
        bad = [s for s, alleles in per.items() if g[s] not in alleles]
        if bad:
            report.add(
                f"blanket holds for S={sorted(S)}",
                False,
                f"R={r.to_json()} excludes the correct allele at loci {bad}",
            )
            return report
        # corollary: all-singleton optima must be exactly the correct pattern
        if all(len(alleles) == 1 for alleles in per.values()):
            if any(per[s] != frozenset((g[s],)) for s in per):
                report.add(
                    f"unique-pattern corollary for S={sorted(S)}",
                    False,
                    f"R={r.to_json()}",
                )
                return report
    report.add(f"blanket holds for S={sorted(S)}", True)
    report.add(f"unique-pattern corollary for S={sorted(S)}", True)
    return report


def verify_clique_structure(
    problem, cap: int = DEFAULT_CAP, eg: _graph.EpistaticGraph | None = None
) -> TheoremReport:
    """On strict-only graphs: every multi-vertex SCC is a bidirectional
    clique, and the largest SCC size equals the largest in-degree plus one."""
    report = TheoremReport(problem.name)
    G = eg if eg is not None else _graph.build_eg(problem, cap)
    if not G.only_strict():
        nonstrict = sorted((u, v) for u, v, k in G.edges if k == "nonstrict")
        report.add_na(
            "SCCs are disjoint maximal cliques",
            f"graph has non-strict edges, e.g. {nonstrict[:4]}",
        )
        return report
    cg = _graph.condense(G)
    for comp in cg.components:
        if len(comp) < 2:
            continue
        missing = [
            (u, v)
            for u in comp
            for v in comp
            if u != v and not G.has_edge(u, v)
        ]
        report.add(
            f"SCC {sorted(comp)} is a bidirectional clique",
            not missing,
            f"missing edges {missing[:4]}" if missing else "",
        )
    k_scc = max((len(c) for c in cg.components), default=0)
    k_in = G.max_in_degree()
    if any(len(c) >= 2 for c in cg.components):
        report.add(
            "max SCC size == max in-degree + 1",
            k_scc == k_in + 1,
            f"k_scc={k_scc}, k_in={k_in}",
        )
    else:
        report.add("no cycles: clique structure holds vacuously", True)
    return report


@dataclass(frozen=True)
class EbaccScore:
    """Extreme balanced accuracy of a global-optimum hypothesis."""

    sensitivity_star: int
    specificity: Fraction
    ebacc: Fraction

    @property
    def epsilon_equivalent(self) -> Fraction:
        return 1 - self.ebacc


def ebacc(hypothesis: Callable[[tuple[int, ...]], bool], problem, cap: int = DEFAULT_CAP) -> EbaccScore:
    """Score a predicate over the full search space.

    The single positive is the unique global optimum; specificity is the
    fraction of non-optima the predicate rejects.
    """
    size = problem.size
    if 2 ** size > cap:
        raise EnumerationCapError(2 ** size, cap)
    g = global_optimum(problem, cap)
    sens = 1 if hypothesis(g) else 0
    rejected = 0
    total = 2 ** size - 1
    for idx in range(2 ** size):
        bits = unpack_bits(idx, size)
        if bits == g:
            continue
        if not hypothesis(bits):
            rejected += 1
    spec = Fraction(rejected, total)
    return EbaccScore(sens, spec, Fraction(sens + spec, 2))


def hypothesis_from_chromosome(c: Sequence[int]) -> Callable[[tuple[int, ...]], bool]:
    """Indicator hypothesis: accept exactly the given chromosome."""
    target = tuple(c)

    def h(bits: tuple[int, ...]) -> bool:
        return tuple(bits) == target

    h.__name__ = f"is_{bits_to_str(target)}"
    return h
