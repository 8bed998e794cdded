"""Detection and classification of epistatic relations.

A set of loci S is epistatic to a locus v when, for every member s of S,
some assignment on S changes the constrained-optimal allele set at v
relative to the same assignment with s dropped (so hitchhikers are
excluded).  Order-1 relations are further split into strict and
non-strict; higher orders into strong / weak / neither.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable

from .model import (
    DEFAULT_CAP,
    Assignment,
    all_assignments,
    global_optimum,
    psi_at,
)


class EpistasisKind(enum.Enum):
    NONE = "none"
    STRICT = "strict"
    NONSTRICT = "nonstrict"


class EpistasisStrength(enum.Enum):
    STRONG = "strong"
    WEAK = "weak"
    NEITHER = "neither"


def order1(problem, u: int, v: int, cap: int = DEFAULT_CAP) -> EpistasisKind:
    """Classify the order-1 relation from u to v.

    Only the complement assignment at u needs enumeration: constraining u
    to its globally optimal allele provably leaves v optimal.
    """
    if u == v:
        raise ValueError("order-1 epistasis needs two distinct loci")
    g = global_optimum(problem, cap)
    psi = psi_at(problem, Assignment(((u, 1 - g[u]),)), v, cap)
    if psi == frozenset((g[v],)):
        return EpistasisKind.NONE
    if psi == frozenset((1 - g[v],)):
        return EpistasisKind.STRICT
    return EpistasisKind.NONSTRICT


def _witness(problem, S: frozenset[int], v: int, s: int, cap: int) -> Assignment | None:
    """First assignment on S (lexicographic) whose optima at v change when s is dropped."""
    for a in all_assignments(sorted(S)):
        if psi_at(problem, a, v, cap) != psi_at(problem, a.without(s), v, cap):
            return a
    return None


def epistatic(problem, S: Iterable[int], v: int, cap: int = DEFAULT_CAP) -> bool:
    """Whether S is |S|-epistatic to v (every member has a witness assignment)."""
    S = frozenset(S)
    if not S:
        return False
    if v in S:
        raise ValueError("the target locus may not belong to S")
    return all(_witness(problem, S, v, s, cap) is not None for s in sorted(S))


def witnesses(problem, S: Iterable[int], v: int, cap: int = DEFAULT_CAP) -> dict[int, Assignment] | None:
    """Per-member witness assignments, or None if S is not epistatic to v."""
    S = frozenset(S)
    out = {}
    for s in sorted(S):
        w = _witness(problem, S, v, s, cap)
        if w is None:
            return None
        out[s] = w
    return out


def strength(problem, S: Iterable[int], v: int, cap: int = DEFAULT_CAP) -> EpistasisStrength:
    """Classify a known epistasis S => v as strong, weak, or neither."""
    S = frozenset(S)
    if not epistatic(problem, S, v, cap):
        raise ValueError(f"{sorted(S)} is not epistatic to {v}")
    if len(S) == 1:
        return EpistasisStrength.STRONG
    sub = [
        epistatic(problem, T, v, cap)
        for size in range(1, len(S))
        for T in itertools.combinations(sorted(S), size)
    ]
    if all(sub):
        return EpistasisStrength.STRONG
    if not any(sub):
        return EpistasisStrength.WEAK
    return EpistasisStrength.NEITHER


def find_weak_epistases(
    problem,
    max_order: int = 4,
    cap: int = DEFAULT_CAP,
    first_only: bool = False,
) -> list[tuple[frozenset[int], int]]:
    """All weak epistases (S, v) with 2 <= |S| <= max_order.

    The audit is order-bounded because the full scan is exponential; use
    it to vet the no-weak-epistasis premise of the decomposition
    theorems.  ``first_only`` stops at the first find.
    """
    loci = range(problem.size)
    found: list[tuple[frozenset[int], int]] = []
    for order in range(2, max_order + 1):
        for S in itertools.combinations(loci, order):
            fs = frozenset(S)
            for v in loci:
                if v in fs:
                    continue
                if not epistatic(problem, fs, v, cap):
                    continue
                if strength(problem, fs, v, cap) is EpistasisStrength.WEAK:
                    found.append((fs, v))
                    if first_only:
                        return found
    return found


def is_stationary_deception(
    problem, u: int, v: int, a: Assignment, cap: int = DEFAULT_CAP
) -> bool:
    """Whether ``a`` keeps the wrong allele at v optimal under every completion.

    ``a`` must assign u its non-optimal allele and leave v unassigned; the
    check enumerates every assignment R on the loci outside coverage(a)
    and {v}.
    """
    g = global_optimum(problem, cap)
    if a[u] != 1 - g[u]:
        raise ValueError(f"assignment must set locus {u} to its non-optimal allele")
    if v in a:
        raise ValueError(f"locus {v} must be unassigned")
    rest = sorted(set(range(problem.size)) - a.coverage - {v})
    wrong = 1 - g[v]
    for r in all_assignments(rest):
        if wrong not in psi_at(problem, a | r, v, cap):
            return False
    return True


def minimum_stationary_deception(
    problem, u: int, v: int, cap: int = DEFAULT_CAP
) -> Assignment:
    """Smallest assignment (u set wrong, v free) deceiving v under every completion.

    Ties at the minimum size resolve lexicographically on (sorted
    coverage, allele pattern) for determinism.  Requires an order-1
    epistasis from u to v; the search is doubly exponential, so only run
    it at oracle scale.
    """
    if order1(problem, u, v, cap) is EpistasisKind.NONE:
        raise ValueError(f"no order-1 epistasis from {u} to {v}")
    g = global_optimum(problem, cap)
    others = sorted(set(range(problem.size)) - {u, v})
    for extra in range(len(others) + 1):
        for more in itertools.combinations(others, extra):
            base = Assignment(((u, 1 - g[u]),))
            for pattern in itertools.product((0, 1), repeat=extra):
                a = base | Assignment(zip(more, pattern))
                if is_stationary_deception(problem, u, v, a, cap):
                    return a
    raise RuntimeError("unreachable: a nearly full deceiving assignment always exists")


@dataclass(frozen=True)
class EpistasisRecord:
    """Serializable classification of one epistatic relation."""

    loci: tuple[int, ...]
    target: int
    kind: str
    strength: str
    witness: dict[int, Assignment]

    def to_json(self) -> dict:
        return {
            "S": list(self.loci),
            "v": self.target,
            "kind": self.kind,
            "strength": self.strength,
            "witness_assignment": {
                str(s): a.to_json() for s, a in self.witness.items()
            },
        }


def classify(problem, S: Iterable[int], v: int, cap: int = DEFAULT_CAP) -> EpistasisRecord | None:
    """Full record for S => v, or None when the relation does not hold."""
    S = frozenset(S)
    wit = witnesses(problem, S, v, cap)
    if wit is None:
        return None
    if len(S) == 1:
        (u,) = S
        kind = order1(problem, u, v, cap).value
    else:
        kind = f"order-{len(S)}"
    return EpistasisRecord(
        tuple(sorted(S)), v, kind, strength(problem, S, v, cap).value, wit
    )
