"""Chromosomes, partial assignments, and exact constrained optima.

Chromosomes are fixed-length 0/1 tuples; locus 0 is the leftmost bit in
all textual I/O.  An assignment is a partial map locus -> allele whose
unassigned loci read as the wildcard ``'*'``.  Constrained optima are
always computed by exhaustive enumeration of the free loci, so every
downstream classification (epistasis kind, stationarity, ...) rests on
exact integer comparisons.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

WILDCARD = "*"

#: Maximum number of completions an exhaustive scan may enumerate before
#: refusing.  Overridable per call.
DEFAULT_CAP = 2 ** 24

#: Chunk size for enumeration without a precomputed fitness table.
_CHUNK = 2 ** 16


class EnumerationCapError(RuntimeError):
    """Raised instead of silently running an exponential enumeration."""

    def __init__(self, required: int, cap: int):
        super().__init__(
            f"exhaustive enumeration needs {required} completions, "
            f"which exceeds the cap of {cap}"
        )
        self.required = required
        self.cap = cap


class AssumptionViolationError(RuntimeError):
    """The problem breaks the unique-global-optimum assumption."""

    def __init__(self, message: str, tied: Sequence[tuple[int, ...]] = ()):
        super().__init__(message)
        self.tied = tuple(tied)


def bits_from_str(s: str) -> tuple[int, ...]:
    if not set(s) <= {"0", "1"}:
        raise ValueError(f"not a bit string: {s!r}")
    return tuple(int(c) for c in s)


def bits_to_str(bits: Sequence[int]) -> str:
    return "".join(str(b) for b in bits)


def complement(bits: Sequence[int]) -> tuple[int, ...]:
    return tuple(1 - b for b in bits)


def pack_bits(bits: Sequence[int]) -> int:
    """Integer index of a chromosome; locus 0 is the most significant bit."""
    value = 0
    for b in bits:
        value = (value << 1) | b
    return value


def unpack_bits(value: int, size: int) -> tuple[int, ...]:
    return tuple((value >> (size - 1 - v)) & 1 for v in range(size))


class Assignment:
    """Immutable partial map locus -> allele with wildcard reads.

    ``a[v]`` returns 0, 1, or ``'*'``.  A locus may not be assigned twice
    with conflicting alleles.
    """

    __slots__ = ("_d", "_hash")

    def __init__(self, pairs: Iterable[tuple[int, int]] | Mapping[int, int] = ()):
        if isinstance(pairs, Mapping):
            pairs = pairs.items()
        d: dict[int, int] = {}
        for v, a in pairs:
            v = int(v)
            a = int(a)
            if v < 0:
                raise ValueError(f"negative locus {v}")
            if a not in (0, 1):
                raise ValueError(f"allele must be 0 or 1, got {a}")
            if v in d and d[v] != a:
                raise ValueError(f"conflicting alleles for locus {v}")
            d[v] = a
        self._d = dict(sorted(d.items()))
        self._hash = hash(tuple(self._d.items()))

    @classmethod
    def batch(cls, loci: Iterable[int], allele: int) -> "Assignment":
        """The constant batch assignment ``{(S, allele)}``."""
        return cls((v, allele) for v in loci)

    @classmethod
    def batch_pattern(cls, loci: Iterable[int], pattern: Sequence[int]) -> "Assignment":
        """Batch assignment taking each allele from an indexable pattern.

        With ``pattern`` the global optimum this is ``{(S, g)}``; pass
        ``complement(g)`` for ``{(S, g-bar)}``.
        """
        return cls((v, pattern[v]) for v in loci)

    def __getitem__(self, v: int):
        return self._d.get(v, WILDCARD)

    def __contains__(self, v: int) -> bool:
        return v in self._d

    def __iter__(self):
        return iter(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def items(self):
        return self._d.items()

    @property
    def coverage(self) -> frozenset[int]:
        return frozenset(self._d)

    def __or__(self, other: "Assignment") -> "Assignment":
        return Assignment(list(self._d.items()) + list(other.items()))

    def without(self, v: int) -> "Assignment":
        return Assignment((u, a) for u, a in self._d.items() if u != v)

    def apply(self, bits: Sequence[int]) -> tuple[int, ...]:
        """Override the assigned loci of a full chromosome."""
        size = len(bits)
        for v in self._d:
            if v >= size:
                raise ValueError(f"locus {v} out of range for length {size}")
        return tuple(self._d.get(v, bits[v]) for v in range(size))

    def agrees_with(self, bits: Sequence[int]) -> bool:
        return all(bits[v] == a for v, a in self._d.items())

    def __eq__(self, other) -> bool:
        return isinstance(other, Assignment) and self._d == other._d

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"({v},{a})" for v, a in self._d.items())
        return f"Assignment({{{inner}}})"

    def to_json(self) -> dict[str, int]:
        return {str(v): a for v, a in self._d.items()}

    @classmethod
    def from_json(cls, obj: Mapping[str, int]) -> "Assignment":
        return cls((int(v), a) for v, a in obj.items())


EMPTY = Assignment()


def apply_assignment(a: Assignment, bits: Sequence[int]) -> tuple[int, ...]:
    return a.apply(bits)


def coverage(a: Assignment) -> frozenset[int]:
    return a.coverage


@dataclass(frozen=True)
class ConstrainedOptima:
    """All maximal-fitness completions of a partial assignment.

    ``per_locus[v]`` is the exact set of alleles occurring at locus ``v``
    across the maximizers; for assigned loci it is the singleton of the
    assigned allele.
    """

    chromosomes: tuple[tuple[int, ...], ...]
    fitness: int
    per_locus: dict[int, frozenset[int]]


def _enumeration_indices(problem, a: Assignment, cap: int):
    """Free loci, their packed-bit weights, and the assigned-base index."""
    size = problem.size
    for v in a:
        if v >= size:
            raise ValueError(f"locus {v} out of range for problem size {size}")
    free = [v for v in range(size) if v not in a]
    if len(free) > 0 and 2 ** len(free) > cap:
        raise EnumerationCapError(2 ** len(free), cap)
    base = sum(a[v] << (size - 1 - v) for v in a)
    weights = np.array([1 << (size - 1 - v) for v in free], dtype=np.int64)
    return free, weights, base


def constrained_optima(problem, a: Assignment, cap: int = DEFAULT_CAP) -> ConstrainedOptima:
    """Exhaustively enumerate all completions of ``a`` and keep the maximizers."""
    cache = problem._psi_cache
    hit = cache.get(a)
    if hit is not None:
        return hit

    size = problem.size
    free, weights, base = _enumeration_indices(problem, a, cap)
    nfree = len(free)

    if nfree == 0:
        bits = a.apply((0,) * size)
        result = ConstrainedOptima(
            chromosomes=(bits,),
            fitness=problem.evaluate(bits),
            per_locus={v: frozenset((bits[v],)) for v in range(size)},
        )
        cache[a] = result
        return result

    table = problem.fitness_table()
    best = None
    best_rows: list[np.ndarray] = []
    for start in range(0, 2 ** nfree, _CHUNK):
        stop = min(start + _CHUNK, 2 ** nfree)
        r = np.arange(start, stop, dtype=np.int64)
        cols = (r[:, None] >> np.arange(nfree - 1, -1, -1)) & 1
        if table is not None:
            fits = table[base + cols @ weights]
        else:
            full = np.zeros((len(r), size), dtype=np.uint8)
            for v, ass in a.items():
                full[:, v] = ass
            full[:, free] = cols
            fits = problem.evaluate_many(full)
        m = int(fits.max())
        if best is None or m > best:
            best = m
            best_rows = [cols[fits == m]]
        elif m == best:
            best_rows.append(cols[fits == m])

    sel = np.concatenate(best_rows)
    template = a.apply((0,) * size)
    chromosomes = []
    for row in sel:
        bits = list(template)
        for j, v in enumerate(free):
            bits[v] = int(row[j])
        chromosomes.append(tuple(bits))
    per_locus = {v: frozenset((a[v],)) for v in a}
    for j, v in enumerate(free):
        per_locus[v] = frozenset(int(x) for x in np.unique(sel[:, j]))
    result = ConstrainedOptima(tuple(chromosomes), int(best), per_locus)
    cache[a] = result
    return result


def psi_at(problem, a: Assignment, v: int, cap: int = DEFAULT_CAP) -> frozenset[int]:
    """The paper-style per-locus allele set of the constrained optima."""
    return constrained_optima(problem, a, cap).per_locus[v]


def eval_assignment(problem, a: Assignment, cap: int = DEFAULT_CAP) -> int:
    """Fitness of any constrained optimum under ``a`` (scaled integer)."""
    return constrained_optima(problem, a, cap).fitness


def global_optimum(problem, cap: int = DEFAULT_CAP) -> tuple[int, ...]:
    """The unique full-enumeration maximizer; errors out on ties."""
    if problem._g is not None:
        return problem._g
    opt = constrained_optima(problem, EMPTY, cap)
    if len(opt.chromosomes) != 1:
        tied = sorted(opt.chromosomes)
        raise AssumptionViolationError(
            "global optimum is not unique; tied chromosomes: "
            + ", ".join(bits_to_str(c) for c in tied),
            tied,
        )
    problem._g = opt.chromosomes[0]
    return problem._g


def all_assignments(loci: Sequence[int]):
    """All 2^|loci| assignments on the given loci, lexicographic by allele pattern."""
    loci = sorted(loci)
    for pattern in itertools.product((0, 1), repeat=len(loci)):
        yield Assignment(zip(loci, pattern))
