"""Benchmark fitness functions and problem-spec parsing.

All fitness values are integers scaled by ``FITNESS_SCALE`` (= 2) so the
half-integer bonus of the modified OneMax variant stays exact.  The scale
is invisible at I/O boundaries: reports divide it back out via
``unscale``.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .model import bits_from_str, pack_bits

FITNESS_SCALE = 2

#: Problems up to this many bits get a dense fitness table for fast
#: exhaustive scans.
TABLE_MAX_BITS = 20


def unscale(value: int) -> float:
    """Convert an internal scaled fitness back to its natural value."""
    out = value / FITNESS_SCALE
    return out


def trap4(b0: int, b1: int, b2: int, b3: int) -> int:
    """Deceptive 4-bit trap: 4 when all ones, else 3 minus the number of ones."""
    u = b0 + b1 + b2 + b3
    return 4 if u == 4 else 3 - u


def niah4(b0: int, b1: int, b2: int, b3: int) -> int:
    """Needle in a haystack: 4 when all ones, 0 otherwise."""
    return 4 if b0 + b1 + b2 + b3 == 4 else 0


def _trap_many(u: np.ndarray) -> np.ndarray:
    return np.where(u == 4, 4, 3 - u)


class FitnessProblem:
    """Pure, deterministic chromosome -> fitness contract.

    Subclasses implement the fitness over the permuted chromosome ``y``
    (``y[i] = x[permutation[i]]``); the identity permutation is the
    default.  Instances are immutable after construction and safe to
    share across workers.
    """

    def __init__(self, name: str, size: int, permutation: Sequence[int] | None = None):
        if size <= 0:
            raise ProblemSpecError(f"problem size must be positive, got {size}")
        if permutation is not None:
            permutation = tuple(permutation)
            if sorted(permutation) != list(range(size)):
                raise ProblemSpecError(
                    f"permutation must be a bijection on [0, {size}), got {permutation}"
                )
        self.name = name
        self.size = size
        self.permutation = permutation
        self._psi_cache: dict = {}
        self._g = None
        self._table: np.ndarray | None = None
        self._table_built = False

    # fitness over the permuted chromosome, scaled
    def raw_evaluate(self, y: Sequence[int]) -> int:
        raise NotImplementedError

    def raw_evaluate_many(self, ys: np.ndarray) -> np.ndarray:
        return np.array([self.raw_evaluate(tuple(row)) for row in ys], dtype=np.int64)

    def evaluate(self, bits: Sequence[int]) -> int:
        if len(bits) != self.size:
            raise ValueError(f"chromosome length {len(bits)} != problem size {self.size}")
        if self.permutation is not None:
            bits = tuple(bits[p] for p in self.permutation)
        return self.raw_evaluate(bits)

    def evaluate_many(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr)
        if arr.shape[1] != self.size:
            raise ValueError(f"chromosome length {arr.shape[1]} != problem size {self.size}")
        if self.permutation is not None:
            arr = arr[:, self.permutation]
        return self.raw_evaluate_many(arr)

    def fitness_table(self) -> np.ndarray | None:
        """Dense table of scaled fitness over all 2^size chromosomes, or None."""
        if not self._table_built:
            self._table_built = True
            if self.size <= TABLE_MAX_BITS:
                n = 2 ** self.size
                shifts = np.arange(self.size - 1, -1, -1, dtype=np.int64)
                out = np.empty(n, dtype=np.int64)
                chunk = 2 ** 16
                for start in range(0, n, chunk):
                    r = np.arange(start, min(start + chunk, n), dtype=np.int64)
                    bits = ((r[:, None] >> shifts) & 1).astype(np.uint8)
                    out[start:start + len(r)] = self.evaluate_many(bits)
                self._table = out
        return self._table

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name} size={self.size}>"


class OneMax(FitnessProblem):
    def __init__(self, size: int, permutation=None, name: str | None = None):
        super().__init__(name or f"onemax-{size}", size, permutation)

    def raw_evaluate(self, y):
        return FITNESS_SCALE * sum(y)

    def raw_evaluate_many(self, ys):
        return FITNESS_SCALE * ys.sum(axis=1, dtype=np.int64)


class LeadingOnes(FitnessProblem):
    def __init__(self, size: int, permutation=None, name: str | None = None):
        super().__init__(name or f"leadingones-{size}", size, permutation)

    def raw_evaluate(self, y):
        count = 0
        for b in y:
            if b != 1:
                break
            count += 1
        return FITNESS_SCALE * count

    def raw_evaluate_many(self, ys):
        return FITNESS_SCALE * np.cumprod(ys, axis=1, dtype=np.int64).sum(axis=1)


class _BlockProblem(FitnessProblem):
    """Shared sizing logic for the 4-bit-block benchmarks (size = 4m)."""

    def __init__(self, kind: str, m: int, permutation=None, name: str | None = None):
        if m <= 0:
            raise ProblemSpecError(f"{kind} needs at least one block, got m={m}")
        self.m = m
        super().__init__(name or f"{kind}-m{m}", 4 * m, permutation)


class CTrap(_BlockProblem):
    """Concatenated 4-bit traps on disjoint blocks."""

    def __init__(self, m: int, permutation=None, name=None):
        super().__init__("ctrap", m, permutation, name)

    def raw_evaluate(self, y):
        return FITNESS_SCALE * sum(
            trap4(*y[4 * i:4 * i + 4]) for i in range(self.m)
        )

    def raw_evaluate_many(self, ys):
        u = ys.reshape(len(ys), self.m, 4).sum(axis=2, dtype=np.int64)
        return FITNESS_SCALE * _trap_many(u).sum(axis=1)


class CNiah(_BlockProblem):
    """Concatenated needle-in-a-haystack blocks."""

    def __init__(self, m: int, permutation=None, name=None):
        super().__init__("cniah", m, permutation, name)

    def raw_evaluate(self, y):
        return FITNESS_SCALE * sum(
            niah4(*y[4 * i:4 * i + 4]) for i in range(self.m)
        )

    def raw_evaluate_many(self, ys):
        u = ys.reshape(len(ys), self.m, 4).sum(axis=2, dtype=np.int64)
        return FITNESS_SCALE * np.where(u == 4, 4, 0).sum(axis=1)


class CycTrap(FitnessProblem):
    """Cyclically overlapping traps: block i reads loci 3i..3i+3 modulo the size."""

    def __init__(self, m: int, permutation=None, name: str | None = None):
        if m <= 1:
            raise ProblemSpecError(f"cyctrap needs m >= 2, got m={m}")
        self.m = m
        super().__init__(name or f"cyctrap-m{m}", 3 * m, permutation)
        self._block_cols = np.array(
            [[(3 * i + j) % self.size for j in range(4)] for i in range(m)]
        )

    def raw_evaluate(self, y):
        size = self.size
        total = 0
        for i in range(self.m):
            total += trap4(*(y[(3 * i + j) % size] for j in range(4)))
        return FITNESS_SCALE * total

    def raw_evaluate_many(self, ys):
        u = ys[:, self._block_cols].sum(axis=2, dtype=np.int64)
        return FITNESS_SCALE * _trap_many(u).sum(axis=1)


class LeadingTraps(_BlockProblem):
    """Traps gated left to right: block i counts only while every earlier trap is solved."""

    def __init__(self, m: int, permutation=None, name=None):
        super().__init__("leadingtraps", m, permutation, name)

    def raw_evaluate(self, y):
        total = 0
        alive = True
        for i in range(self.m):
            t = trap4(*y[4 * i:4 * i + 4])
            if alive:
                total += t
            alive = alive and t == 4
        return FITNESS_SCALE * total

    def raw_evaluate_many(self, ys):
        u = ys.reshape(len(ys), self.m, 4).sum(axis=2, dtype=np.int64)
        t = _trap_many(u)
        solved = (t == 4).astype(np.int64)
        gate = np.cumprod(
            np.concatenate([np.ones((len(ys), 1), dtype=np.int64), solved[:, :-1]], axis=1),
            axis=1,
        )
        return FITNESS_SCALE * (gate * t).sum(axis=1)


class OneMaxPrimeConcat(FitnessProblem):
    """Sum of modified-OneMax blocks over consecutive loci.

    Each block scores its number of ones, except the all-zeros pattern
    which scores 1.5 (the source of weak epistasis of order block-size
    minus one).
    """

    def __init__(self, block_sizes: Sequence[int], permutation=None, name: str | None = None):
        sizes = tuple(int(b) for b in block_sizes)
        if not sizes or any(b < 2 for b in sizes):
            raise ProblemSpecError(f"block sizes must all be >= 2, got {sizes}")
        self.block_sizes = sizes
        starts = []
        pos = 0
        for b in sizes:
            starts.append(pos)
            pos += b
        self._starts = tuple(starts)
        super().__init__(
            name or "onemax-prime-" + "x".join(str(b) for b in sizes), pos, permutation
        )

    def raw_evaluate(self, y):
        total = 0
        for start, b in zip(self._starts, self.block_sizes):
            s = sum(y[start:start + b])
            total += 3 if s == 0 else FITNESS_SCALE * s
        return total

    def raw_evaluate_many(self, ys):
        total = np.zeros(len(ys), dtype=np.int64)
        for start, b in zip(self._starts, self.block_sizes):
            s = ys[:, start:start + b].sum(axis=1, dtype=np.int64)
            total += np.where(s == 0, 3, FITNESS_SCALE * s)
        return total


class LookupTable(FitnessProblem):
    """Fitness by direct indexing into a dense 2^size value array.

    Values are natural (unscaled); they may be half-integers and are
    scaled internally.
    """

    def __init__(self, values: Sequence[float], permutation=None, name: str | None = None):
        n = len(values)
        size = n.bit_length() - 1
        if n == 0 or 2 ** size != n:
            raise ProblemSpecError(f"lookup table must list exactly 2^size values, got {n}")
        scaled = []
        for x in values:
            s = float(x) * FITNESS_SCALE
            if s != round(s):
                raise ProblemSpecError(
                    f"fitness value {x} is not an integer multiple of 1/{FITNESS_SCALE}"
                )
            scaled.append(int(round(s)))
        self.values = np.array(scaled, dtype=np.int64)
        super().__init__(name or f"lookup-{size}", size, permutation)

    @classmethod
    def from_pairs(
        cls,
        size: int,
        pairs: Mapping[str, float] | Sequence[tuple[str, float]],
        default: float = 0,
        **kwargs,
    ) -> "LookupTable":
        """Build a dense table from (bitstring, value) pairs; missing entries take ``default``."""
        if isinstance(pairs, Mapping):
            pairs = pairs.items()
        values = [default] * (2 ** size)
        for key, value in pairs:
            bits = bits_from_str(key)
            if len(bits) != size:
                raise ProblemSpecError(f"key {key!r} has length {len(bits)}, expected {size}")
            values[pack_bits(bits)] = value
        return cls(values, **kwargs)

    @classmethod
    def from_problem(cls, problem: FitnessProblem, **kwargs) -> "LookupTable":
        """Freeze any small problem into its dense table (round-trip helper)."""
        table = problem.fitness_table()
        if table is None:
            raise ProblemSpecError(
                f"problem size {problem.size} too large to tabulate"
            )
        out = cls.__new__(cls)
        FitnessProblem.__init__(
            out, kwargs.get("name") or f"{problem.name}-table", problem.size,
            kwargs.get("permutation"),
        )
        out.values = table.copy()
        return out

    def raw_evaluate(self, y):
        return int(self.values[pack_bits(y)])

    def raw_evaluate_many(self, ys):
        weights = 1 << np.arange(self.size - 1, -1, -1, dtype=np.int64)
        return self.values[ys.astype(np.int64) @ weights]


class ProblemSpecError(ValueError):
    """Malformed problem specification."""


def weak_pair_problem() -> LookupTable:
    """3-bit lookup problem carrying a weak order-2 epistasis onto locus 2.

    The pair {0,1} is epistatic to 2 (witness: locus 0 at 0, locus 1 at 1)
    while neither singleton is.
    """
    return LookupTable.from_pairs(
        3,
        {"111": 10, "001": 9, "101": 8, "010": 7, "011": 6},
        name="weak-pair-3bit",
    )


def fork_problem() -> LookupTable:
    """3-bit lookup problem where locus 0 is strictly epistatic to loci 1 and 2.

    Both (0,1,2) and (0,2,1) are proper decomposition orders.
    """
    return LookupTable.from_pairs(
        3,
        {"111": 10, "110": 9, "101": 9, "100": 8, "000": 7, "010": 6, "001": 6},
        name="fork-3bit",
    )


def make_problem(spec: Mapping) -> FitnessProblem:
    """Build a problem from a spec mapping (the problem-spec file schema).

    Fields: ``kind`` plus ``l``/``size`` or ``m`` (or ``block_sizes`` for
    onemax-prime-blocks, ``table``/``pairs`` for lookup-table), and an
    optional explicit ``permutation`` sequence.
    """
    if "kind" not in spec:
        raise ProblemSpecError("spec is missing the 'kind' field")
    kind = str(spec["kind"]).lower().replace("_", "-")
    perm = spec.get("permutation")
    name = spec.get("name")

    def want_size() -> int:
        if "l" in spec:
            return int(spec["l"])
        if "size" in spec:
            return int(spec["size"])
        raise ProblemSpecError(f"{kind} spec needs 'l' (problem size)")

    def want_m(block: int) -> int:
        if "m" in spec:
            return int(spec["m"])
        if "l" in spec or "size" in spec:
            size = want_size()
            if size % block != 0:
                raise ProblemSpecError(
                    f"{kind} requires size to be a multiple of {block}, got {size}"
                )
            return size // block
        raise ProblemSpecError(f"{kind} spec needs 'm' or a compatible 'l'")

    if kind == "onemax":
        return OneMax(want_size(), perm, name)
    if kind == "leadingones":
        return LeadingOnes(want_size(), perm, name)
    if kind == "ctrap":
        return CTrap(want_m(4), perm, name)
    if kind == "cniah":
        return CNiah(want_m(4), perm, name)
    if kind == "leadingtraps":
        return LeadingTraps(want_m(4), perm, name)
    if kind == "cyctrap":
        return CycTrap(want_m(3), perm, name)
    if kind == "onemax-prime-blocks":
        if "block_sizes" not in spec:
            raise ProblemSpecError("onemax-prime-blocks spec needs 'block_sizes'")
        return OneMaxPrimeConcat(spec["block_sizes"], perm, name)
    if kind == "lookup-table":
        if "table" in spec:
            return LookupTable(spec["table"], perm, name)
        if "pairs" in spec:
            size = want_size()
            return LookupTable.from_pairs(
                size, spec["pairs"], spec.get("default", 0), permutation=perm, name=name
            )
        raise ProblemSpecError("lookup-table spec needs 'table' or 'pairs'")
    raise ProblemSpecError(f"unknown problem kind {kind!r}")


def onemax_prime_concat(block_sizes: Sequence[int]) -> OneMaxPrimeConcat:
    return OneMaxPrimeConcat(block_sizes)


def weak_observability_problem() -> OneMaxPrimeConcat:
    """The 25-bit concatenation of modified-OneMax blocks of sizes 3..7."""
    return OneMaxPrimeConcat([3, 4, 5, 6, 7], name="onemax-prime-25")
