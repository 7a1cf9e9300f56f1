"""Covering-array construction: exhaustive greedy search and the density method.

Both builders are deterministic.  Greedy scans the whole candidate space Q^n
each step and keeps exact per-candidate gain counters so the scan is a single
argmax; the density method derandomizes the uniform-completion expectation
column by column and only ever touches counts of contiguous rank ranges.
Either way every added row covers at least U_m / q^k not-yet-covered
patterns, which forces the uncovered count to decay geometrically and the
row count M to stay logarithmic in n.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np

from .core import CoveringArray, Params, Pattern, Row, total_patterns
from .coverage import CoverageTracker, subset_table

GREEDY_CANDIDATE_CAP = 2**24  # exhaustive scan gate on |Q^n| = q^n


@dataclass(frozen=True)
class BuildReport:
    """A constructed covering array plus its per-row coverage accounting."""

    array: CoveringArray
    decay: tuple[int, ...]
    per_row_gain: tuple[int, ...]
    algorithm: str

    def __post_init__(self) -> None:
        if len(self.per_row_gain) != self.array.row_count:
            raise ValueError("one gain entry per row required")
        if any(g < 1 for g in self.per_row_gain):
            raise ValueError("every added row must cover something new")
        diffs = tuple(a - b for a, b in zip(self.decay, self.decay[1:]))
        if diffs != self.per_row_gain:
            raise ValueError("per-row gains do not telescope the decay sequence")


def _row_digits(value: int, n: int, q: int) -> Row:
    digits = []
    for _ in range(n):
        value, d = divmod(value, q)
        digits.append(d)
    digits.reverse()
    return tuple(digits)


def build_greedy(params: Params, memory_budget: int | None = None) -> BuildReport:
    """Exhaustive greedy construction.

    Each step adds the candidate row from Q^n (minus rows already chosen)
    that covers the most still-uncovered patterns, ties broken by the
    lexicographically smallest row.  The first row is therefore all zeros:
    initially every candidate covers exactly C(n,k) patterns.

    Gain bookkeeping is incremental: a vector of per-candidate gains starts
    uniform at C(n,k), and whenever a pattern flips to covered, the gain of
    the q^(n-k) candidates covering that pattern drops by one.  With rows
    encoded as big-endian base-q integers, the first argmax hit is exactly
    the lexicographic tie-break.
    """
    n, k, q = params.n, params.k, params.q
    space = q**n
    if space > GREEDY_CANDIDATE_CAP:
        raise ValueError(
            f"greedy candidate space q^n = {space} exceeds {GREEDY_CANDIDATE_CAP}; "
            "use the density builder"
        )
    tracker = CoverageTracker(params, memory_budget)
    qk = q**k
    subsets = subset_table(n, k)
    gains = np.full(space, math.comb(n, k), dtype=np.int64)
    cube = gains.reshape((q,) * n)

    rows: list[Row] = []
    decay = [tracker.remaining]
    per_row_gain: list[int] = []
    while tracker.remaining:
        cand = int(np.argmax(gains))
        gain = int(gains[cand])
        if gain < 1:
            raise RuntimeError("no candidate covers anything new; gain table corrupt")
        row = _row_digits(cand, n, q)
        cleared = tracker.add_row_ranks(row)
        for rank in cleared.tolist():
            srank, msg = divmod(rank, qk)
            index: list[object] = [slice(None)] * n
            for i in range(k - 1, -1, -1):
                msg, d = divmod(msg, q)
                index[subsets[srank, i]] = d
            cube[tuple(index)] -= 1
        gains[cand] = -1
        rows.append(row)
        decay.append(tracker.remaining)
        per_row_gain.append(gain)

    array = CoveringArray(params, tuple(rows), tuple(decay))
    return BuildReport(array, tuple(decay), tuple(per_row_gain), "greedy")


@functools.lru_cache(maxsize=None)
def _column_tables(n: int, k: int, q: int):
    """Per-column lookup used by the density builder.

    For column j (0-based) and every k-subset A containing j, three aligned
    arrays: the subset's lexicographic rank, the block stride q^(r-1) where
    r counts the positions of A at or after j, and the integer weight
    q^(k-r) that scales a pattern count to a completion probability over the
    common denominator q^(k-1).
    """
    table = subset_table(n, k)
    cols = []
    for j in range(n):
        parts = []
        for i in range(k):
            sel = np.flatnonzero(table[:, i] == j).astype(np.int64)
            if len(sel):
                parts.append((sel, q ** (k - 1 - i), q**i))
        subs = np.concatenate([p[0] for p in parts])
        pw = np.concatenate([np.full(len(p[0]), p[1], dtype=np.int64) for p in parts])
        wt = np.concatenate([np.full(len(p[0]), p[2], dtype=np.int64) for p in parts])
        subs.setflags(write=False)
        pw.setflags(write=False)
        wt.setflags(write=False)
        cols.append((subs, pw, wt))
    return tuple(cols)


def build_density(params: Params, memory_budget: int | None = None) -> BuildReport:
    """Deterministic density construction.

    Rows are built column by column in position order.  At each column the
    chosen symbol maximizes the expected number of newly covered patterns
    under uniform random completion of the still-undecided columns, ties
    broken by the smallest symbol.  Maximizing beats averaging, so the
    finished row always covers at least ceil(U_m / q^k) uncovered patterns,
    the per-row average.

    Scoring is exact integer arithmetic: pattern completion probabilities
    q^-(undecided) are carried as numerators over the common denominator
    q^(k-1).  Because ranks order messages big-endian and columns are decided
    left to right, the patterns of an active set consistent with the partial
    row form one contiguous rank range, so each count is a prefix-sum
    difference.
    """
    n, k, q = params.n, params.k, params.q
    tracker = CoverageTracker(params, memory_budget)
    qk = q**k
    cols = _column_tables(n, k, q)
    base0 = np.arange(math.comb(n, k), dtype=np.int64) * qk
    steps = np.arange(q + 1, dtype=np.int64)[:, None]

    rows: list[Row] = []
    decay = [tracker.remaining]
    per_row_gain: list[int] = []
    while tracker.remaining:
        sums = tracker.flag_prefix_sums()
        base = base0.copy()
        row = np.zeros(n, dtype=np.int64)
        for j in range(n):
            subs, pw, wt = cols[j]
            b = base[subs]
            grid = sums[b[None, :] + pw[None, :] * steps]
            scores = ((grid[1:] - grid[:-1]) * wt).sum(axis=1)
            s = int(np.argmax(scores))
            row[j] = s
            base[subs] = b + s * pw
        gain = tracker.add_row(row)
        average = -(-decay[-1] // qk)
        if gain < average:
            raise RuntimeError(
                f"density row gained {gain}, below the guaranteed {average}"
            )
        rows.append(tuple(int(s) for s in row))
        decay.append(tracker.remaining)
        per_row_gain.append(gain)

    array = CoveringArray(params, tuple(rows), tuple(decay))
    return BuildReport(array, tuple(decay), tuple(per_row_gain), "density")


def build(params: Params, algorithm: str, memory_budget: int | None = None) -> BuildReport:
    """Dispatch on algorithm name: "greedy" or "density"."""
    if algorithm == "greedy":
        return build_greedy(params, memory_budget)
    if algorithm == "density":
        return build_density(params, memory_budget)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def replay_decay(array: CoveringArray, memory_budget: int | None = None) -> tuple[int, ...]:
    """Uncovered counts U_0..U_M obtained by replaying the rows in order."""
    tracker = CoverageTracker(array.params, memory_budget)
    decay = [tracker.remaining]
    for row in array.rows:
        tracker.add_row(row)
        decay.append(tracker.remaining)
    return tuple(decay)


def verify(array: CoveringArray, memory_budget: int | None = None) -> Pattern | None:
    """None if the rows cover every pattern, else the lowest-ranked uncovered one."""
    tracker = CoverageTracker(array.params, memory_budget)
    for row in array.rows:
        tracker.add_row(row)
    return tracker.uncovered_example()


def row_count_upper_bound(params: Params) -> int:
    """Smallest m with U_0 * (1 - q^-k)^m < 1, the geometric-decay row bound."""
    u0 = total_patterns(params)
    qk = params.q**params.k
    shrink = math.log2(qk) - math.log2(qk - 1)
    return math.ceil(math.log2(u0) / shrink)


def row_count_lower_bound(params: Params) -> int:
    """Smallest M with q^M > n.

    A covering array with k >= 2 cannot repeat a column, so its M-symbol
    columns must be n distinct vectors.
    """
    if params.k < 2:
        raise ValueError("column-distinctness bound needs k >= 2")
    m = 1
    while params.q**m <= params.n:
        m += 1
    return m
