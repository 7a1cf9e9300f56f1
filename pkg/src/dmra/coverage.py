"""Tracks which patterns a growing row list has not covered yet.

The tracker keeps one flag per pattern rank in a packed bit table, so the
memory cost is total_patterns(params) bits.  Queries about a candidate row
enumerate only the C(n,k) patterns that row induces, never the whole table.
"""

import functools
import itertools
import math
from typing import Sequence

import numpy as np

from .core import Params, Pattern, Row, pattern_unrank, total_patterns

DEFAULT_MEMORY_BUDGET = 2**31  # patterns, i.e. bits: 256 MiB of flags


@functools.lru_cache(maxsize=None)
def subset_table(n: int, k: int) -> np.ndarray:
    """All k-subsets of {0..n-1} in lexicographic order, shape (C(n,k), k).

    Row index equals the subset's lexicographic rank, matching pattern_rank.
    """
    table = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), k)),
        dtype=np.int64,
        count=math.comb(n, k) * k,
    )
    table.setflags(write=False)
    return table.reshape(-1, k)


class CoverageTracker:
    """Uncovered-pattern bookkeeping for one (n, k, q) problem."""

    def __init__(self, params: Params, memory_budget: int | None = None):
        budget = DEFAULT_MEMORY_BUDGET if memory_budget is None else memory_budget
        u0 = total_patterns(params)
        if u0 > budget:
            raise ValueError(
                f"pattern table needs {u0} flags, over the budget of {budget}"
            )
        self.params = params
        self.total = u0
        self.remaining = u0
        self._qk = params.q**params.k
        self._table = subset_table(params.n, params.k)
        self._base = np.arange(len(self._table), dtype=np.int64) * self._qk
        # big-endian digit weights for turning a row's k symbols into a message index
        self._weights = params.q ** np.arange(params.k - 1, -1, -1, dtype=np.int64)
        bits = np.full((u0 + 7) // 8, 0xFF, dtype=np.uint8)
        if u0 % 8:
            bits[-1] = (1 << (u0 % 8)) - 1
        self._bits = bits

    def _row_ranks(self, row: Sequence[int]) -> np.ndarray:
        """Pattern ranks induced by a row, one per active set, in rank order."""
        r = np.asarray(row, dtype=np.int64)
        if r.shape != (self.params.n,):
            raise ValueError(f"row has length {r.size}, expected {self.params.n}")
        if r.size and (r.min() < 0 or r.max() >= self.params.q):
            raise ValueError(f"row has symbols outside 0..{self.params.q - 1}")
        msg = (r[self._table] * self._weights).sum(axis=1)
        return self._base + msg

    def _flags(self, ranks: np.ndarray) -> np.ndarray:
        return (self._bits[ranks >> 3] >> (ranks & 7).astype(np.uint8)) & 1

    def is_uncovered(self, rank: int) -> bool:
        """Flag of a single pattern rank."""
        if not 0 <= rank < self.total:
            raise ValueError(f"rank {rank} out of range [0, {self.total})")
        return bool((self._bits[rank >> 3] >> (rank & 7)) & 1)

    def newly_covered(self, row: Sequence[int]) -> int:
        """How many still-uncovered patterns this row would cover.

        Read-only; enumerates the row's C(n,k) induced patterns.
        """
        return int(self._flags(self._row_ranks(row)).sum())

    def add_row(self, row: Sequence[int]) -> int:
        """Clear the flags of every pattern the row covers; returns the count cleared."""
        return len(self.add_row_ranks(row))

    def add_row_ranks(self, row: Sequence[int]) -> np.ndarray:
        """Like add_row but returns the ranks of the patterns that just flipped."""
        ranks = self._row_ranks(row)
        hit = ranks[self._flags(ranks).astype(bool)]
        masks = np.uint8(1) << (hit & 7).astype(np.uint8)
        np.bitwise_and.at(self._bits, hit >> 3, ~masks)
        self.remaining -= len(hit)
        return hit

    def uncovered_example(self) -> Pattern | None:
        """The lowest-ranked uncovered pattern, or None when everything is covered."""
        if self.remaining == 0:
            return None
        byte = int(np.flatnonzero(self._bits)[0])
        value = int(self._bits[byte])
        bit = (value & -value).bit_length() - 1
        return pattern_unrank(byte * 8 + bit, self.params)

    def flag_prefix_sums(self) -> np.ndarray:
        """S with S[i] = number of uncovered patterns of rank < i, length total+1."""
        flags = np.unpackbits(self._bits, bitorder="little")[: self.total]
        out = np.empty(self.total + 1, dtype=np.int64)
        out[0] = 0
        np.cumsum(flags, dtype=np.int64, out=out[1:])
        return out
