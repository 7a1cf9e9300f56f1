"""Problem parameters, source patterns, covering-array rows, and exact ranking.

A pattern is one realization of the source being compressed: which k of the
n users are active, and the q-ary message each active user should receive.
Patterns are densely indexed so that coverage bookkeeping can use flat bit
tables: rank = lex_rank(active set) * q^k + big-endian(messages, base q).
User positions are 1-based at the public API and 0-based internally.
"""

import math
from dataclasses import dataclass
from typing import Sequence

Row = tuple[int, ...]

_U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class Params:
    """Problem triple: n total users, k of them active, q-ary message alphabet."""

    n: int
    k: int
    q: int

    def __post_init__(self) -> None:
        if self.k < 1 or self.k > self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.q < 2:
            raise ValueError(f"need q >= 2, got q={self.q}")
        if math.comb(self.n, self.k) * self.q**self.k > _U64_MAX:
            raise ValueError(
                f"pattern space C({self.n},{self.k})*{self.q}^{self.k} "
                "exceeds the 64-bit range"
            )


def total_patterns(params: Params) -> int:
    """Size of the pattern space: C(n,k) * q^k."""
    return math.comb(params.n, params.k) * params.q**params.k


@dataclass(frozen=True)
class Pattern:
    """One source realization: the k active user positions (1-based, strictly
    increasing) and the message each of them should receive.  Inactive users
    carry no message at all, so message symbols stay in {0..q-1}."""

    active: tuple[int, ...]
    messages: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "active", tuple(self.active))
        object.__setattr__(self, "messages", tuple(self.messages))
        if len(self.active) != len(self.messages):
            raise ValueError(
                f"{len(self.active)} active positions but "
                f"{len(self.messages)} messages"
            )
        if not self.active:
            raise ValueError("pattern needs at least one active position")
        if self.active[0] < 1 or any(
            a >= b for a, b in zip(self.active, self.active[1:])
        ):
            raise ValueError("active positions must be strictly increasing and >= 1")
        if any(w < 0 for w in self.messages):
            raise ValueError("message symbols must be non-negative")


def check_pattern(pattern: Pattern, params: Params) -> None:
    """Raise ValueError unless the pattern is well-formed for these parameters."""
    if len(pattern.active) != params.k:
        raise ValueError(
            f"expected {params.k} active positions, got {len(pattern.active)}"
        )
    if pattern.active[-1] > params.n:
        raise ValueError(f"active position {pattern.active[-1]} exceeds n={params.n}")
    for w in pattern.messages:
        if w >= params.q:
            raise ValueError(f"message symbol {w} out of range for q={params.q}")


def covers(row: Sequence[int], pattern: Pattern) -> bool:
    """True iff the row agrees with the pattern's message at every active position."""
    if pattern.active[-1] > len(row):
        raise ValueError(f"row of length {len(row)} has no position {pattern.active[-1]}")
    return all(row[a - 1] == w for a, w in zip(pattern.active, pattern.messages))


def _subset_rank(positions: Sequence[int], n: int) -> int:
    # positions: sorted, 0-based; lexicographic rank among the k-subsets of {0..n-1}
    k = len(positions)
    rank = 0
    prev = -1
    for i, c in enumerate(positions):
        for j in range(prev + 1, c):
            rank += math.comb(n - 1 - j, k - 1 - i)
        prev = c
    return rank


def _subset_unrank(rank: int, n: int, k: int) -> list[int]:
    positions = []
    c = 0
    for i in range(k):
        while rank >= (block := math.comb(n - 1 - c, k - 1 - i)):
            rank -= block
            c += 1
        positions.append(c)
        c += 1
    return positions


def pattern_rank(pattern: Pattern, params: Params) -> int:
    """Dense index of a pattern in [0, total_patterns).

    Active sets are ordered lexicographically, messages are appended as a
    big-endian base-q number, so patterns sharing an active set occupy one
    contiguous block of q^k ranks.
    """
    check_pattern(pattern, params)
    msg = 0
    for w in pattern.messages:
        msg = msg * params.q + w
    srank = _subset_rank([a - 1 for a in pattern.active], params.n)
    return srank * params.q**params.k + msg


def pattern_unrank(rank: int, params: Params) -> Pattern:
    """Inverse of pattern_rank."""
    if not 0 <= rank < total_patterns(params):
        raise ValueError(f"rank {rank} out of range [0, {total_patterns(params)})")
    srank, msg = divmod(rank, params.q**params.k)
    positions = _subset_unrank(srank, params.n, params.k)
    messages = []
    for _ in range(params.k):
        msg, w = divmod(msg, params.q)
        messages.append(w)
    messages.reverse()
    return Pattern(tuple(p + 1 for p in positions), tuple(messages))


def _check_decay(decay: Sequence[int], rows: int, u0: int) -> None:
    if len(decay) != rows + 1:
        raise ValueError(f"decay has {len(decay)} entries, expected {rows + 1}")
    if decay[0] != u0:
        raise ValueError(f"decay starts at {decay[0]}, expected U0={u0}")
    for m, (a, b) in enumerate(zip(decay, decay[1:]), 1):
        if b < 0 or b > a:
            raise ValueError(f"decay entry {m} = {b} is not within [0, {a}]")


@dataclass(frozen=True)
class CoveringArray:
    """An ordered list of rows used as the shared codebook.

    ``decay`` records the uncovered-pattern counts U_0..U_M observed while the
    rows were added, when known; builders always attach it, imported arrays
    get it recomputed by replay.  The array is "covering" when decay ends at
    zero; incomplete row lists are representable so they can be verified and
    a witness reported.
    """

    params: Params
    rows: tuple[Row, ...]
    decay: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        n, q = self.params.n, self.params.q
        for m, row in enumerate(self.rows, 1):
            if len(row) != n:
                raise ValueError(f"row {m} has length {len(row)}, expected {n}")
            if any(not 0 <= s < q for s in row):
                raise ValueError(f"row {m} has symbols outside 0..{q - 1}")
        if len(set(self.rows)) != len(self.rows):
            raise ValueError("duplicate rows")
        if self.decay is not None:
            object.__setattr__(self, "decay", tuple(self.decay))
            _check_decay(self.decay, len(self.rows), total_patterns(self.params))

    @property
    def row_count(self) -> int:
        return len(self.rows)
