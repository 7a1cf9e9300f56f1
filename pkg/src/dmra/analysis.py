"""Exact index distributions, entropies, and overhead accounting.

Counting is kept in exact rationals over U_0; only entropies and the
transcendental bounds are evaluated in floating point.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import Params, total_patterns

CODE_KINDS = ("huffman", "shannon", "fixed")


@dataclass(frozen=True)
class IndexDistribution:
    """Exact probabilities P(1..M) of the encoder output index.

    ``decay`` holds the uncovered-count sequence the probabilities came from
    when there is one; synthetic distributions (e.g. products) leave it None.
    """

    probs: tuple[Fraction, ...]
    decay: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if not self.probs:
            raise ValueError("empty distribution")
        if sum(self.probs) != 1:
            raise ValueError(f"probabilities sum to {sum(self.probs)}, not 1")

    def __len__(self) -> int:
        return len(self.probs)


def index_distribution(decay: Sequence[int]) -> IndexDistribution:
    """P(m) = (U_{m-1} - U_m) / U_0 from a complete decay sequence."""
    decay = tuple(int(u) for u in decay)
    if len(decay) < 2 or decay[0] <= 0 or decay[-1] != 0:
        raise ValueError("decay must run from U0 > 0 down to 0")
    if any(b >= a for a, b in zip(decay, decay[1:])):
        raise ValueError("decay must be strictly decreasing")
    u0 = decay[0]
    probs = tuple(Fraction(a - b, u0) for a, b in zip(decay, decay[1:]))
    return IndexDistribution(probs, decay)


def entropy(dist: IndexDistribution) -> float:
    """Shannon entropy of the index, in bits."""
    return -sum(float(p) * math.log2(float(p)) for p in dist.probs if p > 0)


def expected_index(dist: IndexDistribution) -> Fraction:
    """E[index] as an exact rational.

    Computed twice, directly as sum of m * P(m) and telescoped as
    sum(U_0..U_{M-1}) / U_0; the two must agree exactly.
    """
    if dist.decay is None:
        raise ValueError("distribution has no decay sequence")
    direct = sum((m * p for m, p in enumerate(dist.probs, 1)), Fraction(0))
    telescoped = Fraction(sum(dist.decay[:-1]), dist.decay[0])
    if direct != telescoped:
        raise AssertionError(f"telescoping identity broke: {direct} != {telescoped}")
    return direct


def geometric_entropy(params: Params) -> float:
    """Entropy in bits of GEO(q^-k), the max-entropy reference at mean q^k.

    Closed form k*log2(q) - (q^k - 1)*log2(1 - q^-k).  This is the ceiling
    for any index distribution whose expectation stays at or below q^k.
    """
    qk = params.q**params.k
    k_log_q = params.k * math.log2(params.q)
    return k_log_q - (qk - 1) * (math.log2(qk - 1) - math.log2(qk))


def theorem_bound(params: Params) -> float:
    """k*log2(q) + 1 + log2(e), the overhead guarantee for the index code."""
    return params.k * math.log2(params.q) + 1 + math.log2(math.e)


def payload_bits(params: Params) -> float:
    """Net payload of the k active users: k*log2(q) bits."""
    return params.k * math.log2(params.q)


def identity_baseline_bits(params: Params) -> float:
    """Overhead of naming the active users outright: k*log2(n) bits."""
    return params.k * math.log2(params.n)


@dataclass(frozen=True)
class OverheadReport:
    """Everything worth reporting about one built array's code performance."""

    params: Params
    row_count: int
    entropy_bits: float
    expected_length_bits: dict[str, Fraction]
    expected_index: Fraction
    theorem_bound_bits: float
    geo_entropy_bits: float
    overhead_bits: dict[str, float]


def overhead_report(params: Params, decay: Sequence[int]) -> OverheadReport:
    """Assemble the distribution, the three index codes, and their overheads."""
    from . import codec

    dist = index_distribution(decay)
    codes = {
        "huffman": codec.huffman_code(dist),
        "shannon": codec.shannon_code(dist),
        "fixed": codec.fixed_length_code(len(dist)),
    }
    lengths = {kind: code.expected_length(dist) for kind, code in codes.items()}
    payload = payload_bits(params)
    return OverheadReport(
        params=params,
        row_count=len(dist),
        entropy_bits=entropy(dist),
        expected_length_bits=lengths,
        expected_index=expected_index(dist),
        theorem_bound_bits=theorem_bound(params),
        geo_entropy_bits=geometric_entropy(params),
        overhead_bits={kind: float(v) - payload for kind, v in lengths.items()},
    )
