"""The codec: pattern -> first covering row index -> prefix-coded frame.

The encoder scans the array for the first row covering the pattern; any user
who knows it is active recovers its message by reading its own position in
that row.  Index codes come in three kinds (Huffman, Shannon, fixed-length),
all emitted as canonical codes so the wire format is deterministic, plus a
bit-by-bit composite scheme for q = 2^r built on a binary array.
"""

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .analysis import IndexDistribution, index_distribution
from .core import CoveringArray, Params, Pattern, check_pattern, covers


class DecodeError(ValueError):
    """A bitstring that does not parse as exactly one codeword."""


def encode_index(array: CoveringArray, pattern: Pattern) -> int:
    """Index (1-based) of the first row covering the pattern."""
    check_pattern(pattern, array.params)
    for m, row in enumerate(array.rows, 1):
        if covers(row, pattern):
            return m
    raise ValueError("no row covers the pattern; the array is not covering")


def decode_message(array: CoveringArray, m: int, position: int) -> int:
    """Message symbol an active user at `position` reads from row m."""
    if not 1 <= m <= array.row_count:
        raise ValueError(f"index {m} out of range 1..{array.row_count}")
    if not 1 <= position <= array.params.n:
        raise ValueError(f"position {position} out of range 1..{array.params.n}")
    return array.rows[m - 1][position - 1]


def _canonical_codewords(lengths: tuple[int, ...]) -> tuple[str, ...]:
    # canonical assignment: indices sorted by (length, index) count upward in binary
    order = sorted(range(len(lengths)), key=lambda m: (lengths[m], m))
    codewords = [""] * len(lengths)
    code = 0
    prev = lengths[order[0]]
    for m in order:
        code <<= lengths[m] - prev
        prev = lengths[m]
        codewords[m] = format(code, f"0{lengths[m]}b")
        code += 1
    return tuple(codewords)


@dataclass(frozen=True)
class PrefixCode:
    """A prefix-free length assignment with canonical codewords for 1..M."""

    lengths: tuple[int, ...]
    codewords: tuple[str, ...]
    kind: str

    def __post_init__(self) -> None:
        if not self.lengths:
            raise ValueError("empty code")
        if any(length < 1 for length in self.lengths):
            raise ValueError("codeword lengths must be positive")
        if sum(Fraction(1, 2**length) for length in self.lengths) > 1:
            raise ValueError("lengths violate the Kraft inequality")

    @classmethod
    def from_lengths(cls, lengths: tuple[int, ...], kind: str) -> "PrefixCode":
        return cls(tuple(lengths), _canonical_codewords(tuple(lengths)), kind)

    def expected_length(self, dist: IndexDistribution) -> Fraction:
        if len(dist) != len(self.lengths):
            raise ValueError("distribution and code cover different index sets")
        return sum(
            (p * length for p, length in zip(dist.probs, self.lengths)), Fraction(0)
        )

    def decode(self, bits: str) -> int:
        """Index (1-based) of the codeword that `bits` spells out, exactly."""
        if not bits or any(b not in "01" for b in bits):
            raise DecodeError(f"not a bitstring: {bits!r}")
        table = {cw: m for m, cw in enumerate(self.codewords, 1)}
        for stop in range(1, len(bits) + 1):
            m = table.get(bits[:stop])
            if m is not None:
                if stop != len(bits):
                    raise DecodeError(f"{len(bits) - stop} trailing bits after codeword")
                return m
        raise DecodeError("bitstring is not a codeword")


def _ceil_log2_reciprocal(p: Fraction) -> int:
    # smallest L >= 0 with 2^L >= 1/p
    length = 0
    while (p.numerator << length) < p.denominator:
        length += 1
    return length


def shannon_code(dist: IndexDistribution) -> PrefixCode:
    """Lengths ceil(log2(1/P(m))); always lands under entropy + 1 on average."""
    if any(p <= 0 for p in dist.probs):
        raise ValueError("shannon code needs strictly positive probabilities")
    lengths = tuple(max(1, _ceil_log2_reciprocal(p)) for p in dist.probs)
    return PrefixCode.from_lengths(lengths, "shannon")


def huffman_code(dist: IndexDistribution) -> PrefixCode:
    """Optimal prefix code for the index distribution.

    Merges are deterministic: smallest probability first, ties broken by
    lowest index with leaves ordered before internal nodes of equal age.
    Expected length is tie-invariant; the canonical pass makes the actual
    codewords reproducible too.
    """
    m_count = len(dist)
    if m_count == 0:
        raise ValueError("empty distribution")
    if any(p <= 0 for p in dist.probs):
        raise ValueError("huffman code needs strictly positive probabilities")
    if m_count == 1:
        return PrefixCode.from_lengths((1,), "huffman")

    heap: list[tuple[Fraction, int, object]] = [
        (p, m, m) for m, p in enumerate(dist.probs)
    ]
    heapq.heapify(heap)
    serial = m_count
    while len(heap) > 1:
        p1, _, left = heapq.heappop(heap)
        p2, _, right = heapq.heappop(heap)
        heapq.heappush(heap, (p1 + p2, serial, (left, right)))
        serial += 1

    lengths = [0] * m_count
    stack = [(heap[0][2], 0)]
    while stack:
        node, depth = stack.pop()
        if isinstance(node, int):
            lengths[node] = depth
        else:
            stack.append((node[0], depth + 1))
            stack.append((node[1], depth + 1))
    return PrefixCode.from_lengths(tuple(lengths), "huffman")


def fixed_length_code(m_count: int) -> PrefixCode:
    """All codewords ceil(log2(M)) bits, minimum one bit."""
    if m_count < 1:
        raise ValueError("need at least one index")
    length = max(1, (m_count - 1).bit_length())
    return PrefixCode.from_lengths((length,) * m_count, "fixed")


def make_code(dist: IndexDistribution, kind: str) -> PrefixCode:
    """Dispatch on code kind: "huffman", "shannon", or "fixed"."""
    if kind == "huffman":
        return huffman_code(dist)
    if kind == "shannon":
        return shannon_code(dist)
    if kind == "fixed":
        return fixed_length_code(len(dist))
    raise ValueError(f"unknown code kind {kind!r}")


@dataclass(frozen=True)
class Codebook:
    """A covering array bundled with its index distribution and prefix code."""

    array: CoveringArray
    code: PrefixCode
    distribution: IndexDistribution

    def __post_init__(self) -> None:
        if len(self.code.lengths) != self.array.row_count:
            raise ValueError("code and array cover different index sets")
        if len(self.distribution) != self.array.row_count:
            raise ValueError("distribution and array cover different index sets")


def make_codebook(array: CoveringArray, kind: str) -> Codebook:
    """Codebook from a built array; requires the array to carry its decay."""
    if array.decay is None:
        raise ValueError("array has no decay sequence; replay it first")
    dist = index_distribution(array.decay)
    return Codebook(array, make_code(dist, kind), dist)


def encode_frame(codebook: Codebook, pattern: Pattern) -> str:
    """Bit frame for a pattern: the canonical codeword of its row index."""
    return codebook.code.codewords[encode_index(codebook.array, pattern) - 1]


def decode_frame(codebook: Codebook, bits: str, position: int) -> int:
    """Message symbol for the active user at `position`, from one frame."""
    return decode_message(codebook.array, codebook.code.decode(bits), position)


JOINT_OUTCOME_CAP = 2**20


@dataclass(frozen=True)
class BitwiseScheme:
    """Bit-by-bit coding for q = 2^r over one binary covering array.

    Every message symbol splits into r bit planes (most significant first);
    each plane is encoded through the binary array, and the resulting tuple
    of r indices is sent through one joint code.  The joint code is built
    for the product of the per-plane index distributions: a Huffman code
    over all M^r tuples when that stays tractable, otherwise the planes'
    Shannon codewords are concatenated (still one prefix-free code over
    tuples).  Expected length under the product model stays below
    k*r + 1 + r*log2(e).
    """

    params: Params
    bits_per_symbol: int
    binary_array: CoveringArray
    plane_distribution: IndexDistribution
    joint_probs: tuple[Fraction, ...] | None
    joint_code: PrefixCode | None
    plane_code: PrefixCode | None

    @property
    def joint(self) -> bool:
        return self.joint_code is not None

    def encode_indices(self, pattern: Pattern) -> tuple[int, ...]:
        """One binary-array index per bit plane, most significant plane first."""
        check_pattern(pattern, self.params)
        r = self.bits_per_symbol
        out = []
        for t in range(r):
            plane = Pattern(
                pattern.active,
                tuple((w >> (r - 1 - t)) & 1 for w in pattern.messages),
            )
            out.append(encode_index(self.binary_array, plane))
        return tuple(out)

    def _tuple_rank(self, indices: tuple[int, ...]) -> int:
        rank = 0
        for m in indices:
            rank = rank * self.binary_array.row_count + (m - 1)
        return rank

    def encode_frame(self, pattern: Pattern) -> str:
        indices = self.encode_indices(pattern)
        if self.joint:
            return self.joint_code.codewords[self._tuple_rank(indices)]
        return "".join(self.plane_code.codewords[m - 1] for m in indices)

    def decode_indices(self, bits: str) -> tuple[int, ...]:
        if self.joint:
            rank = self.joint_code.decode(bits) - 1
            out = []
            for _ in range(self.bits_per_symbol):
                rank, low = divmod(rank, self.binary_array.row_count)
                out.append(low + 1)
            out.reverse()
            return tuple(out)
        table = {cw: m for m, cw in enumerate(self.plane_code.codewords, 1)}
        out = []
        start = 0
        for _ in range(self.bits_per_symbol):
            stop = start + 1
            while stop <= len(bits) and bits[start:stop] not in table:
                stop += 1
            if stop > len(bits):
                raise DecodeError("bitstring is short of a full plane codeword")
            out.append(table[bits[start:stop]])
            start = stop
        if start != len(bits):
            raise DecodeError(f"{len(bits) - start} trailing bits after codewords")
        return tuple(out)

    def decode_frame(self, bits: str, position: int) -> int:
        indices = self.decode_indices(bits)
        r = self.bits_per_symbol
        symbol = 0
        for t, m in enumerate(indices):
            bit = decode_message(self.binary_array, m, position)
            symbol |= bit << (r - 1 - t)
        return symbol

    def expected_length(self) -> Fraction:
        """Mean frame length in bits under the product-of-planes model."""
        if self.joint:
            return sum(
                (p * length for p, length in zip(self.joint_probs, self.joint_code.lengths)),
                Fraction(0),
            )
        per_plane = self.plane_code.expected_length(self.plane_distribution)
        return self.bits_per_symbol * per_plane


def bitwise_scheme(
    params: Params,
    binary_array: CoveringArray,
    joint_outcome_cap: int = JOINT_OUTCOME_CAP,
) -> BitwiseScheme:
    """Assemble the bit-by-bit scheme for params with q = 2^r."""
    q = params.q
    r = q.bit_length() - 1
    if q != 2**r:
        raise ValueError(f"bit-by-bit coding needs q to be a power of two, got {q}")
    expected = Params(params.n, params.k, 2)
    if binary_array.params != expected:
        raise ValueError(
            f"binary array is for {binary_array.params}, expected {expected}"
        )
    if binary_array.decay is None:
        raise ValueError("binary array has no decay sequence; replay it first")
    plane_dist = index_distribution(binary_array.decay)
    m_count = binary_array.row_count

    if m_count**r <= joint_outcome_cap:
        joint_probs = tuple(
            math.prod(combo, start=Fraction(1))
            for combo in itertools.product(plane_dist.probs, repeat=r)
        )
        joint_code = huffman_code(IndexDistribution(joint_probs))
        return BitwiseScheme(
            params, r, binary_array, plane_dist, joint_probs, joint_code, None
        )
    return BitwiseScheme(
        params, r, binary_array, plane_dist, None, None, shannon_code(plane_dist)
    )
