"""Line-oriented text format for covering arrays.

    DMRA-CA v1
    n k q M algo
    <M rows of n space-separated symbols>
    decay: U0 U1 ... UM

algo is "greedy", "density", or "external".  External arrays are imported
row lists (order preserved verbatim, since first-covering-row semantics
depend on it); their decay footer is optional and always recomputed by
replay on load, which also tolerates redundant rows that add no coverage.
"""

from dataclasses import dataclass
from pathlib import Path

from .builder import replay_decay
from .core import CoveringArray, Params, total_patterns

MAGIC = "DMRA-CA v1"
ALGORITHMS = ("greedy", "density", "external")


class ArrayFileError(ValueError):
    """Malformed array file; the message names the offending line."""


@dataclass(frozen=True)
class ArrayFile:
    array: CoveringArray
    algorithm: str

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm tag {self.algorithm!r}")


def render(handle: ArrayFile) -> str:
    array = handle.array
    p = array.params
    lines = [MAGIC, f"{p.n} {p.k} {p.q} {array.row_count} {handle.algorithm}"]
    lines.extend(" ".join(str(s) for s in row) for row in array.rows)
    if array.decay is None:
        raise ValueError("cannot render an array without its decay sequence")
    lines.append("decay: " + " ".join(str(u) for u in array.decay))
    return "\n".join(lines) + "\n"


def _ints(text: str, lineno: int, what: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split()]
    except ValueError:
        raise ArrayFileError(f"line {lineno}: {what} is not whitespace-separated integers") from None


def parse(text: str, memory_budget: int | None = None) -> ArrayFile:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines or lines[0].strip() != MAGIC:
        raise ArrayFileError(f'line 1: expected magic "{MAGIC}"')
    if len(lines) < 2:
        raise ArrayFileError("line 2: missing header")

    fields = lines[1].split()
    if len(fields) != 5:
        raise ArrayFileError('line 2: expected "n k q M algo"')
    n, k, q, m_count = (_ints(tok, 2, "header")[0] for tok in fields[:4])
    algorithm = fields[4]
    if algorithm not in ALGORITHMS:
        raise ArrayFileError(f"line 2: unknown algorithm {algorithm!r}")
    if m_count < 0:
        raise ArrayFileError(f"line 2: negative row count {m_count}")
    try:
        params = Params(n, k, q)
    except ValueError as exc:
        raise ArrayFileError(f"line 2: {exc}") from None

    body_end = 2 + m_count
    if len(lines) < body_end:
        raise ArrayFileError(f"line {len(lines) + 1}: file truncated, header promised {m_count} rows")
    rows = []
    for i in range(2, body_end):
        symbols = _ints(lines[i], i + 1, "row")
        if len(symbols) != n:
            raise ArrayFileError(f"line {i + 1}: row has {len(symbols)} symbols, expected {n}")
        if any(not 0 <= s < q for s in symbols):
            raise ArrayFileError(f"line {i + 1}: symbol outside 0..{q - 1}")
        rows.append(tuple(symbols))
    if len(set(rows)) != len(rows):
        raise ArrayFileError("body: duplicate rows")

    decay = None
    extra = lines[body_end:]
    if extra:
        lineno = body_end + 1
        if len(extra) > 1 or not extra[0].startswith("decay:"):
            raise ArrayFileError(f"line {lineno}: expected a single decay footer")
        decay = tuple(_ints(extra[0][len("decay:"):], lineno, "decay"))
        if len(decay) != m_count + 1:
            raise ArrayFileError(
                f"line {lineno}: decay has {len(decay)} entries, expected {m_count + 1}"
            )
        if decay[0] != total_patterns(params):
            raise ArrayFileError(
                f"line {lineno}: decay starts at {decay[0]}, expected {total_patterns(params)}"
            )

    if algorithm == "external":
        replayed = replay_decay(CoveringArray(params, tuple(rows)), memory_budget)
        if decay is not None and decay != replayed:
            raise ArrayFileError("decay footer does not match a replay of the rows")
        decay = replayed
    elif decay is None:
        raise ArrayFileError(f"missing decay footer for a {algorithm} array")

    try:
        array = CoveringArray(params, tuple(rows), decay)
    except ValueError as exc:
        raise ArrayFileError(str(exc)) from None
    return ArrayFile(array, algorithm)


def save(path: str | Path, handle: ArrayFile) -> None:
    Path(path).write_text(render(handle), encoding="utf-8")


def load(path: str | Path, memory_budget: int | None = None) -> ArrayFile:
    return parse(Path(path).read_text(encoding="utf-8"), memory_budget)
