"""Figure rendering for the analyze and sweep reports."""

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analysis import IndexDistribution, OverheadReport


def render_sweep_figure(
    ns: Sequence[int],
    huffman_bits: Sequence[float],
    entropy_bits: Sequence[float],
    geo_entropy_bits: float,
    theorem_bound_bits: float,
    k: int,
    q: int,
    path: str | Path,
) -> None:
    """Expected codeword length against the number of total users."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(ns, huffman_bits, "o", ms=4, label="Huffman expected length")
    ax.plot(ns, entropy_bits, "-", lw=1, alpha=0.7, label="index entropy")
    ax.axhline(geo_entropy_bits, ls="--", color="gray",
               label=f"geometric entropy {geo_entropy_bits:.4f}")
    ax.axhline(theorem_bound_bits, ls=":", color="black",
               label=f"length bound {theorem_bound_bits:.4f}")
    ax.set_xlabel("total users n")
    ax.set_ylabel("bits")
    ax.set_title(f"k = {k}, q = {q}")
    ax.grid(True, alpha=0.4)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_analyze_figure(
    report: OverheadReport,
    dist: IndexDistribution,
    path: str | Path,
) -> None:
    """Uncovered-count decay and the induced index distribution."""
    p = report.params
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 4))

    decay = dist.decay
    steps = range(len(decay))
    left.semilogy(steps, [max(u, 0.5) for u in decay], "o-", ms=4, label="uncovered")
    shrink = 1 - p.q ** -p.k
    left.semilogy(steps, [max(decay[0] * shrink**m, 0.5) for m in steps],
                  "--", color="gray", label="geometric reference")
    left.set_xlabel("rows added m")
    left.set_ylabel("uncovered patterns")
    left.grid(True, alpha=0.4)
    left.legend(fontsize=8)

    right.bar(range(1, len(dist) + 1), [float(x) for x in dist.probs])
    right.set_xlabel("index m")
    right.set_ylabel("P(m)")
    right.grid(True, axis="y", alpha=0.4)

    fig.suptitle(f"n = {p.n}, k = {p.k}, q = {p.q}, M = {report.row_count}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
