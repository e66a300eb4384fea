"""Figure rendering for the report path: TDC-count comparison across grid
sizes and sparsity-vs-success curves.  Figures are written to files next to
the delimited tables; nothing is shown interactively."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .binmat import BinaryCode
from .construct import TABLE1
from .sim import random_support_success

__all__ = ["compare_designs", "render_compare", "render_sparsity", "sparsity_curve"]


def compare_designs(ns: list[int]) -> list[dict]:
    """Per grid size: TDC counts for the three reference wirings and the
    best-known d-disjunct designs (published lengths)."""
    rows = []
    for n in ns:
        m = int(round(n**0.5))
        if m * m != n:
            raise ValueError(f"{n} is not a square grid size")
        row = {
            "n": n,
            "per_pixel": n,
            "cross_strip": 2 * m,
            "binary_counting": n.bit_length(),
            "degenerate": n == 1,
        }
        for d in range(2, 7):
            entry = TABLE1.get((n, d))
            row[f"d{d}"] = entry[0] if entry else None
        rows.append(row)
    return rows


def render_compare(rows: list[dict], path: str) -> None:
    """Cross-strip growth O(sqrt(n)) against the near-logarithmic growth of
    the disjunct designs."""
    ns = [r["n"] for r in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ns, [r["cross_strip"] for r in rows], "o-", label="cross-strip (2m)")
    for d in range(2, 7):
        vals = [(n, r[f"d{d}"]) for n, r in zip(ns, rows) if r[f"d{d}"] is not None]
        if vals:
            ax.plot(*zip(*vals), "s--", label=f"{d}-disjunct")
    ax.set_xscale("log")
    ax.set_xlabel("pixels n")
    ax.set_ylabel("TDC count t")
    ax.legend(fontsize=8)
    ax.set_title("TDC counts: cross-strip vs group-testing designs")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def sparsity_curve(
    code: BinaryCode, s_max: int, trials: int, seed: int
) -> list[tuple[int, float]]:
    return [
        (s, random_support_success(code, s, trials, seed + s))
        for s in range(1, s_max + 1)
    ]


def render_sparsity(curves: dict[str, list[tuple[int, float]]], path: str) -> None:
    """Success fraction against the number of simultaneous firings."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, pts in curves.items():
        ax.plot([s for s, _ in pts], [100 * f for _, f in pts], "o-", label=label)
    ax.set_xlabel("simultaneous firings s")
    ax.set_ylabel("decoded (%)")
    ax.set_ylim(-2, 102)
    ax.legend(fontsize=8)
    ax.set_title("Cover-decoding success vs sparsity")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
