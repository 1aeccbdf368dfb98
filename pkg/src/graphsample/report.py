"""Figure rendering for sweep and scaling results.

Uses the Agg backend unconditionally: figures go to files next to the
delimited tables, never to a display.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import SpaceScaling, SweepResult


def sweep_figure(sweep: SweepResult, path: str | Path) -> Path:
    """Per-seed values against truth, plus success rates per check."""
    path = Path(path)
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))

    seeds = [o.seed for o in sweep.outcomes]
    left.plot(seeds, [o.oracle for o in sweep.outcomes], "k.", label="truth")
    left.plot(
        seeds,
        [o.value for o in sweep.outcomes],
        "o",
        markerfacecolor="none",
        label="output",
    )
    left.set_xlabel("seed")
    left.set_ylabel("value")
    left.set_title(f"{sweep.mode}: output vs truth")
    left.legend()

    rates = sweep.rates
    names = list(rates)
    right.bar(range(len(names)), [rates[n] for n in names])
    right.set_xticks(range(len(names)))
    right.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    right.set_ylim(0, 1.05)
    right.axhline(0.95, color="gray", linestyle=":")
    right.set_title("success rates")

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def scaling_figure(scaling: SpaceScaling, path: str | Path) -> Path:
    """Cell counts against the promise bound and against the vertex count."""
    path = Path(path)
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))

    ks = np.array(scaling.ks, dtype=float)
    cells = np.array(scaling.cells_by_k)
    left.loglog(ks, cells, "o-", label="measured")
    anchor = cells[0] / ks[0] ** scaling.slope
    left.loglog(ks, anchor * ks ** scaling.slope, "--", label=f"slope {scaling.slope:.2f}")
    left.set_xlabel("promise bound k")
    left.set_ylabel("cells")
    left.set_title("growth in the promise")
    left.legend()

    right.semilogx(scaling.ns, scaling.cells_by_n, "s-")
    right.set_xlabel("vertex count n")
    right.set_ylabel("cells")
    right.set_title(f"fixed promise (variation {scaling.variation:.1%})")

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
