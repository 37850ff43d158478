"""Figure rendering for Monte Carlo reports.

Rendered alongside the delimited output of the report path; uses the Agg
backend so it works headless.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .montecarlo import LEVELS, tidy_rows
from .stats import TEST_NAMES

_LABELS = {"kpss": "KPSS", "rs": "R/S", "vs": "V/S", "ks": "K/S"}


def render_rates(reports, path, xlabel="x", title=None):
    """Rejection-rate curves, one panel per level, one line per test."""
    rows = tidy_rows(reports)
    fig, axes = plt.subplots(1, len(LEVELS), figsize=(5 * len(LEVELS), 4),
                             sharey=True)
    axes = np.atleast_1d(axes)
    for ax, level in zip(axes, LEVELS):
        for test in TEST_NAMES:
            pts = sorted(
                (r["x"], r["rate"], r["half_width"])
                for r in rows
                if r["test"] == test and r["level"] == level
            )
            if not pts:
                continue
            x, rate, hw = (np.array(v) for v in zip(*pts))
            ax.errorbar(x, rate, yerr=hw, marker="o", capsize=2,
                        label=_LABELS[test])
        ax.axhline(level, color="grey", linestyle="--", linewidth=1)
        ax.set_xlabel(xlabel)
        ax.set_title(f"level {level:g}")
        ax.set_ylim(-0.02, 1.02)
    axes[0].set_ylabel("rejection rate")
    axes[0].legend()
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
