"""Partial-sum statistics of the regression residuals.

All four statistics are functionals of the trimmed cumulative sums
S_r = sum_{i=l}^{r} e_i with l = floor(nb) + 1 and r running up to
n - floor(nb); the same functionals are applied to bootstrap paths.
"""

import numpy as np

from .errors import ConfigError

TEST_NAMES = ("kpss", "rs", "vs", "ks")


def trim_bounds(n, b):
    """Trimmed index range (l, u), 1-based inclusive, for bandwidth b."""
    q = int(np.floor(n * b))
    l, u = q + 1, n - q
    if u - l + 1 < 2:
        raise ConfigError(
            f"bandwidth b={b} trims the sample to fewer than 2 points (n={n})"
        )
    return l, u


def partial_sums(residuals, b):
    """Cumulative sums of the residuals over the trimmed index range."""
    residuals = np.asarray(residuals, dtype=float)
    n = residuals.size
    l, u = trim_bounds(n, b)
    return np.cumsum(residuals[l - 1 : u])


def statistics_from_path(path, n):
    """The four test statistics as functionals of a partial-sum path.

    ``path`` holds S_l..S_u for a sample of size n; the scale factor
    n * (u - l + 1) normalises the quadratic statistics.
    """
    path = np.asarray(path, dtype=float)
    m = path.size
    scale = 1.0 / (n * m)
    sq = path @ path
    return {
        "kpss": scale * sq,
        "rs": float(np.max(path) - np.min(path)),
        "vs": scale * (sq - np.sum(path) ** 2 / m),
        "ks": float(np.max(np.abs(path))),
    }


def compute_statistics(residuals, b):
    """All four statistics of a residual series at bandwidth b."""
    residuals = np.asarray(residuals, dtype=float)
    path = partial_sums(residuals, b)
    return statistics_from_path(path, residuals.size)


def kpss_stat(residuals, b):
    return compute_statistics(residuals, b)["kpss"]


def rs_stat(residuals, b):
    return compute_statistics(residuals, b)["rs"]


def vs_stat(residuals, b):
    return compute_statistics(residuals, b)["vs"]


def ks_stat(residuals, b):
    return compute_statistics(residuals, b)["ks"]
