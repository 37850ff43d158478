"""Data-driven selection of the smoothing parameters.

The regression bandwidth comes from generalized cross validation over a
plug-in range, the differencing window and its smoothing bandwidth from a
minimum-volatility scan of bootstrap statistic variances, and the moment
bandwidth defaults to the regression bandwidth.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .lrcov import m_hat_grid, sigmaH_diff, sigma_hat
from .locreg import jackknife_fit, local_linear_fit, smoother_trace
from .stats import TEST_NAMES

GCV_GRID_SIZE = 20


@dataclass
class BandwidthSet:
    """The four selected smoothing parameters plus the MV replicate count."""

    b_n: float
    m: int
    tau_n: float
    eta_n: float
    B_mv: int = 100

    def validate(self, n):
        if not 0.0 < self.b_n < 0.5:
            raise ConfigError(f"b_n={self.b_n} outside (0, 1/2)")
        if not 2 <= self.m <= n / 4:
            raise ConfigError(f"m={self.m} outside [2, n/4] for n={n}")
        if n - 2 * int(np.floor(n * self.b_n)) < 2:
            raise ConfigError(f"b_n={self.b_n} leaves an empty trimmed range")
        gamma = self.tau_n + (self.m + 1) / n
        if not gamma < 0.5:
            raise ConfigError(f"tau_n + (m+1)/n = {gamma:.3f} must be below 1/2")
        if not 0.0 < self.eta_n < 0.5:
            raise ConfigError(f"eta_n={self.eta_n} outside (0, 1/2)")
        return self


def pilot_parameters(n):
    """Rule-of-thumb pilot values used to seed the plug-in bandwidth range."""
    return n ** (-1.0 / 5.0), int(np.floor(n ** (2.0 / 7.0))), n ** (-1.0 / 6.0)


def _plugin_c(sample):
    """Plug-in constant from pilot covariance and pilot slope roughness."""
    n = sample.n
    b0, m0, tau0 = pilot_parameters(n)
    if sample.p == 1:
        tr = np.sum(sigmaH_diff(sample.y, m0, tau0))
    else:
        tr = np.sum(np.einsum("ijj->i", sigma_hat(sample, m0, tau0)))
    _, slope = local_linear_fit(sample, b0, return_slope=True)
    q = int(np.floor(n * b0))
    diffs = slope[q + 1 : n - q] - slope[q : n - q - 1]
    rough = float(np.sum(diffs * diffs))
    if not np.isfinite(rough) or rough <= 0.0 or not np.isfinite(tr) or tr <= 0.0:
        return None
    # tr/n approximates the integrated covariance trace and n*rough the
    # integrated squared second derivative; without the n^2 normalisation
    # the ratio scales like n^2 and the bandwidth range escapes (0, 1/2).
    return float((15.0 * tr / (n * n * rough)) ** 0.2)


def gcv_objective(sample, b, jackknife=True):
    """n^{-1} RSS / (1 - trace/n)^2 for the smoother at bandwidth b."""
    n = sample.n
    if jackknife:
        resid = jackknife_fit(sample, b).residuals
    else:
        beta = local_linear_fit(sample, b)
        resid = sample.y - np.einsum("ij,ij->i", sample.X, beta)
    tr = smoother_trace(sample, b, jackknife=jackknife)
    denom = 1.0 - tr / n
    if denom <= 0.0:
        return np.inf
    return float(np.mean(resid * resid) / (denom * denom))


def gcv_select_b(sample, grid_size=GCV_GRID_SIZE, jackknife=True):
    """Generalized cross validation over the plug-in bandwidth range.

    Falls back to the pilot bandwidth when the plug-in constant is
    undefined (constant coefficient paths).
    """
    n = sample.n
    b0, _, _ = pilot_parameters(n)
    c = _plugin_c(sample)
    if c is None:
        warnings.warn(
            "plug-in constant undefined (flat pilot fit); using pilot bandwidth",
            RuntimeWarning,
        )
        return b0
    lo = c * n ** (-0.25)
    hi = c * n ** (-1.0 / 6.0)
    # keep the range inside what trimming and the kernel window allow
    b_min = (2.0 * sample.p + 1.0) / n
    b_max = (n - 2.0) / (2.0 * n)
    lo = min(max(lo, b_min), b_max)
    hi = min(max(hi, lo), b_max)
    grid = np.geomspace(lo, hi, grid_size)
    scores = np.array([gcv_objective(sample, b, jackknife=jackknife) for b in grid])
    if not np.any(np.isfinite(scores)):
        warnings.warn("GCV degenerate on the whole grid; using pilot bandwidth",
                      RuntimeWarning)
        return b0
    return float(grid[int(np.argmin(scores))])


def default_mv_grids(n):
    """Window and bandwidth grids scanned by the minimum-volatility rule."""
    base = n ** (2.0 / 7.0)
    m_lo = max(2, int(np.floor(5.0 / 7.0 * base)))
    m_hi = max(m_lo + 2, int(np.floor(2.0 * base)))
    m_hi = min(m_hi, int((n - 1) // 2), max(2, n // 4))
    m_grid = list(range(m_lo, m_hi + 1))
    tau_grid = [f * n ** (-1.0 / 6.0) for f in (6.0 / 7.0, 1.0, 8.0 / 7.0)]
    # every (m, tau) candidate must keep tau + (m+1)/n below one half
    tau_max = 0.5 - (m_hi + 2.0) / n
    tau_grid = sorted({min(tau, tau_max) for tau in tau_grid})
    return m_grid, tau_grid


def _cell_statistics(sample, b, m, tau, eta, model_kind, seed, B, use_kstar_trend):
    from .bootstrap import boot_covariate, boot_trend
    from .lrcov import estimate_lrv

    est = estimate_lrv(sample, m, tau, eta, model_kind=model_kind)
    if model_kind == "trend":
        return boot_trend(est.sigmaH, b, B, seed, use_kstar=use_kstar_trend)
    return boot_covariate(
        sample.X, est.M_hat, est.Sigma_root, est.sigmaH, b, B, seed
    )


def mv_select_all(sample, b, model_kind="trend", tests=TEST_NAMES, seed=0, B=100,
                  eta=None, m_grid=None, tau_grid=None, use_kstar_trend=False,
                  cell_fn=None):
    """Minimum-volatility selection of (m, tau), one pair per test.

    Every grid cell runs B bootstrap replicates from the same multiplier
    stream; the cell whose statistic variance is most stable across its
    neighborhood wins. ``cell_fn`` can replace the bootstrap evaluation
    for testing.
    """
    n = sample.n
    if eta is None:
        eta = b
    if m_grid is None or tau_grid is None:
        dm, dt = default_mv_grids(n)
        m_grid = dm if m_grid is None else list(m_grid)
        tau_grid = dt if tau_grid is None else list(tau_grid)
    m_grid = sorted(int(m) for m in m_grid)
    tau_grid = sorted(float(t) for t in tau_grid)
    if len(m_grid) < 1 or len(tau_grid) < 1:
        raise ConfigError("empty MV grid")

    if cell_fn is None:
        def cell_fn(m, tau):
            return _cell_statistics(
                sample, b, m, tau, eta, model_kind, seed, B, use_kstar_trend
            )

    s2 = {name: np.empty((len(m_grid), len(tau_grid))) for name in tests}
    for i, m in enumerate(m_grid):
        for j, tau in enumerate(tau_grid):
            draws = cell_fn(m, tau)
            for name in tests:
                s2[name][i, j] = np.var(draws[name], ddof=1)

    out = {}
    for name in tests:
        mv = _neighborhood_se(s2[name])
        i, j = np.unravel_index(int(np.argmin(mv)), mv.shape)
        out[name] = (m_grid[i], tau_grid[j])
    return out


def _neighborhood_se(s2):
    """Spread of each cell's value against its 4 axis neighbors (truncated)."""
    ni, nj = s2.shape
    mv = np.empty_like(s2)
    for i in range(ni):
        for j in range(nj):
            vals = [s2[i, j]]
            if i > 0:
                vals.append(s2[i - 1, j])
            if i < ni - 1:
                vals.append(s2[i + 1, j])
            if j > 0:
                vals.append(s2[i, j - 1])
            if j < nj - 1:
                vals.append(s2[i, j + 1])
            mv[i, j] = np.std(vals, ddof=1) if len(vals) > 1 else 0.0
    return mv


def mv_select(sample, b, m_grid=None, tau_grid=None, seed=0, model_kind="trend",
              test="kpss", B=100, eta=None, cell_fn=None):
    """Single-test convenience wrapper around mv_select_all."""
    return mv_select_all(
        sample, b, model_kind=model_kind, tests=(test,), seed=seed, B=B, eta=eta,
        m_grid=m_grid, tau_grid=tau_grid, cell_fn=cell_fn,
    )[test]


def eta_select(sample, b, eta_grid=None):
    """Moment-matrix bandwidth: the regression bandwidth by default.

    With a grid, picks the bandwidth whose local moment estimates are most
    stable across a 5-point bandwidth neighborhood.
    """
    if not eta_grid:
        return float(b)
    eta_grid = sorted(float(e) for e in eta_grid)
    grids = [m_hat_grid(sample.X, sample.t, e) for e in eta_grid]
    scale = max(float(np.max(np.abs(g))) for g in grids)
    tol = (5e-12 * max(scale, 1.0)) ** 2
    scores = []
    for i in range(len(eta_grid)):
        lo, hi = max(0, i - 2), min(len(eta_grid), i + 3)
        block = np.stack(grids[lo:hi])
        dev = block - block.mean(axis=0, keepdims=True)
        per_t = np.sum(dev * dev, axis=(0, 2, 3))
        score = float(np.max(per_t))
        # deviations at roundoff level are ties, not signal
        scores.append(0.0 if score <= tol else score)
    return eta_grid[int(np.argmin(scores))]


def select_bandwidths(sample, model_kind="trend", seed=0, B_mv=100,
                      tests=TEST_NAMES) -> dict:
    """Full automatic selection; returns one BandwidthSet per test."""
    work = sample.trend_only() if model_kind == "trend" else sample
    b = gcv_select_b(work)
    eta = eta_select(work, b)
    pairs = mv_select_all(work, b, model_kind=model_kind, tests=tests,
                          seed=seed, B=B_mv, eta=eta)
    return {
        name: BandwidthSet(b_n=b, m=m, tau_n=tau, eta_n=eta, B_mv=B_mv).validate(work.n)
        for name, (m, tau) in pairs.items()
    }
