"""Difference-based estimation of error variance and long-run covariance.

Block sums of length m are differenced at lag m, which cancels the smooth
signal; kernel-weighted averages of the squared differences estimate the
long-run variance of the noise without using the regression residuals.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .errors import ConfigError, DomainError, SingularDesignError
from .kernels import eval_K, kstar

SIGMA_FLOOR = 1e-12
COND_LIMIT = 1e12


@dataclass
class LrvEstimates:
    """Gridded variance and covariance estimates feeding the bootstrap."""

    t: np.ndarray
    sigmaH2: np.ndarray
    M_hat: np.ndarray
    Sigma_hat: np.ndarray
    Sigma_root: np.ndarray
    m: int
    tau: float
    eta: float
    clipped_mass: float = 0.0

    @property
    def sigmaH(self):
        return np.sqrt(np.maximum(self.sigmaH2, SIGMA_FLOOR))


def _check_window(n, m, tau):
    if not 2 <= m <= (n - 1) / 2:
        raise DomainError(f"block length m={m} outside [2, (n-1)/2] for n={n}")
    if not 0.0 < tau < 0.5:
        raise DomainError(f"smoothing bandwidth tau={tau} outside (0, 1/2)")


def _block_deltas(series, m):
    """Lag-m differences of length-m block sums, scaled by 1/m.

    Returns the array over j = m .. n-m (1-based grid indices).
    """
    series = np.asarray(series, dtype=float)
    n = series.shape[0]
    cz = np.zeros((n + 1,) + series.shape[1:])
    np.cumsum(series, axis=0, out=cz[1:])
    j = np.arange(m, n - m + 1)
    return (2.0 * cz[j] - cz[j - m] - cz[j + m]) / m


def _kernel_average(values, j_index, n, tau):
    """Kernel-weighted average over blocks with flat boundary extension.

    ``values`` has one row per block position in ``j_index`` (1-based grid
    indices). The average at each grid point t_i uses weights
    K((t_j - t_i)/tau) normalised by the kernel mass over the full grid,
    then values on [0, m/n) and (1 - m/n, 1] are replaced by the nearest
    interior value.
    """
    values = np.asarray(values, dtype=float)
    shape = values.shape[1:]
    flat = values.reshape(values.shape[0], -1)
    full = np.zeros((n, flat.shape[1]))
    full[j_index - 1] = flat

    w = min(int(np.floor(n * tau)), n - 1)
    h = np.arange(-w, w + 1)
    k = eval_K(h / (n * tau))
    num = correlate1d(full, k, axis=0, mode="constant", cval=0.0)
    den = correlate1d(np.ones(n), k, mode="constant", cval=0.0)
    if np.any(den <= 0.0):
        raise SingularDesignError("empty kernel window in block smoothing")
    out = num / den[:, None]

    m_lo = int(j_index[0])
    m_hi = int(j_index[-1])
    out[: m_lo - 1] = out[m_lo - 1]
    out[m_hi:] = out[m_hi - 1]
    return out.reshape((n,) + shape)


def sigmaH_diff(series, m, tau):
    """Difference-based estimate of the error variance grid for a scalar series."""
    series = np.asarray(series, dtype=float)
    n = series.size
    _check_window(n, m, tau)
    delta = _block_deltas(series, m)
    j = np.arange(m, n - m + 1)
    vals = m * delta * delta / 2.0
    return _kernel_average(vals, j, n, tau)


def m_hat(X, t, eta):
    """Kernel-weighted second-moment matrix of the covariates at time t.

    Evaluation is clamped to [eta, 1 - eta] so boundary estimates reuse the
    nearest interior window.
    """
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    if not 0.0 < eta < 0.5:
        raise DomainError(f"eta={eta} outside (0, 1/2)")
    if n * eta * eta < 4:
        warnings.warn(
            f"n*eta^2 = {n * eta * eta:.2f} < 4; moment estimate may be noisy",
            RuntimeWarning,
        )
    ts = np.clip(t, eta, 1.0 - eta)
    grid = np.arange(1, n + 1) / n
    kw = kstar((grid - ts) / eta)
    M = (X * kw[:, None]).T @ X / (n * eta)
    return 0.5 * (M + M.T)


def m_hat_grid(X, t_grid, eta):
    """m_hat evaluated at every grid point, stacked to an n x p x p array."""
    return np.stack([m_hat(X, t, eta) for t in np.asarray(t_grid, dtype=float)])


def sigma_acute(sample, m, tau):
    """Uncorrected difference-based long-run covariance grid (n x p x p)."""
    n = sample.n
    _check_window(n, m, tau)
    delta = _block_deltas(sample.X * sample.y[:, None], m)
    j = np.arange(m, n - m + 1)
    vals = m * np.einsum("jp,jq->jpq", delta, delta) / 2.0
    return _kernel_average(vals, j, n, tau)


def _design_differences(sample, m):
    """Per-index differences of x x^T and x y at lag m, i = 1 .. n-m."""
    X, y = sample.X, sample.y
    xx = np.einsum("ij,ik->ijk", X, X)
    xy = X * y[:, None]
    return xx[:-m] - xx[m:], xy[:-m] - xy[m:]


def _sliding_block_mean(arr, m, n):
    """Means over i = j-m+1 .. j of per-i arrays, j = m .. n-m (1-based)."""
    cz = np.zeros((arr.shape[0] + 1,) + arr.shape[1:])
    np.cumsum(arr, axis=0, out=cz[1:])
    j = np.arange(m, n - m + 1)
    return (cz[j] - cz[j - m]) / m


def breve_beta(sample, m, tau):
    """Difference-based coefficient estimate on the grid, no bandwidth b needed."""
    n, p = sample.n, sample.p
    _check_window(n, m, tau)
    if p < 2:
        raise ConfigError(
            "difference-based coefficient estimation requires p >= 2 "
            "(intercept-only designs have identically zero differences)"
        )
    G, h = _design_differences(sample, m)
    acute = _sliding_block_mean(np.einsum("ijk,ikl->ijl", G, G), m, n)
    breve = _sliding_block_mean(np.einsum("ijk,ik->ij", G, h), m, n)
    j = np.arange(m, n - m + 1)
    omega_mat = _kernel_average(acute / 2.0, j, n, tau)
    varpi = _kernel_average(breve / 2.0, j, n, tau)
    cond = np.linalg.cond(omega_mat)
    bad = np.nonzero(~(cond < COND_LIMIT))[0]
    if bad.size:
        i = int(bad[0])
        raise SingularDesignError(
            f"singular design-difference matrix at t={sample.t[i]:.4f}",
            t=float(sample.t[i]),
        )
    return np.linalg.solve(omega_mat, varpi[:, :, None])[:, :, 0], varpi


def sigma_hat(sample, m, tau):
    """Bias-corrected difference-based long-run covariance grid, symmetrized."""
    n, p = sample.n, sample.p
    _check_window(n, m, tau)
    if p == 1:
        return sigmaH_diff(sample.y, m, tau).reshape(n, 1, 1)
    acute = sigma_acute(sample, m, tau)
    beta_grid, _ = breve_beta_or_none(sample, m, tau)
    if beta_grid is None:
        return 0.5 * (acute + np.swapaxes(acute, 1, 2))
    xxb = np.einsum("ijk,ik->ij", np.einsum("ij,ik->ijk", sample.X, sample.X), beta_grid)
    a = xxb[:-m] - xxb[m:]
    A = _sliding_block_mean(a, m, n)
    j = np.arange(m, n - m + 1)
    correction = _kernel_average(m * np.einsum("jp,jq->jpq", A, A) / 2.0, j, n, tau)
    out = acute - correction
    return 0.5 * (out + np.swapaxes(out, 1, 2))


def breve_beta_or_none(sample, m, tau):
    """breve_beta, degrading to (None, varpi) when the cross term vanishes."""
    G, h = _design_differences(sample, m)
    breve = _sliding_block_mean(np.einsum("ijk,ik->ij", G, h), m, sample.n)
    if not np.any(breve):
        warnings.warn(
            "cross-difference term is identically zero; skipping bias correction",
            RuntimeWarning,
        )
        return None, np.zeros((sample.n, sample.p))
    return breve_beta(sample, m, tau)


def psd_sqrt(A, return_clipped=False):
    """Symmetric PSD square root via eigendecomposition.

    Negative eigenvalues are clipped to zero before rooting; the clipped
    mass (sum of their absolute values) is available as a diagnostic.
    """
    A = np.asarray(A, dtype=float)
    vals, vecs = np.linalg.eigh(0.5 * (A + np.swapaxes(A, -1, -2)))
    clipped = float(np.sum(np.abs(np.minimum(vals, 0.0))))
    root_vals = np.sqrt(np.maximum(vals, 0.0))
    root = np.einsum("...ij,...j,...kj->...ik", vecs, root_vals, vecs)
    root = 0.5 * (root + np.swapaxes(root, -1, -2))
    return (root, clipped) if return_clipped else root


def estimate_lrv(sample, m, tau, eta, model_kind="covariate") -> LrvEstimates:
    """All gridded estimates needed by the bootstrap, in one pass.

    For the trend model the error variance comes from differencing y
    directly; for the covariate model the intercept entry of the corrected
    covariance supplies it, since y itself mixes covariate variation into
    the differences.
    """
    n = sample.n
    if model_kind == "trend":
        work = sample.trend_only()
        sigmaH2 = sigmaH_diff(work.y, m, tau)
        Sigma = sigmaH2.reshape(n, 1, 1)
        M = np.ones((n, 1, 1))
        root, clipped = psd_sqrt(np.maximum(Sigma, 0.0), return_clipped=True)
    elif model_kind == "covariate":
        Sigma = sigma_hat(sample, m, tau)
        sigmaH2 = np.maximum(Sigma[:, 0, 0], SIGMA_FLOOR)
        M = m_hat_grid(sample.X, sample.t, eta)
        root, clipped = psd_sqrt(Sigma, return_clipped=True)
    else:
        raise ConfigError(f"unknown model kind {model_kind!r}")
    return LrvEstimates(
        t=sample.t,
        sigmaH2=sigmaH2,
        M_hat=M,
        Sigma_hat=Sigma,
        Sigma_root=root,
        m=int(m),
        tau=float(tau),
        eta=float(eta),
        clipped_mass=clipped,
    )
