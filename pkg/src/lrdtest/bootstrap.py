"""Multiplier bootstrap for the partial-sum tests under both model kinds.

Each replicate draws iid standard normal multipliers, builds the simulated
partial-sum path over the trimmed range, and evaluates the same four
functionals as the observed statistics. Critical values come from the
sorted replicate statistics.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.ndimage import correlate1d

from .errors import ConfigError, SingularDesignError
from .kernels import eval_K, kstar
from .locreg import jackknife_fit
from .lrcov import COND_LIMIT, estimate_lrv
from .stats import TEST_NAMES, compute_statistics, statistics_from_path, trim_bounds


@dataclass
class TestConfig:
    """Run configuration; None fields request automatic selection."""

    b: Optional[float] = None
    m: Optional[int] = None
    tau: Optional[float] = None
    eta: Optional[float] = None
    B: int = 2000
    seed: int = 0
    alpha: float = 0.05
    use_kstar_trend: bool = True
    mv_B: int = 100

    def __post_init__(self):
        if self.B < 1:
            raise ConfigError("B must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie in (0, 1)")


@dataclass
class TestReport:
    """One test's observed statistic against its bootstrap distribution."""

    test: str
    model: str
    statistic: float
    boot: np.ndarray
    p_value: float
    params: dict = field(default_factory=dict)


def _multiplier_block(n, p, B, seed):
    """B independent replicate streams of n x p standard normal multipliers.

    Each replicate has its own generator keyed by (seed, index) so that any
    single replicate can be reproduced in isolation.
    """
    V = np.empty((B, n, p))
    for r in range(B):
        V[r] = np.random.default_rng([seed, r]).standard_normal((n, p))
    return V


def _collect(paths, n):
    """Four statistic vectors (one entry per replicate) from path matrix."""
    out = {name: np.empty(paths.shape[0]) for name in TEST_NAMES}
    for r, path in enumerate(paths):
        vals = statistics_from_path(path, n)
        for name in TEST_NAMES:
            out[name][r] = vals[name]
    return out


def boot_trend(sigma_grid, b, B, seed, multipliers=None, use_kstar=False):
    """Bootstrap statistic draws for the trend model.

    The simulated path cumulates sigma(t_i)V_i minus its own kernel-smoothed
    component, mimicking what residual extraction does to the partial sums.
    """
    sigma = np.asarray(sigma_grid, dtype=float)
    n = sigma.size
    l, u = trim_bounds(n, b)
    w = min(int(np.floor(n * b)), n - 1)
    h = np.arange(-w, w + 1) / (n * b)
    kern = kstar(h) if use_kstar else eval_K(h)

    if multipliers is None:
        V = _multiplier_block(n, 1, B, seed)[:, :, 0]
    else:
        V = np.atleast_2d(np.asarray(multipliers, dtype=float))
    sv = sigma[None, :] * V
    smoothed = correlate1d(sv, kern, axis=1, mode="constant", cval=0.0) / (n * b)
    inc = (sv - smoothed)[:, l - 1 : u]
    return _collect(np.cumsum(inc, axis=1), n)


def boot_covariate(X, M_grid, Sigma_root_grid, sigmaH_grid, b, B, seed, multipliers=None):
    """Bootstrap statistic draws for the covariate model.

    The path subtracts the kernel-smoothed projection of the simulated
    moment process through the inverted covariate second-moment matrices,
    and adds the direct error-level component. The direct component is the
    first coordinate of the same factored vector Sigma_root(t_i) V_i that
    drives the projection; sharing one vector keeps the two terms jointly
    Gaussian with the covariance that lets the interior contributions
    cancel, which a separately scaled sigmaH V_{i,1} term would not do
    unless the factor were lower triangular.
    """
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    M = np.asarray(M_grid, dtype=float)
    root = np.asarray(Sigma_root_grid, dtype=float)
    sigmaH = np.asarray(sigmaH_grid, dtype=float)
    l, u = trim_bounds(n, b)
    idx = np.arange(l - 1, u)

    cond = np.linalg.cond(M)
    bad = np.nonzero(~(cond < COND_LIMIT))[0]
    if bad.size:
        i = int(bad[0])
        raise SingularDesignError(
            f"singular covariate moment matrix at t={(i + 1) / n:.4f}", t=(i + 1) / n
        )
    a = np.linalg.solve(np.swapaxes(M[idx], 1, 2), X[idx][:, :, None])[:, :, 0]

    # D[i, j, :] holds the weight of V_j in the i-th path increment.
    t = np.arange(1, n + 1) / n
    kw = kstar((t[idx][:, None] - t[None, :]) / b)
    proj = np.einsum("ip,jpq->ijq", a, root)
    D = -(kw[:, :, None] * proj) / (n * b)
    D[np.arange(idx.size), idx, :] += root[idx, 0, :]

    if multipliers is None:
        V = _multiplier_block(n, p, B, seed)
    else:
        V = np.asarray(multipliers, dtype=float)
        if V.ndim == 2:
            V = V[None]
    inc = V.reshape(V.shape[0], n * p) @ D.reshape(idx.size, n * p).T
    return _collect(np.cumsum(inc, axis=1), n)


def p_value(statistic, boot):
    """Right-tail bootstrap p-value, ties counted as non-rejections."""
    boot = np.asarray(boot, dtype=float)
    if boot.size == 0:
        raise ConfigError("empty bootstrap sample")
    return 1.0 - float(np.count_nonzero(boot <= statistic)) / boot.size


def rejects(statistic, boot, alpha):
    """Order-statistic rejection rule at level alpha."""
    boot = np.sort(np.asarray(boot, dtype=float))
    r = int(np.floor(boot.size * (1.0 - alpha)))
    r = min(max(r, 1), boot.size)
    return bool(statistic > boot[r - 1])


def run_test(sample, model_kind, tests=TEST_NAMES, config=None):
    """Full pipeline: tune, fit, compute statistics, bootstrap, report.

    Returns one TestReport per requested test. Tests sharing the same
    (m, tau) selection also share their bootstrap replicates.
    """
    from . import tuning

    if config is None:
        config = TestConfig()
    tests = tuple(tests)
    if not tests:
        raise ConfigError("no tests requested")
    unknown = [name for name in tests if name not in TEST_NAMES]
    if unknown:
        raise ConfigError(f"unknown tests {unknown}; choose from {TEST_NAMES}")
    if model_kind not in ("trend", "covariate"):
        raise ConfigError(f"unknown model kind {model_kind!r}")
    if model_kind == "covariate" and sample.p < 2:
        raise ConfigError("covariate model requires at least one covariate column")

    work = sample.trend_only() if model_kind == "trend" else sample
    n = work.n

    b = config.b if config.b is not None else tuning.gcv_select_b(work)
    trim_bounds(n, b)
    eta = config.eta if config.eta is not None else tuning.eta_select(work, b)

    fit = jackknife_fit(work, b)
    observed = compute_statistics(fit.residuals, b)

    if config.m is not None and config.tau is not None:
        selection = {name: (int(config.m), float(config.tau)) for name in tests}
    elif config.m is None and config.tau is None:
        selection = tuning.mv_select_all(
            work,
            b,
            model_kind=model_kind,
            tests=tests,
            seed=config.seed,
            B=config.mv_B,
            eta=eta,
            use_kstar_trend=config.use_kstar_trend,
        )
    else:
        raise ConfigError("m and tau must be both given or both auto")

    boot_cache = {}
    reports = []
    for name in tests:
        m, tau = selection[name]
        if (m, tau) not in boot_cache:
            est = estimate_lrv(work, m, tau, eta, model_kind=model_kind)
            if model_kind == "trend":
                draws = boot_trend(
                    est.sigmaH,
                    b,
                    config.B,
                    config.seed,
                    use_kstar=config.use_kstar_trend,
                )
            else:
                draws = boot_covariate(
                    work.X,
                    est.M_hat,
                    est.Sigma_root,
                    est.sigmaH,
                    b,
                    config.B,
                    config.seed,
                )
            boot_cache[(m, tau)] = draws
        draws = boot_cache[(m, tau)]
        boot = np.sort(draws[name])
        stat = float(observed[name])
        reports.append(
            TestReport(
                test=name,
                model=model_kind,
                statistic=stat,
                boot=boot,
                p_value=p_value(stat, boot),
                params={
                    "b": float(b),
                    "m": int(m),
                    "tau": float(tau),
                    "eta": float(eta),
                    "B": int(config.B),
                    "seed": int(config.seed),
                },
            )
        )
    return reports
