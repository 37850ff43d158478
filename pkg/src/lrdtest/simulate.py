"""Synthetic locally stationary regression samples with short or long memory errors.

The generative models mirror a tv-AR(1) covariate with either homoscedastic
AR(1) errors (M0), heteroscedastic AR(1)-driven errors (M1) or
tv-GARCH(1,1)-driven errors (M2); the error driver is fractionally
integrated when the memory parameter is positive.
"""

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gammaln

from .errors import ConfigError, DomainError

DEFAULT_TAIL_THRESHOLD = 1e-4


@dataclass
class FractionalWeights:
    """Binomial expansion weights of (1-B)^(-d), truncated at lag J."""

    d: float
    weights: np.ndarray
    truncation: int


def psi_weights(d, J):
    """Fractional integration weights psi_0..psi_J by the stable recursion
    psi_j = psi_{j-1} * (j - 1 + d) / j.
    """
    if not 0.0 <= d < 0.5:
        raise DomainError(f"memory parameter d={d} outside [0, 1/2)")
    if J < 0:
        raise DomainError("truncation J must be >= 0")
    w = np.empty(J + 1)
    w[0] = 1.0
    for j in range(1, J + 1):
        w[j] = w[j - 1] * (j - 1 + d) / j
    return FractionalWeights(d=d, weights=w, truncation=J)


def psi_weights_gamma(d, J):
    """Direct gamma-ratio evaluation Gamma(j+d)/(Gamma(d)Gamma(j+1)).

    Slower and less stable than the recursion; kept as an independent
    cross-check.
    """
    if d == 0.0:
        w = np.zeros(J + 1)
        w[0] = 1.0
        return w
    j = np.arange(J + 1)
    return np.exp(gammaln(j + d) - gammaln(d) - gammaln(j + 1.0))


def fractional_integrate(u, d, J, tail_threshold=DEFAULT_TAIL_THRESHOLD):
    """Apply the truncated filter e_i = sum_{k<=J} psi_k(d at t_i) u_{i-k}.

    ``u`` must carry at least J pre-sample values; the output has length
    ``len(u) - J`` and corresponds to grid points t_i = i/n, i = 1..n.
    ``d`` is either a constant or a callable d(t) evaluated at t_i (weights
    frozen at the current time).
    """
    u = np.asarray(u, dtype=float)
    n = u.size - J
    if n < 1:
        raise ConfigError(f"input length {u.size} shorter than truncation J={J} + 1")
    if callable(d):
        t = np.arange(1, n + 1) / n
        e = np.empty(n)
        for i in range(n)[::-1]:
            w = psi_weights(float(d(t[i])), J).weights
            e[i] = w @ u[i + J :: -1][: J + 1]
        return e
    if d == 0.0:
        return u[J:].copy()
    w = psi_weights(d, J).weights
    if w[-1] > tail_threshold:
        warnings.warn(
            f"psi_J = {w[-1]:.2e} exceeds tail threshold {tail_threshold:.0e}; "
            "increase the truncation J",
            RuntimeWarning,
        )
    return fftconvolve(u, w)[J : J + n]


def _beta1(t):
    return 4.0 * np.sin(np.pi * t)


def _beta2(t):
    return 4.0 * np.exp(-2.0 * (t - 0.5) ** 2)


def coefficient_functions(t):
    """The two smooth coefficient paths used by all built-in models."""
    t = np.asarray(t, dtype=float)
    return np.column_stack([_beta1(t), _beta2(t)])


@dataclass
class RegressionSample:
    """Observed (y, X) on the equispaced grid t_i = i/n, intercept first."""

    y: np.ndarray
    X: np.ndarray
    t: np.ndarray

    @property
    def n(self):
        return self.y.size

    @property
    def p(self):
        return self.X.shape[1]

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        self.X = np.asarray(self.X, dtype=float)
        if self.X.ndim != 2 or self.X.shape[0] != self.y.size:
            raise ConfigError("X must be an n x p matrix aligned with y")
        if not (np.all(np.isfinite(self.y)) and np.all(np.isfinite(self.X))):
            raise ConfigError("sample contains non-finite values")
        if not np.allclose(self.X[:, 0], 1.0):
            raise ConfigError("first column of X must be the intercept")

    def trend_only(self):
        """Drop covariates, keeping only the intercept column."""
        return RegressionSample(
            y=self.y, X=np.ones((self.n, 1)), t=self.t
        )


@dataclass
class SimulationSpec:
    """Generative description of one synthetic regression sample."""

    n: int
    model: str = "M1"
    d: Union[float, Callable[[float], float]] = 0.0
    seed: int = 0
    truncation: Optional[int] = None
    burn_in: Optional[int] = None
    innovations: Callable = field(default=None, repr=False)
    garch_params: Optional[dict] = None

    def __post_init__(self):
        if self.n < 8:
            raise ConfigError("n must be at least 8")
        if self.model not in ("M0", "M1", "M2"):
            raise ConfigError(f"unknown model {self.model!r}")
        if self.truncation is None:
            self.truncation = max(2000, self.n)
        if self.burn_in is None:
            self.burn_in = self.truncation + 100
        if self.burn_in < self.truncation:
            raise ConfigError("burn_in must cover the fractional truncation J")
        if not callable(self.d):
            if not 0.0 <= self.d < 0.5:
                raise DomainError(f"d={self.d} outside [0, 1/2)")
        if self.model == "M2":
            _check_garch(self._garch())

    def _garch(self):
        params = {
            "c": lambda t: 0.9 + 0.1 * np.cos(np.pi / 3 + 2 * np.pi * t),
            "alpha": lambda t: 0.1 + 0.2 * t,
            "beta": lambda t: 0.1 + 0.2 * t,
        }
        if self.garch_params:
            params.update(self.garch_params)
        return params


def _check_garch(params):
    t = np.linspace(0.0, 1.0, 201)
    tot = np.asarray(params["alpha"](t)) + np.asarray(params["beta"](t))
    if np.any(tot >= 1.0):
        raise ConfigError("GARCH stationarity violated: alpha(t)+beta(t) >= 1")


def _tv_ar1(coef_fn, innov, t, x0=0.0, drift_fn=None):
    """x_i = coef(t_i) x_{i-1} + innov_i + drift(t_i), looped over the grid."""
    x = np.empty(innov.size)
    prev = x0
    coef = coef_fn(t)
    drift = drift_fn(t) if drift_fn is not None else np.zeros_like(t)
    for i in range(innov.size):
        prev = coef[i] * prev + innov[i] + drift[i]
        x[i] = prev
    return x


def simulate_model(spec: SimulationSpec) -> RegressionSample:
    """Draw one sample from the requested generative model.

    The infinite past is approximated by ``burn_in`` pre-sample steps whose
    coefficient functions are frozen at their value at t = 0; the pre-sample
    driver also feeds the fractional filter so that long-memory errors see a
    full truncated history.
    """
    n, J, burn = spec.n, spec.truncation, spec.burn_in
    rng = np.random.default_rng(spec.seed)
    draw = spec.innovations or (lambda rng, size: rng.standard_normal(size))
    total = n + burn
    # grid extended into the pre-sample; coefficients frozen at t=0 there
    t_full = np.clip(np.arange(1 - burn, n + 1) / n, 0.0, 1.0)

    zeta = draw(rng, total)
    eps = draw(rng, total)

    if spec.model == "M0":
        w = _tv_ar1(
            lambda t: 0.25 + 0.25 * np.cos(2 * np.pi * t),
            0.25 * zeta,
            t_full,
            drift_fn=lambda t: (t - 0.5) ** 2,
        )
        u = _tv_ar1(
            lambda t: 0.35 - 0.4 * (t - 0.5) ** 2,
            0.8 * eps,
            t_full,
        )
    else:
        w = _tv_ar1(
            lambda t: 0.1 + 0.1 * np.cos(2 * np.pi * t),
            0.2 * zeta,
            t_full,
            drift_fn=lambda t: 0.7 * (t - 0.5) ** 2,
        )
        if spec.model == "M1":
            b = _tv_ar1(
                lambda t: 0.3 - 0.4 * (t - 0.5) ** 2,
                0.8 * eps,
                t_full,
            )
        else:
            g = _garch_driver(spec._garch(), eps, t_full)
            b = _tv_ar1(
                lambda t: 0.15 - 0.4 * (t - 0.5) ** 2,
                0.8 * g,
                t_full,
            )
        u = b * np.sqrt(1.0 + w * w)

    d = spec.d
    has_memory = callable(d) or d > 0.0
    if has_memory:
        e = fractional_integrate(u[total - n - J :], d, J)
    else:
        e = u[burn:]

    t = np.arange(1, n + 1) / n
    beta = coefficient_functions(t)
    X = np.column_stack([np.ones(n), w[burn:]])
    y = np.einsum("ij,ij->i", X, beta) + e
    return RegressionSample(y=y, X=X, t=t)


def _garch_driver(params, eps, t_full):
    """tv-GARCH(1,1) innovations g_i = eps_i * sigma_i(t)."""
    c = params["c"](t_full)
    alpha = params["alpha"](t_full)
    beta = params["beta"](t_full)
    g = np.empty(eps.size)
    denom = max(1.0 - alpha[0] - beta[0], 1e-3)
    sig2 = c[0] / denom
    g_prev = 0.0
    for i in range(eps.size):
        sig2 = c[i] + alpha[i] * g_prev * g_prev + beta[i] * sig2
        g_prev = eps[i] * np.sqrt(sig2)
        g[i] = g_prev
    return g
