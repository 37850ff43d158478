"""Kernel evaluations and kernel-derived constants used by every smoother.

Only the Epanechnikov kernel ships enabled; the bandwidth-range constant
used by the bandwidth selector hard-codes its moments.
"""

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import DomainError

# Epanechnikov moments: int K^2 and int x^2 K over [-1, 1].
PHI0 = 0.6
MU2 = 0.2


def eval_K(x):
    """Epanechnikov kernel 0.75 * (1 - x^2) on [-1, 1], zero outside."""
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) <= 1.0, 0.75 * (1.0 - x * x), 0.0)


def eval_Kstar_b(u, b):
    """Two-bandwidth combination 2*K(sqrt(2)u/b) - K(u/b) with support |u| <= b."""
    if b <= 0:
        raise DomainError("bandwidth b must be positive")
    u = np.asarray(u, dtype=float)
    return 2.0 * eval_K(np.sqrt(2.0) * u / b) - eval_K(u / b)


def kstar(x):
    """Equivalent kernel of the two-bandwidth bias correction.

    K*(x) = 2*sqrt(2)*K(sqrt(2)x) - K(x); integrates to one, which makes it
    usable as a density-like weight in moment estimation and the bootstrap.
    """
    x = np.asarray(x, dtype=float)
    return 2.0 * np.sqrt(2.0) * eval_K(np.sqrt(2.0) * x) - eval_K(x)


def kstar_integral():
    """Quadrature of the equivalent kernel over its support (should be 1)."""
    val, _ = integrate.quad(kstar, -1.0, 1.0, limit=200)
    return val


# Cutoff beyond which the kappa2 integrand is replaced by its power-law tail.
_KAPPA2_CUTOFF = 1e4


def _kappa2_integrand(t, d):
    lag = max(t - 1.0, 0.0) ** d
    a = t**d - lag
    b = 2.0 * t**d - lag - (t + 1.0) ** d
    return a * b


def kappa2(d, tol=1e-8):
    """Variance-inflation constant of the lag-window difference estimator
    under fractional integration of order d.

    kappa2(d) = Gamma(d+1)^-2 * int_0^inf (t^d - (t-1)_+^d)
                (2 t^d - (t-1)_+^d - (t+1)^d) dt, with kappa2(0) = 1.
    """
    if not 0.0 <= d < 0.5:
        raise DomainError(f"d={d} outside [0, 1/2)")
    if d == 0.0:
        return 1.0
    body, err1 = integrate.quad(
        _kappa2_integrand, 0.0, 1.0, args=(d,), epsabs=tol, limit=400
    )
    mid, err2 = integrate.quad(
        _kappa2_integrand, 1.0, _KAPPA2_CUTOFF, args=(d,), epsabs=tol, limit=800
    )
    if err1 + err2 > 100 * max(tol, 1e-12):
        raise ArithmeticError(
            f"kappa2 quadrature did not reach tolerance (achieved {err1 + err2:.2e})"
        )
    # Integrand ~ d^2 (1-d) t^(2d-3) for large t; integrate the tail analytically.
    tail = d * d * (1.0 - d) * _KAPPA2_CUTOFF ** (2.0 * d - 2.0) / (2.0 - 2.0 * d)
    return float(np.exp(-2.0 * gammaln(d + 1.0)) * (body + mid + tail))
