import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from lrdtest.errors import DomainError
from lrdtest.kernels import eval_K, eval_Kstar_b, kappa2, kstar, kstar_integral


def test_eval_K_center():
    assert eval_K(0.0) == 0.75


def test_eval_K_outside_support():
    assert eval_K(1.5) == 0.0
    assert eval_K(-1.5) == 0.0


def test_eval_K_integrates_to_one():
    # Simpson quadrature as an independent oracle
    x = np.linspace(-1.0, 1.0, 20001)
    val = integrate.simpson(eval_K(x), x=x)
    assert abs(val - 1.0) < 1e-10


@given(st.floats(-5, 5))
def test_eval_K_symmetric_nonnegative(x):
    assert eval_K(x) == eval_K(-x)
    assert eval_K(x) >= 0.0


def test_kstar_b_center():
    assert eval_Kstar_b(0.0, 0.3) == pytest.approx(0.75)


def test_kstar_b_edge():
    assert eval_Kstar_b(0.3, 0.3) == 0.0


def test_kstar_b_rejects_nonpositive_bandwidth():
    with pytest.raises(DomainError):
        eval_Kstar_b(0.1, 0.0)


@given(st.floats(-2, 2), st.floats(0.05, 1.0))
def test_kstar_b_symmetric(u, b):
    assert eval_Kstar_b(u, b) == eval_Kstar_b(-u, b)


def test_kstar_normalized_integral_is_one():
    assert kstar_integral() == pytest.approx(1.0, abs=1e-10)


def test_kappa2_at_zero():
    assert kappa2(0.0) == 1.0


def test_kappa2_rejects_out_of_domain():
    with pytest.raises(DomainError):
        kappa2(0.5)
    with pytest.raises(DomainError):
        kappa2(-0.1)


def _kappa2_trapezoid(d):
    """Independent trapezoid-with-refinement evaluation of the same integral."""
    from scipy.special import gamma

    def f(t):
        t = np.asarray(t)
        a = t**d - np.where(t > 1, np.maximum(t - 1, 0) ** d, 0.0)
        return a * (2 * t**d - np.where(t > 1, np.maximum(t - 1, 0) ** d, 0.0)
                    - (t + 1) ** d)

    total = 0.0
    edges = np.concatenate([[0], np.geomspace(1e-10, 1e8, 400)])
    for lo, hi in zip(edges[:-1], edges[1:]):
        x = np.linspace(lo, hi, 20001)
        total += np.trapezoid(f(x), x)
    return total / gamma(d + 1.0) ** 2


def test_kappa2_against_independent_quadrature():
    assert kappa2(0.25) == pytest.approx(_kappa2_trapezoid(0.25), abs=1e-6)


def test_kappa2_near_half_finite_positive():
    val = kappa2(0.49)
    assert np.isfinite(val) and val > 0.0


def test_kappa2_continuity_grid():
    for d in np.linspace(0.0, 0.45, 10):
        assert abs(kappa2(min(d + 1e-4, 0.4999)) - kappa2(d)) < 1e-2
