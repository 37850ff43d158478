import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from lrdtest.errors import ConfigError
from lrdtest.stats import (
    compute_statistics,
    kpss_stat,
    ks_stat,
    rs_stat,
    trim_bounds,
    vs_stat,
)


def oracle_stats(residuals, b):
    """Double-loop re-summation oracle for all four statistics."""
    n = len(residuals)
    q = int(np.floor(n * b))
    l, u = q + 1, n - q
    S = {}
    for r in range(l, u + 1):
        S[r] = sum(residuals[i - 1] for i in range(l, r + 1))
    vals = list(S.values())
    k = u - l + 1
    return {
        "kpss": sum(v * v for v in vals) / (n * k),
        "rs": max(vals) - min(vals),
        "vs": (sum(v * v for v in vals) - sum(vals) ** 2 / k) / (n * k),
        "ks": max(abs(v) for v in vals),
    }


def test_zero_residuals():
    r = np.zeros(80)
    out = compute_statistics(r, 0.1)
    assert all(v == 0.0 for v in out.values())


def test_single_unit_residual_untrimmed():
    n = 50
    r = np.zeros(n)
    r[0] = 1.0
    # b small enough that nothing is trimmed
    assert kpss_stat(r, 0.001) == pytest.approx(1.0 / n)


def test_alternating_residuals_rs():
    n = 40
    r = np.array([1.0, -1.0] * (n // 2))
    assert rs_stat(r, 0.001) == pytest.approx(1.0)


def test_single_negative_residual_ks():
    r = np.zeros(30)
    r[0] = -2.0
    assert ks_stat(r, 0.001) == pytest.approx(2.0)


def test_against_double_loop_oracle(rng):
    r = rng.standard_normal(50)
    out = compute_statistics(r, 0.12)
    oracle = oracle_stats(r, 0.12)
    for key in out:
        assert out[key] == pytest.approx(oracle[key], rel=1e-12)


def test_empty_trimmed_range_rejected():
    with pytest.raises(ConfigError):
        compute_statistics(np.ones(11), 0.49)


def test_trim_bounds():
    l, u = trim_bounds(100, 0.15)
    assert (l, u) == (16, 85)
    assert u - l + 1 == 100 - 2 * 15


@given(hnp.arrays(np.float64, st.integers(20, 80),
                  elements=st.floats(-50, 50)),
       st.floats(0.01, 0.2))
@settings(max_examples=60)
def test_invariants(r, b):
    out = compute_statistics(r, b)
    # variance <= second moment
    assert out["vs"] <= out["kpss"] + 1e-12
    # range vs sup relations
    assert out["rs"] <= 2 * out["ks"] + 1e-12
    # the reverse bound needs the path to cross zero
    path = np.cumsum(r[trim_bounds(len(r), b)[0] - 1 : trim_bounds(len(r), b)[1]])
    if path.max() >= 0 >= path.min():
        assert out["ks"] <= out["rs"] + 1e-12
    # scale equivariance
    scaled = compute_statistics(3.0 * r, b)
    assert scaled["kpss"] == pytest.approx(9.0 * out["kpss"], rel=1e-9, abs=1e-12)
    assert scaled["vs"] == pytest.approx(9.0 * out["vs"], rel=1e-9, abs=1e-12)
    assert scaled["rs"] == pytest.approx(3.0 * out["rs"], rel=1e-9, abs=1e-12)
    assert scaled["ks"] == pytest.approx(3.0 * out["ks"], rel=1e-9, abs=1e-12)
    # sign flip leaves all four unchanged
    flipped = compute_statistics(-r, b)
    for key in out:
        assert flipped[key] == pytest.approx(out[key], rel=1e-9, abs=1e-12)


def test_vs_zero_for_constant_path():
    # residual (c, 0, 0, ...) makes every S_k equal to c
    r = np.zeros(40)
    r[0] = 2.5
    assert vs_stat(r, 0.001) == pytest.approx(0.0, abs=1e-14)
