import numpy as np
import pytest

from lrdtest.errors import ConfigError
from lrdtest.simulate import RegressionSample, SimulationSpec, simulate_model
from lrdtest.tuning import (
    BandwidthSet,
    default_mv_grids,
    eta_select,
    gcv_objective,
    gcv_select_b,
    mv_select,
    mv_select_all,
    pilot_parameters,
    select_bandwidths,
)


def make_sample(y, X=None):
    n = len(y)
    if X is None:
        X = np.ones((n, 1))
    return RegressionSample(y=np.asarray(y, float), X=X,
                            t=np.arange(1, n + 1) / n)


class TestBandwidthSet:
    def test_valid_passes(self):
        s = BandwidthSet(b_n=0.15, m=5, tau_n=0.3, eta_n=0.15)
        assert s.validate(500) is s

    def test_rejections(self):
        with pytest.raises(ConfigError):
            BandwidthSet(b_n=0.6, m=5, tau_n=0.3, eta_n=0.15).validate(500)
        with pytest.raises(ConfigError):
            BandwidthSet(b_n=0.15, m=1, tau_n=0.3, eta_n=0.15).validate(500)
        with pytest.raises(ConfigError):
            BandwidthSet(b_n=0.15, m=200, tau_n=0.3, eta_n=0.15).validate(500)
        with pytest.raises(ConfigError):
            # tau + (m+1)/n crosses one half
            BandwidthSet(b_n=0.15, m=5, tau_n=0.49, eta_n=0.15).validate(500)
        with pytest.raises(ConfigError):
            BandwidthSet(b_n=0.49, m=5, tau_n=0.3, eta_n=0.15).validate(20)
        with pytest.raises(ConfigError):
            BandwidthSet(b_n=0.15, m=5, tau_n=0.3, eta_n=0.9).validate(500)


class TestPilotParameters:
    def test_values(self):
        b, m, tau = pilot_parameters(500)
        assert b == pytest.approx(500.0 ** -0.2)
        assert m == int(np.floor(500.0 ** (2.0 / 7.0)))
        assert tau == pytest.approx(500.0 ** (-1.0 / 6.0))


class TestGcvSelectB:
    def test_noiseless_linear_trend_picks_largest(self):
        # an exactly linear trend has zero smoothing bias at every
        # bandwidth, so the objective decreases in b and the top of the
        # search range wins
        n = 400
        t = np.arange(1, n + 1) / n
        s = make_sample(1.0 + 2.0 * t)
        b = gcv_select_b(s)
        assert b > 0.4

    def test_monotone_noiseless_case_returns_upper_bound(self):
        n = 300
        t = np.arange(1, n + 1) / n
        rng = np.random.default_rng(0)
        y = 1.0 + 2.0 * t + 0.05 * rng.standard_normal(n)
        s = make_sample(y)
        b = gcv_select_b(s)
        # linear signal has no curvature bias, so GCV favors the top of
        # the plug-in range; verify no smaller grid point scores better
        objective = lambda x: gcv_objective(s, x)
        assert objective(b) <= objective(0.8 * b) + 1e-12

    def test_constant_sample_falls_back_with_warning(self):
        s = make_sample(np.full(200, 3.0))
        with pytest.warns(RuntimeWarning):
            b = gcv_select_b(s)
        assert b == pytest.approx(200.0 ** -0.2)

    def test_range_inside_unit_interval(self):
        for seed in range(3):
            s = simulate_model(SimulationSpec(n=300, model="M1", d=0.0,
                                              seed=seed))
            b = gcv_select_b(s)
            assert 0.0 < b < 0.5

    def test_scale_of_selected_bandwidth(self):
        # paper-scale regression problems select b around 0.1 at n=500
        vals = [
            gcv_select_b(simulate_model(SimulationSpec(n=500, model="M1",
                                                       d=0.0, seed=s)))
            for s in range(5)
        ]
        assert 0.05 < np.mean(vals) < 0.25


class TestDefaultMvGrids:
    def test_shapes_and_ranges(self):
        m_grid, tau_grid = default_mv_grids(500)
        base = 500.0 ** (2.0 / 7.0)
        assert m_grid[0] == int(np.floor(5.0 / 7.0 * base))
        assert m_grid[-1] == int(np.floor(2.0 * base))
        assert len(tau_grid) == 3
        assert tau_grid[1] == pytest.approx(500.0 ** (-1.0 / 6.0))

    def test_small_n_kept_feasible(self):
        m_grid, tau_grid = default_mv_grids(40)
        assert m_grid[0] >= 2
        assert m_grid[-1] <= 10


class TestMvSelect:
    def test_constant_cells_tie_to_lexicographic_minimum(self, small_sample):
        fixed = {name: np.arange(20.0) for name in ("kpss", "rs", "vs", "ks")}
        sel = mv_select_all(
            small_sample, 0.2, m_grid=[3, 4, 5], tau_grid=[0.2, 0.3, 0.4],
            cell_fn=lambda m, tau: fixed,
        )
        for name in sel:
            assert sel[name] == (3, 0.2)

    def test_picks_flattest_neighborhood(self, small_sample):
        # variance surface flat around (4, 0.3), steep elsewhere
        def cell(m, tau):
            if m == 4 or tau == 0.3:
                spread = 1.0
            else:
                spread = 10.0 * m * tau
            vals = np.linspace(0.0, spread, 30)
            return {name: vals for name in ("kpss", "rs", "vs", "ks")}

        got = mv_select(small_sample, 0.2, m_grid=[3, 4, 5],
                        tau_grid=[0.2, 0.3, 0.4], cell_fn=cell)
        assert got == (4, 0.3)

    def test_empty_grid_rejected(self, small_sample):
        with pytest.raises(ConfigError):
            mv_select(small_sample, 0.2, m_grid=[], tau_grid=[0.3])

    def test_deterministic_given_seed(self):
        s = simulate_model(SimulationSpec(n=120, model="M0", d=0.0, seed=2))
        a = mv_select(s, 0.2, m_grid=[3, 4, 5], tau_grid=[0.25, 0.3, 0.35],
                      seed=7, model_kind="covariate", B=30)
        b = mv_select(s, 0.2, m_grid=[3, 4, 5], tau_grid=[0.25, 0.3, 0.35],
                      seed=7, model_kind="covariate", B=30)
        assert a == b

    def test_selection_lies_on_grid(self):
        s = simulate_model(SimulationSpec(n=150, model="M1", d=0.0, seed=3))
        m_grid, tau_grid = [3, 5, 7], [0.2, 0.3]
        m, tau = mv_select(s, 0.18, m_grid=m_grid, tau_grid=tau_grid,
                           model_kind="covariate", B=20)
        assert m in m_grid and tau in tau_grid


class TestEtaSelect:
    def test_rule_of_thumb(self, small_sample):
        assert eta_select(small_sample, 0.17) == 0.17
        assert eta_select(small_sample, 0.17, eta_grid=[]) == 0.17

    def test_constant_moments_tie_to_first(self, monkeypatch):
        import lrdtest.tuning as tuning_mod

        n = 200
        s = make_sample(np.zeros(n),
                        X=np.column_stack([np.ones(n), np.ones(n)]))
        monkeypatch.setattr(tuning_mod, "m_hat_grid",
                            lambda X, t, e: np.ones((n, 2, 2)))
        got = eta_select(s, 0.2, eta_grid=[0.1, 0.15, 0.2, 0.25])
        assert got == 0.1

    def test_grid_member_returned(self):
        s = simulate_model(SimulationSpec(n=500, model="M0", d=0.0, seed=1))
        grid = [0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2]
        got = eta_select(s, 0.14, eta_grid=grid)
        assert got in grid


class TestSelectBandwidths:
    def test_full_selection_validates(self):
        s = simulate_model(SimulationSpec(n=200, model="M1", d=0.0, seed=5))
        out = select_bandwidths(s, model_kind="covariate", B_mv=20)
        assert set(out) == {"kpss", "rs", "vs", "ks"}
        for bs in out.values():
            assert bs.validate(200)
            assert bs.eta_n == bs.b_n

    def test_trend_kind_drops_covariates(self):
        s = simulate_model(SimulationSpec(n=200, model="M1", d=0.0, seed=5))
        out = select_bandwidths(s, model_kind="trend", B_mv=20)
        ref = select_bandwidths(s.trend_only(), model_kind="trend", B_mv=20)
        for name in out:
            assert out[name].b_n == ref[name].b_n
            assert out[name].m == ref[name].m
