"""Monte Carlo size and power experiments for the bootstrap tests.

Replications are seeded independently from the master seed so any single
replication can be reproduced in isolation; failed replications are
excluded from the rates and reported.
"""

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .bootstrap import TestConfig, rejects, run_test
from .errors import ConfigError, LrdTestError
from .simulate import SimulationSpec, simulate_model
from .stats import TEST_NAMES

LEVELS = (0.05, 0.10)
MAX_FAILURE_FRACTION = 0.01


@dataclass
class MonteCarloReport:
    """Rejection rates of all four tests at both levels for one setting."""

    model: str
    n: int
    d: float
    R: int
    B: int
    seed: int
    rates: dict
    half_widths: dict
    failures: int
    wall_time: float
    x: float = field(default=None)

    def __post_init__(self):
        if self.x is None:
            self.x = float(self.d)


def _one_replication(model, n, d, B, master_seed, rep, model_kind, config_kwargs):
    spec = SimulationSpec(n=n, model=model, d=d, seed=[master_seed, rep])
    sample = simulate_model(spec)
    config = TestConfig(B=B, seed=int(np.random.default_rng(
        [master_seed, rep, 1]).integers(2**31)), **config_kwargs)
    reports = run_test(sample, model_kind, tests=TEST_NAMES, config=config)
    out = {}
    for rep_obj in reports:
        for level in LEVELS:
            out[(rep_obj.test, level)] = rejects(rep_obj.statistic, rep_obj.boot, level)
    return out


def _try_replication(model, n, d, B, seed, rep, model_kind, config_kwargs):
    try:
        return _one_replication(model, n, d, B, seed, rep, model_kind,
                                config_kwargs)
    except LrdTestError:
        return None


def _experiment(model, n, d, R, B, seed, model_kind, x=None, workers=1,
                **config_kwargs):
    if R < 1:
        raise ConfigError("number of replications must be positive")
    start = time.time()
    counts = {(t, a): 0 for t in TEST_NAMES for a in LEVELS}
    failures = 0
    done = 0
    if workers != 1:
        from joblib import Parallel, delayed

        all_decisions = Parallel(n_jobs=workers)(
            delayed(_try_replication)(
                model, n, d, B, seed, rep, model_kind, config_kwargs
            )
            for rep in range(R)
        )
    else:
        all_decisions = (
            _try_replication(model, n, d, B, seed, rep, model_kind,
                             config_kwargs)
            for rep in range(R)
        )
    for rep, decisions in enumerate(all_decisions):
        if decisions is None:
            failures += 1
            if failures > max(1, MAX_FAILURE_FRACTION * R):
                raise RuntimeError(
                    f"{failures} of {rep + 1} replications failed; aborting"
                )
            continue
        done += 1
        for key, rejected in decisions.items():
            counts[key] += int(rejected)
    if done == 0:
        raise RuntimeError("all replications failed")
    rates = {key: counts[key] / done for key in counts}
    half_widths = {
        (t, a): 3.0 * np.sqrt(a * (1.0 - a) / done) for t in TEST_NAMES for a in LEVELS
    }
    return MonteCarloReport(
        model=model, n=n, d=float(d) if not callable(d) else float("nan"),
        R=done, B=B, seed=seed, rates=rates, half_widths=half_widths,
        failures=failures, wall_time=time.time() - start, x=x,
    )


def size_experiment(model, n, R, B=2000, seed=0, model_kind="covariate",
                    workers=1, **config_kwargs) -> MonteCarloReport:
    """Type I error rates under the short-memory null."""
    if R < 50:
        raise ConfigError("size experiments need R >= 50")
    return _experiment(model, n, 0.0, R, B, seed, model_kind, x=float(n),
                       workers=workers, **config_kwargs)


def power_experiment(model, n_grid, d, R, B=2000, seed=0, model_kind="covariate",
                     d_grid=None, workers=1, **config_kwargs):
    """Rejection rates under long memory, over a grid of n or of d."""
    reports = []
    if d_grid is not None:
        n = int(np.atleast_1d(n_grid)[0])
        for k, dval in enumerate(d_grid):
            reports.append(
                _experiment(model, n, dval, R, B, seed + k, model_kind,
                            x=float(dval), workers=workers, **config_kwargs)
            )
    else:
        for k, n in enumerate(np.atleast_1d(n_grid)):
            reports.append(
                _experiment(model, int(n), d, R, B, seed + k, model_kind,
                            x=float(n), workers=workers, **config_kwargs)
            )
    return reports


def tidy_rows(reports):
    """One (test, level, x, rate, half_width) row per rate, plot-ready."""
    rows = []
    for rep in np.atleast_1d(reports):
        for t in TEST_NAMES:
            for a in LEVELS:
                rows.append({
                    "test": t,
                    "level": a,
                    "x": rep.x,
                    "rate": rep.rates[(t, a)],
                    "half_width": rep.half_widths[(t, a)],
                })
    return rows


def write_tsv(reports, path):
    rows = tidy_rows(reports)
    with open(path, "w") as fh:
        fh.write("test\tlevel\tx\trate\thalf_width\n")
        for r in rows:
            fh.write(
                f"{r['test']}\t{r['level']:g}\t{r['x']:g}\t"
                f"{r['rate']:.6f}\t{r['half_width']:.6f}\n"
            )


def write_json(reports, path):
    payload = {
        "schema": "mc-report-v1",
        "reports": [
            {
                "model": rep.model,
                "n": rep.n,
                "d": rep.d,
                "R": rep.R,
                "B": rep.B,
                "seed": rep.seed,
                "x": rep.x,
                "failures": rep.failures,
                "wall_time": rep.wall_time,
                "rates": {f"{t}@{a:g}": rep.rates[(t, a)]
                          for t in TEST_NAMES for a in LEVELS},
                "half_widths": {f"{t}@{a:g}": rep.half_widths[(t, a)]
                                for t in TEST_NAMES for a in LEVELS},
            }
            for rep in np.atleast_1d(reports)
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
