"""Command line interface: test, simulate, mc, tune."""

import csv
import functools
import json
import sys

import click
import numpy as np

from .bootstrap import TestConfig, run_test
from .errors import ConfigError, DataError, DomainError, LrdTestError, SingularDesignError
from .montecarlo import power_experiment, size_experiment, write_json, write_tsv
from .simulate import RegressionSample, SimulationSpec, simulate_model
from .stats import TEST_NAMES
from .tuning import select_bandwidths

SCHEMA_TEST = "test-report-v1"

EXIT_IO = 2
EXIT_NUMERIC = 3
EXIT_CONFIG = 4


def _exit_code(exc):
    if isinstance(exc, (DataError, OSError)):
        return EXIT_IO
    if isinstance(exc, (SingularDesignError, ArithmeticError, FloatingPointError)):
        return EXIT_NUMERIC
    if isinstance(exc, (ConfigError, DomainError)):
        return EXIT_CONFIG
    return 1


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (LrdTestError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(_exit_code(exc))

    return wrapper


def ingest_csv(path) -> RegressionSample:
    """Read a headered CSV: first column y, the rest covariates.

    An intercept column is always prepended; users never supply one.
    """
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            rows = [row for row in reader if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}")
    if len(rows) < 2:
        raise DataError(f"{path}: no data rows")
    header, body = rows[0], rows[1:]
    if len(body) < 8:
        raise DataError(f"{path}: need at least 8 data rows, got {len(body)}")
    width = len(header)
    data = np.empty((len(body), width))
    for i, row in enumerate(body):
        if len(row) != width:
            raise DataError(f"{path}: row {i + 2} has {len(row)} fields, "
                            f"expected {width}", row=i + 2)
        for j, cell in enumerate(row):
            try:
                val = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric value {cell!r} at row {i + 2}, "
                    f"column {header[j]!r}", row=i + 2, column=header[j])
            if not np.isfinite(val):
                raise DataError(
                    f"{path}: non-finite value at row {i + 2}, "
                    f"column {header[j]!r}", row=i + 2, column=header[j])
            data[i, j] = val
    n = data.shape[0]
    y = data[:, 0]
    X = np.column_stack([np.ones(n), data[:, 1:]])
    t = np.arange(1, n + 1) / n
    return RegressionSample(y=y, X=X, t=t)


def _parse_override(value, cast):
    if value is None or str(value).lower() == "auto":
        return None
    return cast(value)


@click.group()
@click.option("--threads", type=int, default=1, envvar="LRDTEST_THREADS",
              help="Worker cap for parallel sections.")
@click.pass_context
def main(ctx, threads):
    """Bootstrap tests for long memory in time-varying regression."""
    ctx.ensure_object(dict)
    ctx.obj["threads"] = threads


@main.command("test")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--model", "model_kind", type=click.Choice(["trend", "covariate"]),
              default="trend", show_default=True)
@click.option("--tests", default=",".join(TEST_NAMES), show_default=True,
              help="Comma-separated subset of kpss,rs,vs,ks.")
@click.option("--boot-reps", "-B", "B", type=int, default=2000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--b", default="auto", help="Regression bandwidth or 'auto'.")
@click.option("--m", default="auto", help="Differencing window or 'auto'.")
@click.option("--tau", default="auto", help="Difference smoothing bandwidth or 'auto'.")
@click.option("--eta", default="auto", help="Moment bandwidth or 'auto'.")
@click.option("--output", "output_path", type=click.Path(), default=None,
              help="Write the JSON report here.")
@_handle_errors
def cmd_test(input_path, model_kind, tests, B, seed, alpha, b, m, tau, eta,
             output_path):
    """Run the long-memory tests on a CSV series."""
    names = tuple(s.strip() for s in tests.split(",") if s.strip())
    if not names:
        raise ConfigError("empty tests selection")
    sample = ingest_csv(input_path)
    config = TestConfig(
        b=_parse_override(b, float),
        m=_parse_override(m, int),
        tau=_parse_override(tau, float),
        eta=_parse_override(eta, float),
        B=B,
        seed=seed,
        alpha=alpha,
    )
    reports = run_test(sample, model_kind, tests=names, config=config)
    click.echo(f"seed: {seed}")
    payload = {"schema": SCHEMA_TEST, "model": model_kind, "seed": seed,
               "alpha": alpha, "tests": {}}
    for rep in reports:
        payload["tests"][rep.test] = {
            "statistic": rep.statistic,
            "p_value": rep.p_value,
            "B": rep.params["B"],
            "selected": {k: rep.params[k] for k in ("b", "m", "tau", "eta")},
        }
        verdict = "reject" if rep.p_value <= alpha else "no rejection"
        click.echo(f"{rep.test}: statistic={rep.statistic:.6g} "
                   f"p={rep.p_value:.4f} -> {verdict} at alpha={alpha:g}")
    if output_path:
        with open(output_path, "w") as fh:
            json.dump(payload, fh, indent=2)
        click.echo(f"report written to {output_path}")


@main.command("simulate")
@click.option("--model", type=click.Choice(["M0", "M1", "M2"]), default="M1",
              show_default=True)
@click.option("--n", type=int, required=True)
@click.option("--d", type=float, default=0.0, show_default=True)
@click.option("--time-varying-d", is_flag=True,
              help="Use the oscillating memory parameter 0.35 + 0.1 cos(2 pi t).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "output_path", type=click.Path(), required=True)
@_handle_errors
def cmd_simulate(model, n, d, time_varying_d, seed, output_path):
    """Simulate one sample and write it in the ingest CSV format."""
    dval = (lambda t: 0.35 + 0.1 * np.cos(2 * np.pi * t)) if time_varying_d else d
    sample = simulate_model(SimulationSpec(n=n, model=model, d=dval, seed=seed))
    with open(output_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["y"] + [f"x{j}" for j in range(1, sample.p)])
        for i in range(sample.n):
            writer.writerow([f"{v:.15g}" for v in
                             np.concatenate([[sample.y[i]], sample.X[i, 1:]])])
    click.echo(f"seed: {seed}")
    click.echo(f"wrote {sample.n} rows to {output_path}")


@main.command("mc")
@click.option("--model", type=click.Choice(["M0", "M1", "M2"]), default="M1",
              show_default=True)
@click.option("--model-kind", type=click.Choice(["trend", "covariate"]),
              default="covariate", show_default=True)
@click.option("--n", type=int, default=500, show_default=True)
@click.option("--reps", "-R", type=int, default=300, show_default=True)
@click.option("--boot-reps", "-B", "B", type=int, default=500, show_default=True)
@click.option("--d", type=float, default=0.0, show_default=True)
@click.option("--n-grid", default=None, help="Comma-separated n values (power curve).")
@click.option("--d-grid", default=None, help="Comma-separated d values (power curve).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "prefix", type=click.Path(), required=True,
              help="Output prefix; writes <prefix>.tsv, .json and .png.")
@click.pass_context
@_handle_errors
def cmd_mc(ctx, model, model_kind, n, reps, B, d, n_grid, d_grid, seed, prefix):
    """Monte Carlo rejection rates, with plot-ready and rendered output."""
    from .plots import render_rates

    workers = ctx.obj.get("threads", 1) if ctx.obj else 1
    if d_grid is not None:
        grid = [float(v) for v in d_grid.split(",")]
        reports = power_experiment(model, n, None, reps, B, seed,
                                   model_kind=model_kind, d_grid=grid,
                                   workers=workers)
        xlabel = "d"
    elif n_grid is not None:
        grid = [int(v) for v in n_grid.split(",")]
        reports = power_experiment(model, grid, d, reps, B, seed,
                                   model_kind=model_kind, workers=workers)
        xlabel = "n"
    elif d > 0:
        reports = power_experiment(model, [n], d, reps, B, seed,
                                   model_kind=model_kind, workers=workers)
        xlabel = "n"
    else:
        reports = [size_experiment(model, n, reps, B, seed,
                                   model_kind=model_kind, workers=workers)]
        xlabel = "n"
    click.echo(f"seed: {seed}")
    write_tsv(reports, f"{prefix}.tsv")
    write_json(reports, f"{prefix}.json")
    fig = render_rates(reports, f"{prefix}.png", xlabel=xlabel,
                       title=f"{model} ({model_kind} model)")
    click.echo(f"wrote {prefix}.tsv, {prefix}.json and {fig}")


@main.command("tune")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--model", "model_kind", type=click.Choice(["trend", "covariate"]),
              default="trend", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_handle_errors
def cmd_tune(input_path, model_kind, seed):
    """Print the automatically selected smoothing parameters as JSON."""
    sample = ingest_csv(input_path)
    sel = select_bandwidths(sample, model_kind=model_kind, seed=seed)
    payload = {"schema": "tune-report-v1", "seed": seed, "model": model_kind,
               "selected": {
                   name: {"b": s.b_n, "m": s.m, "tau": s.tau_n, "eta": s.eta_n}
                   for name, s in sel.items()
               }}
    click.echo(json.dumps(payload, indent=2))


if __name__ == "__main__":
    main()
