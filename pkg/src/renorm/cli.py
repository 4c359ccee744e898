"""Command-line front end: scans, flow tables, exact diagrams, verification.

Emits data tables only (CSV or JSON); plotting belongs to external
tools.  Exit codes: 0 success, 1 verification failure, 2 configuration
error, 3 numeric failure (quadrature or oscillation budget).
"""

from __future__ import annotations

import functools
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import characteristic as ch
from . import diagrams as dg
from . import partition as pt
from . import tables
from . import verify as verify_mod
from .config import ConfigError, RunConfig
from .quadrature import OscillationBudgetExceeded, QuadratureFailure
from .regulator import (
    DeformedSpectrum,
    NoConvergence,
    UnsupportedRegulatorTail,
    constant_part,
    regulator_to_dict,
)
from .spectrum import DivergentSum, spectrum_to_dict


class _ConfigFailure(click.ClickException):
    exit_code = 2


class _NumericFailure(click.ClickException):
    exit_code = 3


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as e:
            raise _ConfigFailure(str(e)) from e
        except (DivergentSum, UnsupportedRegulatorTail, ValueError) as e:
            raise _ConfigFailure(str(e)) from e
        except (QuadratureFailure, OscillationBudgetExceeded, NoConvergence) as e:
            raise _NumericFailure(str(e)) from e

    return wrapper


def _load(ctx: click.Context) -> RunConfig:
    opts = ctx.obj
    cfg = RunConfig.from_file(opts["config"]) if opts["config"] else RunConfig.from_dict({})
    if opts["out"] is not None:
        cfg = cfg.replace(out=opts["out"])
    if opts["fmt"] is not None:
        cfg = cfg.replace(fmt=opts["fmt"])
    if opts["seed"] is not None:
        cfg = cfg.replace(mc=pt.McConfig(samples=cfg.mc.samples, seed=opts["seed"]))
    return cfg


def _pmap(fn, items, threads: int):
    # output order follows the grid index regardless of completion order
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(v) for v in items]


def _emit(cfg: RunConfig, name: str, header: list[str], rows) -> Path:
    out = Path(cfg.out)
    if cfg.fmt == "json":
        path = out / f"{name}.json"
        tables.write_json(
            path, [{k: v for k, v in zip(header, row)} for row in rows]
        )
    else:
        path = out / f"{name}.csv"
        tables.write_csv(path, header, rows)
    return path


def _singular_description(cfg: RunConfig) -> str:
    p, c = cfg.spectrum.tail_p, cfg.spectrum.tail_c
    if p > 1.0:
        return "0 (reciprocal sum already converges)"
    reg = regulator_to_dict(cfg.regulator)
    if p == 1.0:
        return f"ln(L) / {c:.17g}"
    if reg["kind"] == "sharp_cutoff":
        a = reg["a"]
        return (
            f"((a^2 L / c)^(1/p))^(1-p) / (c (1-p)) with "
            f"a={a:.17g}; c={c:.17g}; p={p:.17g}"
        )
    return "unsupported profile/tail combination"


@click.group()
@click.option("--config", type=click.Path(), default=None, help="JSON run configuration.")
@click.option("--out", type=click.Path(), default=None, help="Output directory.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None,
              help="Table format (overrides config).")
@click.option("--seed", type=int, default=None, help="Seed for stochastic steps.")
@click.option("--threads", type=int, default=1, show_default=True,
              help="Worker threads for grid evaluations.")
@click.pass_context
def main(ctx, config, out, fmt, seed, threads):
    """Evaluate regularized Gaussian product functionals and their
    renormalized limits, and emit data tables."""
    ctx.obj = {"config": config, "out": out, "fmt": fmt, "seed": seed, "threads": threads}


@main.command()
@click.pass_context
@_guard
def spectrum(ctx):
    """Report the spectrum's minimum, class memberships, sums, and split."""
    cfg = _load(ctx)
    spec = cfg.spectrum
    click.echo(f"spectrum: {spectrum_to_dict(spec)}")
    click.echo(f"regulator: {regulator_to_dict(cfg.regulator)}")
    rows = [("mu", spec.min_value())]
    for k in range(1, 5):
        rows.append((f"B{k}", "yes" if spec.converges(k) else "no"))
    for k in range(2, 5):
        rows.append(
            (f"b{k}", spec.inverse_power_sum(k, cfg.tol) if spec.converges(k) else "divergent")
        )
    rows.append(("singular_part", _singular_description(cfg)))
    try:
        kap = constant_part(spec, cfg.regulator, tol=cfg.tol)
        rows.append(("kappa", kap))
    except UnsupportedRegulatorTail:
        rows.append(("kappa", "unavailable for this profile/tail"))
    for key, val in rows:
        click.echo(f"{key}: {tables.format_value(val)}")
    path = _emit(cfg, "spectrum_report", ["key", "value"], rows)
    click.echo(f"wrote {path}")


@main.command()
@click.pass_context
@_guard
def phi(ctx):
    """Scan the characteristic functional over the s-grid: finite
    sections, the flow at each cutoff, and the renormalized limit."""
    cfg = _load(ctx)
    threads = ctx.obj["threads"]
    spec, reg, theta = cfg.spectrum, cfg.regulator, cfg.theta
    kap = constant_part(spec, reg, tol=cfg.tol)
    s_values = cfg.s_grid.linear()
    n_values = cfg.n_grid.geometric_ints()
    lam_cuts = cfg.lambda_grid.geometric()

    def rows_for_s(s: float):
        out = []
        for n in n_values:
            mod, phase = ch.finite_polar(spec, s, n)
            val = ch.finite(spec, s, n)
            out.append(("finite", n, "", theta, s, val.real, val.imag, mod, phase))
        for lam_cut in lam_cuts:
            d = DeformedSpectrum(spec, reg, lam_cut)
            mod, phase = ch.flow_polar(d, s, theta)
            val = ch.flow(d, s, theta)
            out.append(("flow", "", lam_cut, theta, s, val.real, val.imag, mod, phase))
        mod, phase = ch.renormalized_polar(spec, kap, s, theta)
        val = ch.renormalized(spec, kap, s, theta)
        out.append(("renormalized", "", "", theta, s, val.real, val.imag, mod, phase))
        return out

    rows = [row for chunk in _pmap(rows_for_s, s_values, threads) for row in chunk]
    header = ["variant", "n", "Lambda", "theta", "s", "re", "im", "modulus", "phase"]
    path = _emit(cfg, "phi_scan", header, rows)
    click.echo(f"wrote {path}")


@main.command()
@click.pass_context
@_guard
def z(ctx):
    """Partition tables: decay of the finite sections with the certified
    bound, and the renormalized value over the theta-grid."""
    cfg = _load(ctx)
    threads = ctx.obj["threads"]
    spec, reg = cfg.spectrum, cfg.regulator
    kap = constant_part(spec, reg, tol=cfg.tol)
    n_values = cfg.n_grid.geometric_ints()

    def decay_row(n: int):
        return (n, pt.finite(spec, cfg.lam, n, cfg.quadrature),
                pt.finite_bound(spec, cfg.lam, n))

    decay = _pmap(decay_row, n_values, threads)
    path1 = _emit(cfg, "z_decay", ["n", "z_n", "bound"], decay)

    def theta_row(theta: float):
        return (theta, pt.renormalized(spec, kap, cfg.lam, theta, cfg.quadrature))

    profile = _pmap(theta_row, cfg.theta_grid.linear(), threads)
    path2 = _emit(cfg, "z_theta", ["theta", "z_renormalized"], profile)

    def mc_row(n: int):
        est, se = pt.mc_estimate(spec, cfg.lam, n, cfg.mc)
        return (n, est, se)

    mc_ns = [n for n in n_values if n <= 64] or [4]
    mc_rows = _pmap(mc_row, mc_ns, threads)
    path3 = _emit(cfg, "z_mc", ["n", "estimate", "std_error"], mc_rows)
    click.echo(f"wrote {path1}")
    click.echo(f"wrote {path2}")
    click.echo(f"wrote {path3}")


@main.command()
@click.pass_context
@_guard
def flow(ctx):
    """Cutoff-removal tables: distance of the flow to the renormalized
    limit, for both functionals, over the cutoff grid."""
    cfg = _load(ctx)
    threads = ctx.obj["threads"]
    spec, reg, theta, s = cfg.spectrum, cfg.regulator, cfg.theta, cfg.s
    kap = constant_part(spec, reg, tol=cfg.tol)
    phi_ref = ch.renormalized(spec, kap, s, theta)
    z_ref = pt.renormalized(spec, kap, cfg.lam, theta, cfg.quadrature)
    lam_cuts = cfg.lambda_grid.geometric()

    def phi_row(lam_cut: float):
        d = DeformedSpectrum(spec, reg, lam_cut)
        val = ch.flow(d, s, theta)
        return (lam_cut, s, theta, val.real, val.imag, abs(val - phi_ref))

    def z_row(lam_cut: float):
        d = DeformedSpectrum(spec, reg, lam_cut)
        val = pt.flow(d, cfg.lam, theta, cfg.quadrature)
        raw = pt.regularized(d, cfg.lam, cfg.quadrature)
        return (lam_cut, cfg.lam, theta, val, z_ref, abs(val - z_ref), raw)

    path1 = _emit(
        cfg, "flow_phi",
        ["Lambda", "s", "theta", "re", "im", "distance_to_limit"],
        _pmap(phi_row, lam_cuts, threads),
    )
    path2 = _emit(
        cfg, "flow_z",
        ["Lambda", "lambda", "theta", "z_flow", "z_renormalized", "abs_error", "z_regularized"],
        _pmap(z_row, lam_cuts, threads),
    )
    click.echo(f"wrote {path1}")
    click.echo(f"wrote {path2}")


@main.command()
@click.option("--order", type=int, default=None,
              help="Highest series/moment order (defaults to the config).")
@click.pass_context
@_guard
def diagrams(ctx, order):
    """Exact moment polynomials, series coefficient tables, and the
    shift-identity verdicts."""
    cfg = _load(ctx)
    order = cfg.order if order is None else order
    if not 0 <= order <= 20:
        raise ConfigError("order must lie in [0, 20]")
    spec, reg, theta = cfg.spectrum, cfg.regulator, cfg.theta

    moments = [
        {
            "k": k,
            "moment": dg.wick_moment(k).to_json_obj(),
            "tadpole_free": dg.tadpole_free_moment(k).to_json_obj(),
        }
        for k in range(order + 1)
    ]
    out = Path(cfg.out)
    tables.write_json(out / "moments.json", moments)
    click.echo(f"wrote {out / 'moments.json'}")

    verdicts = [(n, dg.renorm_identity_holds(n)) for n in range(min(order, 12) + 1)]
    path = _emit(cfg, "renorm_identity", ["order", "verdict"], verdicts)
    click.echo(f"wrote {path}")

    kap = constant_part(spec, reg, tol=cfg.tol)
    shift_value = (kap - theta) / 2.0
    loop_values = [
        spec.inverse_power_sum(m, cfg.tol) if spec.converges(m) else dg.INFINITE
        for m in range(1, 2 * order + 1)
    ]
    for kind in dg.SERIES_KINDS:
        try:
            coeffs = dg.series_coefficients(kind, order, loop_values, shift_value)
            rows = list(enumerate(coeffs))
        except dg.InfiniteCoefficient:
            rows = [(0, 1.0)] + [(j, "infinite") for j in range(1, order + 1)]
        path = _emit(cfg, f"series_{kind}", ["order", "coefficient"], rows)
        click.echo(f"wrote {path}")

    if not all(v for _, v in verdicts):
        raise click.ClickException("renormalization identity failed")


@main.command()
@click.option("--list", "list_only", is_flag=True, help="List criteria without running.")
@click.pass_context
@_guard
def verify(ctx, list_only):
    """Run the acceptance suite; exit 0 only if every criterion passes."""
    if list_only:
        for name in verify_mod.criterion_names():
            click.echo(name)
        return
    cfg = _load(ctx)
    seed = ctx.obj["seed"] if ctx.obj["seed"] is not None else verify_mod.DEFAULT_SEED
    all_passed, report = verify_mod.run_suite(seed=seed)
    click.echo(report)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "verify_report.txt"
    report_path.write_text(report + "\n", encoding="utf-8", newline="\n")
    click.echo(f"wrote {report_path}")
    if not all_passed:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
