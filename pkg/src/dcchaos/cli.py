"""``dcchaos`` command line: reproduction suite, traces and single experiments.

Exit codes: 0 success, 1 a criterion failed, 2 configuration error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import acceptance
from .acceptance import ConfigError, RunConfig
from .classifier import classify
from .distribution import estimate_df
from .export import atomic_write, export_trace
from .iteration import CLAUSES, default_modulus, sample_points, lemma1_verify, theorem2_check
from .numerics import LadderPoint, as_rational, distance_series, fixed, moving
from .oscillators import PRESETS, OscillatorSystem
from .ramsey import corollary_harness
from .shifts import ShiftSystem, coded_shift_set, make_dc_pair

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _parse_grid(text):
    if not text:
        return None
    try:
        return tuple(as_rational(t) for t in text.split(",") if t.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad --delta-grid {text!r}: {exc}") from None


def _parse_point(text: str) -> LadderPoint:
    """``coord`` (moving at level 1), ``coord@k`` (moving at level k) or ``coord@fixed``."""
    coord, _, level = text.partition("@")
    if not level:
        return moving(coord)
    if level == "fixed":
        return fixed(coord)
    return moving(coord, int(level))


def _config(preset, m_max, tau, delta_grid, out, seed) -> RunConfig:
    try:
        tau = as_rational(tau)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad --tau {tau!r}") from None
    return RunConfig(preset=preset, m_max=m_max, tau=tau, delta_grid=_parse_grid(delta_grid),
                     out=out, seed=seed).validate()


def common(fn):
    opts = [
        click.option("--preset", type=click.Choice(PRESETS), default="dominant", show_default=True),
        click.option("--m-max", type=int, default=6, show_default=True, help="epochs to simulate"),
        click.option("--tau", default="1/20", show_default=True, help="classification tolerance"),
        click.option("--delta-grid", default=None, help="comma separated rationals, e.g. 1/2,1,3/2"),
        click.option("--out", type=click.Path(file_okay=False), default="out", show_default=True),
        click.option("--seed", type=int, default=0, show_default=True),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _run(body):
    try:
        code = body()
    except ConfigError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    sys.exit(code or EXIT_OK)


@click.group()
def main():
    """Distributional chaos experiments on oscillator and shift systems."""


@main.command()
@common
@click.option("--only", default=None, help="comma separated criterion ids")
def reproduce(preset, m_max, tau, delta_grid, out, seed, only):
    """Run the acceptance suite and write report.json."""

    def body():
        cfg = _config(preset, m_max, tau, delta_grid, out, seed)
        ids = [int(i) for i in only.split(",")] if only else None
        results = acceptance.run_suite(cfg, ids)
        for r in results:
            click.echo(r.line())
        path = acceptance.write_report(results, cfg, out)
        click.echo(f"report: {path}")
        return EXIT_OK if acceptance.all_pass(results) else EXIT_FAIL

    _run(body)


SYSTEMS = ("O1", "O2", "G", "H")


@main.command()
@common
@click.option("--system", "system_id", type=click.Choice(SYSTEMS), default="H", show_default=True)
@click.option("--horizon", type=int, default=None, help="steps (default s_{m_max+1})")
@click.option("--point", "points", multiple=True, help="label=coord[@k|@fixed]; default x, y, z")
def trace(preset, m_max, tau, delta_grid, out, seed, system_id, horizon, points):
    """Export orbit traces as CSV (k,label,coord,second_coord)."""

    def body():
        cfg = _config(preset, m_max, tau, delta_grid, out, seed)
        system = OscillatorSystem(system_id, cfg.schedule)
        if points:
            pts = dict(_label_point(p) for p in points)
        else:
            pts = {k: v for k, v in sample_points().items() if system.contains(v)}
        h = cfg.horizon if horizon is None else horizon
        try:
            for p in pts.values():
                system.check_point(p)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        path = export_trace(system, pts, h, Path(out) / f"trace_{system_id}.csv")
        click.echo(f"trace: {path}")

    _run(body)


def _label_point(text: str) -> tuple:
    label, _, spec = text.partition("=")
    if not spec:
        raise ConfigError(f"--point needs label=coord, got {text!r}")
    try:
        return label, _parse_point(spec)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad point {text!r}: {exc}") from None


def _pair_series(cfg: RunConfig, pair: str, horizon=None):
    """Named pairs: O1:<z>, G, H-xy, H-xz, H-yz, DC1, DC2.5-strict."""
    pts = sample_points()
    if pair in ("DC1", "DC2.5-strict"):
        p = make_dc_pair(pair)
        system = ShiftSystem()
        return system, distance_series(system, p.u, p.v, horizon or 10**6)
    if pair.startswith("O1:"):
        system = OscillatorSystem("O1", cfg.schedule)
        return system, distance_series(system, pts["x"], fixed(pair[3:]), horizon or cfg.horizon)
    if pair == "G":
        system = OscillatorSystem("G", cfg.schedule)
        return system, distance_series(system, pts["x"], pts["y"], horizon or cfg.horizon)
    if pair.startswith("H-") and len(pair) == 4 and set(pair[2:]) <= set(pts):
        system = OscillatorSystem("H", cfg.schedule)
        return system, distance_series(system, pts[pair[2]], pts[pair[3]], horizon or cfg.horizon)
    raise ConfigError(f"unknown pair {pair!r}")


pair_option = click.option("--pair", default="G", show_default=True,
                           help="O1:<z>, G, H-xy, H-xz, H-yz, DC1 or DC2.5-strict")


@main.command()
@common
@pair_option
def df(preset, m_max, tau, delta_grid, out, seed, pair):
    """Estimate lower/upper distribution functions and write df.csv."""

    def body():
        cfg = _config(preset, m_max, tau, delta_grid, out, seed)
        system, series = _pair_series(cfg, pair)
        checkpoints = cfg.schedule.checkpoints(len(series)) if isinstance(system, OscillatorSystem) else ()
        est = estimate_df(series, cfg.grid(system.diam), checkpoints=checkpoints)
        path = atomic_write(Path(out) / "df.csv", est.to_csv())
        click.echo(f"df: {path}")

    _run(body)


@main.command(name="classify")
@common
@pair_option
def classify_cmd(preset, m_max, tau, delta_grid, out, seed, pair):
    """Classify a pair and write verdict.json."""

    def body():
        cfg = _config(preset, m_max, tau, delta_grid, out, seed)
        system, series = _pair_series(cfg, pair)
        verdict = classify(estimate_df(series, cfg.grid(system.diam)), cfg.tau)
        path = atomic_write(Path(out) / "verdict.json", verdict.to_json() + "\n")
        click.echo(verdict.to_json())
        click.echo(f"verdict: {path}")

    _run(body)


@main.command()
@common
@pair_option
@click.option("--n", "N", type=int, default=2, show_default=True)
@click.option("--s", "s", default="1/4", show_default=True)
@click.option("--t", "t", default=None, help="defaults to the system's modulus")
@click.option("--clause", type=click.Choice(CLAUSES), default=None, help="default: all four")
@click.option("--horizon", type=int, default=10**5, show_default=True)
def lemma1(preset, m_max, tau, delta_grid, out, seed, pair, N, s, t, clause, horizon):
    """Check the counting inequalities and write lemma1.json."""

    def body():
        cfg = _config(preset, m_max, tau, delta_grid, out, seed)
        system, series = _pair_series(cfg, pair, horizon)
        s_val = as_rational(s)
        t_val = as_rational(t) if t else default_modulus(system, s_val, N)
        try:
            reports = [lemma1_verify(series, N, s_val, t_val, c, horizon).to_dict() for c in ([clause] if clause else CLAUSES)]
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        text = json.dumps(reports, indent=2, sort_keys=True) + "\n"
        atomic_write(Path(out) / "lemma1.json", text)
        click.echo(text, nl=False)
        return EXIT_OK if all(r["first_violation"] is None for r in reports) else EXIT_FAIL

    _run(body)


@main.command()
@common
@pair_option
@click.option("--n", "N", type=int, default=3, show_default=True)
@click.option("--horizon", type=int, default=10**6, show_default=True)
def theorem2(preset, m_max, tau, delta_grid, out, seed, pair, N, horizon):
    """Classify a pair under f and f^N and write theorem2.json."""

    def body():
        cfg = _config(preset, m_max, tau, delta_grid, out, seed)
        if not 2 <= N <= 8:
            raise ConfigError("--n must lie in [2, 8]")
        system, series = _pair_series(cfg, pair, horizon)
        rep = theorem2_check(series, N, cfg.tau, grid=cfg.grid(system.diam))
        text = json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n"
        atomic_write(Path(out) / "theorem2.json", text)
        click.echo(f"dc2half under f: {rep.base.dc2half}, under f^{N}: {rep.iterate.dc2half}")
        return EXIT_OK if rep.agree else EXIT_FAIL

    _run(body)


@main.command(name="ramsey-demo")
@common
@click.option("--n", "N", type=int, default=2, show_default=True)
@click.option("--horizon", type=int, default=3**13, show_default=True)
def ramsey_demo(preset, m_max, tau, delta_grid, out, seed, N, horizon):
    """Colour the 8-point coded shift set and extract a monochromatic subset."""

    def body():
        cfg = _config(preset, m_max, tau, delta_grid, out, seed)
        rep = corollary_harness(coded_shift_set(), ShiftSystem(), N, cfg.tau, horizon, grid=cfg.grid(1))
        g = rep.coloring.graph
        atomic_write(Path(out) / "ramsey_graph.json", g.to_json() + "\n")
        atomic_write(Path(out) / "ramsey_graph.dot", g.to_dot())
        click.echo(f"monochromatic subset {list(rep.extracted.subset)} colour {rep.extracted.color}")
        return EXIT_OK if rep.ok else EXIT_FAIL

    _run(body)


if __name__ == "__main__":
    main()
