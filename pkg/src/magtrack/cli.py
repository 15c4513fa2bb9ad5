"""Command-line front end.

Subcommands: simulate (write a synthetic sample stream), calibrate
(estimate k20/k30 from a dwell at the marked midpoint and write an
updated config), track (stream position estimates from a sample stream),
eval-grid (grid error report), capacity (sensors-per-link calculator).

File formats: sample CSV has the exact header ``t,hx,hy,hz`` (t in
seconds with 6 decimal places, fields in uT); estimate CSV has the exact
header ``t,x,y,quality``.  Both carry ``# config_hash=`` and ``# seed=``
comment lines so a report can be traced to the configuration that
produced it.  Reading '-' streams from standard input with per-row
flushing on output.

Exit codes: 0 success, 1 unexpected I/O failure, 2 usage error, and one
documented code per named error: DomainError 11, DegenerateGeometry 12,
OutOfRange 13, TrajectoryOutOfBounds 14, NonMonotonicTimestamp 15,
BinMisalignment 16, BufferNotFull 17, NotCalibrated 18,
InsufficientSamples 19, ExcessiveSpread 20, EmptyInput 21,
ConfigError 22.
"""
from __future__ import annotations

import contextlib
import functools
import math
import os
import sys
from dataclasses import replace

import click

from .config import AppConfig, load_config, write_config
from .errors import ConfigError, DomainError, NotCalibrated, TrackingError
from .evaluation import run_grid_eval, write_report_csv, write_scatter
from .field_model import Vec2, Vec3
from .signal_synth import PRESETS, SensorSample, TrajectorySpec, noise_preset, synthesize
from .solver import calibrate as solve_calibration

SAMPLE_HEADER = "t,hx,hy,hz"
ESTIMATE_HEADER = "t,x,y,quality"


def capacity(throughput: float, update_rate: float, bytes_per_update: float) -> int:
    """How many sensors one link sustains: floor(throughput / (rate * size))."""
    if throughput <= 0 or update_rate <= 0 or bytes_per_update <= 0:
        raise DomainError("throughput, update_rate and bytes_per_update must be positive")
    return math.floor(throughput / (update_rate * bytes_per_update))


def _tracking_errors(fn):
    """Map package errors to their documented exit codes."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except TrackingError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(e.exit_code)
        except OSError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(1)
    return wrapper


def _common(fn):
    fn = click.option("--seed", type=int, default=None,
                      help="Override the config seed.")(fn)
    fn = click.option("--config", "config_path",
                      type=click.Path(exists=True, dir_okay=False), default=None,
                      help="Config file (flat key = value lines).")(fn)
    return fn


def _load(config_path, seed=None, preset=None) -> AppConfig:
    cfg = load_config(config_path)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    if preset is not None:
        cfg = replace(cfg, noise=noise_preset(preset, rng_seed=cfg.noise.rng_seed))
    return cfg


def _parse_point(text: str, name: str) -> Vec2:
    try:
        x, y = (float(p) for p in text.split(","))
        return Vec2(x, y)
    except (ValueError, TrackingError):
        raise click.BadParameter(f"{name} must be 'x,y', got {text!r}") from None


@contextlib.contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _iter_samples(lines, warn):
    """Parse sample CSV rows, skipping comments and the header; malformed
    rows are reported through ``warn`` and counted, never fatal."""
    skipped = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line == SAMPLE_HEADER:
            continue
        try:
            t, hx, hy, hz = (float(p) for p in line.split(","))
            yield SensorSample(t, Vec3(hx, hy, hz))
        except (ValueError, TrackingError):
            skipped += 1
            warn(f"skipping malformed row {lineno}: {line!r}")
    if skipped:
        warn(f"skipped {skipped} malformed row(s)")


def _read_samples(path: str) -> list[SensorSample]:
    warn = lambda msg: click.echo(msg, err=True)
    if path == "-":
        return list(_iter_samples(sys.stdin, warn))
    with open(path) as fh:
        return list(_iter_samples(fh, warn))


@click.group()
def cli():
    """Magnetic two-anchor 2D tracking: simulation, calibration, tracking
    and evaluation."""


@cli.command()
@_common
@click.option("--preset", type=click.Choice(PRESETS), default=None,
              help="Noise preset (surface label or 'noiseless').")
@click.option("--kind", type=click.Choice(["static", "linear", "circular", "waypoints"]),
              default="static", show_default=True)
@click.option("--duration", type=float, default=5.0, show_default=True,
              help="Stream length in seconds.")
@click.option("--point", default=None, help="Static dwell point 'x,y' (default: grid center).")
@click.option("--start", default=None, help="Linear start 'x,y'.")
@click.option("--end", default=None, help="Linear end 'x,y'.")
@click.option("--center", default=None, help="Circle center 'x,y'.")
@click.option("--radius", type=float, default=2.0, show_default=True)
@click.option("--angular-rate", type=float, default=1.0, show_default=True,
              help="Circle angular rate in rad/s.")
@click.option("--phase0", type=float, default=0.0, help="Circle start angle in rad.")
@click.option("--waypoint", "waypoints", multiple=True,
              help="Waypoint 't:x,y' (repeatable; must cover 0..duration).")
@click.option("--output", "-o", default="-", show_default=True,
              help="Sample CSV path, '-' for stdout.")
@_tracking_errors
def simulate(config_path, seed, preset, kind, duration, point, start, end,
             center, radius, angular_rate, phase0, waypoints, output):
    """Generate a synthetic magnetometer stream along a trajectory."""
    cfg = _load(config_path, seed, preset)
    grid = cfg.grid
    default_point = Vec2(grid.origin.x + grid.width / 2.0,
                         grid.origin.y + grid.height / 2.0)
    if kind == "static":
        traj = TrajectorySpec.static(
            _parse_point(point, "--point") if point else default_point, duration)
    elif kind == "linear":
        if start is None or end is None:
            raise click.UsageError("linear trajectories need --start and --end")
        traj = TrajectorySpec.linear(_parse_point(start, "--start"),
                                     _parse_point(end, "--end"), duration)
    elif kind == "circular":
        traj = TrajectorySpec.circular(
            _parse_point(center, "--center") if center else default_point,
            radius, angular_rate, duration, phase0)
    else:
        if not waypoints:
            raise click.UsageError("waypoint trajectories need at least two --waypoint")
        parsed = []
        for w in waypoints:
            ts, _, pt = w.partition(":")
            try:
                parsed.append((float(ts), _parse_point(pt, "--waypoint")))
            except ValueError:
                raise click.BadParameter(f"--waypoint must be 't:x,y', got {w!r}") from None
        traj = TrajectorySpec.from_waypoints(parsed, duration)

    noise = replace(cfg.noise, rng_seed=cfg.seed)
    samples = synthesize(cfg.rig, cfg.sources(), traj, noise)
    with _open_out(output) as fh:
        fh.write(f"# config_hash={cfg.config_hash}\n# seed={cfg.seed}\n")
        fh.write(SAMPLE_HEADER + "\n")
        for s in samples:
            fh.write(f"{s.t:.6f},{s.field.hx!r},{s.field.hy!r},{s.field.hz!r}\n")
    click.echo(f"wrote {len(samples)} samples ({duration:g} s) to {output}", err=True)


@cli.command("calibrate")
@_common
@click.argument("input_path")
@click.option("--output", "-o", default=None,
              help="Config file to write (default: the --config path, else magtrack.cfg).")
@click.option("--force", is_flag=True,
              help="Replace calibration constants that are already present.")
@_tracking_errors
def calibrate_cmd(config_path, seed, input_path, output, force):
    """Estimate k20/k30 from a sample stream captured at the marked
    calibration point (D/2, 0) and write the updated config."""
    cfg = _load(config_path, seed)
    out_path = output or config_path or "magtrack.cfg"
    if os.path.exists(out_path) and not force:
        existing = load_config(out_path)
        if existing.rig.calibrated:
            raise ConfigError(f"{out_path} already holds calibration constants; "
                              "pass --force to replace them")
    samples = _read_samples(input_path)
    rig = replace(cfg.rig)
    result = solve_calibration(samples, rig, cfg.filter_spec)
    write_config(replace(cfg, rig=rig), out_path)
    click.echo(f"k20={result.k20!r} k30={result.k30!r} "
               f"spread={result.residual_spread:.2%} "
               f"({result.samples_used} samples) -> {out_path}")


@cli.command()
@_common
@click.argument("input_path")
@click.option("--output", "-o", default="-", show_default=True,
              help="Estimate CSV path, '-' for stdout.")
@_tracking_errors
def track(config_path, seed, input_path, output):
    """Stream position estimates from a sample CSV (file or '-').

    Emits one ``t,x,y,quality`` row per sample once the analysis window
    has filled; rows are flushed individually when reading stdin so the
    output can drive a live consumer.
    """
    cfg = _load(config_path, seed)
    if not cfg.rig.calibrated:
        raise NotCalibrated("config has no rig.k20/rig.k30; run calibrate first")
    pipe = cfg.pipeline()
    streaming = input_path == "-"
    warn = lambda msg: click.echo(msg, err=True)

    def emit_all(lines, fh):
        fh.write(f"# config_hash={cfg.config_hash}\n# seed={cfg.seed}\n")
        fh.write(ESTIMATE_HEADER + "\n")
        if streaming:
            fh.flush()
        count = 0
        for s in _iter_samples(lines, warn):
            est = pipe.step(s)
            if est is None:
                continue
            if est.position is None:
                x, y = "nan", "nan"
            else:
                x, y = repr(est.position.x), repr(est.position.y)
            fh.write(f"{s.t:.6f},{x},{y},{est.quality.value}\n")
            if streaming:
                fh.flush()
            count += 1
        return count

    with _open_out(output) as out_fh:
        if streaming:
            count = emit_all(sys.stdin, out_fh)
        else:
            with open(input_path) as in_fh:
                count = emit_all(in_fh, out_fh)
    click.echo(f"{count} estimates -> {output}", err=True)


@cli.command("eval-grid")
@_common
@click.option("--preset", type=click.Choice(PRESETS), default=None,
              help="Noise preset (surface label or 'noiseless').")
@click.option("--trials", type=int, default=10, show_default=True,
              help="Estimates kept per grid point.")
@click.option("--output", "-o", default="eval_report.csv", show_default=True)
@click.option("--scatter", type=click.Path(), default=None,
              help="Also write truth-vs-estimate scatter data here.")
@_tracking_errors
def eval_grid(config_path, seed, preset, trials, output, scatter):
    """Evaluate localization error over the configured grid."""
    cfg = _load(config_path, seed, preset)
    report = run_grid_eval(cfg.rig, cfg.grid, cfg.noise,
                           trials_per_point=trials, seed=cfg.seed,
                           filter_spec=cfg.filter_spec, m_eff=cfg.m_eff,
                           deadzone_radius=cfg.deadzone_radius,
                           label=preset or "")
    write_report_csv(report, output)
    if scatter:
        write_scatter(report, scatter)
    click.echo(f"MAE: {report.aggregate_mean:.4f} ± {report.aggregate_std:.4f} cm "
               f"over {len(report.points)} points -> {output}")


@cli.command("capacity")
@click.argument("throughput", type=float)
@click.argument("update_rate", type=float)
@click.argument("bytes_per_update", type=float)
@_tracking_errors
def capacity_cmd(throughput, update_rate, bytes_per_update):
    """Sensors sustainable on one link: floor(throughput / (rate * size))."""
    click.echo(str(capacity(throughput, update_rate, bytes_per_update)))


def main():
    cli(prog_name="magtrack")


if __name__ == "__main__":
    main()
