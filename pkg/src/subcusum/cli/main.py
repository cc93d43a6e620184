import functools
import logging
from pathlib import Path
from typing import List, Optional

import click

from subcusum.cli.config import ExperimentConfig, fmt_gamma
from subcusum.detectors.detector import TracePoint, run_detector
from subcusum.model.projection import reduce_switching
from subcusum.model.scenario import Flavor, sample_stream
from subcusum.montecarlo.calibrate import calibrate_threshold
from subcusum.montecarlo.compare import CSV_HEADER, compare_procedures
from subcusum.tuning.optimal import tune as tune_parameters
from subcusum.utils.export import (
    dumps_json,
    write_json,
    write_stream_csv,
    write_table_csv,
    write_trace_csv,
)
from subcusum.utils.types import CalibrationError, ConfigError, SubspaceCusumError

_log: logging.Logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_CALIBRATION = 3
EXIT_IO = 4


def _fail(message: str, code: int) -> None:
    click.echo(f"Error: {message}", err=True)
    raise click.exceptions.Exit(code)


def handle_errors(command):
    """Maps package errors to the documented exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ConfigError as exc:
            _fail(f"invalid configuration: {exc}", EXIT_CONFIG)
        except CalibrationError as exc:
            _fail(f"calibration failed: {exc}", EXIT_CALIBRATION)
        except SubspaceCusumError as exc:
            _fail(str(exc), EXIT_CONFIG)
        except OSError as exc:
            _fail(f"I/O error: {exc}", EXIT_IO)

    return wrapper


def load_config(ctx: click.Context, trace: Optional[bool] = None) -> ExperimentConfig:
    """Reads the config file of the group options and applies every override."""
    opts = ctx.obj
    if opts["config"] is None:
        config = ExperimentConfig.from_text("", opts["overrides"])
    else:
        config = ExperimentConfig.from_file(opts["config"], opts["overrides"])
    return config.with_overrides(
        seed=opts["seed"], workers=opts["workers"], out_dir=opts["out_dir"], trace=trace
    )


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    help="Experiment config file (INI sections scenario, detector, montecarlo, output).",
)
@click.option(
    "--set",
    "overrides",
    multiple=True,
    metavar="SECTION.KEY=VALUE",
    help="Overrides one config setting, may be repeated.",
)
@click.option("--seed", type=int, help="Master seed of every random draw.")
@click.option(
    "--workers",
    type=click.IntRange(min=1),
    envvar="SUBCUSUM_WORKERS",
    help="Monte Carlo worker processes [env: SUBCUSUM_WORKERS].",
)
@click.option("--out-dir", type=click.Path(file_okay=False), help="Output directory.")
@click.option("-v", "--verbose", count=True, help="-v for progress, -vv for debug output.")
@click.pass_context
def cli(
    ctx: click.Context,
    config_path: Optional[str],
    overrides,
    seed: Optional[int],
    workers: Optional[int],
    out_dir: Optional[str],
    verbose: int,
) -> None:
    """Subspace-CUSUM change detection experiments."""
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    ctx.obj = {
        "config": config_path,
        "overrides": overrides,
        "seed": seed,
        "workers": workers,
        "out_dir": out_dir,
    }


@cli.command()
@click.option(
    "--trace/--no-trace",
    default=None,
    help="Write trace.csv, overriding output.trace of the config.",
)
@click.pass_context
@handle_errors
def simulate(ctx: click.Context, trace: Optional[bool]) -> None:
    """Samples a stream and, if a detector is configured, runs it on the stream.

    Writes stream.csv, and trace.csv plus report.json when a detector is configured.
    """
    config = load_config(ctx, trace)
    out_dir = Path(config.output.dir)
    scenario = config.build_scenario()
    stream = sample_stream(scenario, config.output.horizon, config.montecarlo.seed)

    projected = stream
    if scenario.flavor is Flavor.SWITCHING and (config.scenario.reduce or config.has_detector):
        # detectors monitor a switching scenario through its projection
        _, projection = reduce_switching(scenario)
        projected = projection.apply(stream)
    emitted = projected if config.scenario.reduce else stream
    written = [write_stream_csv(out_dir / "stream.csv", emitted)]

    if config.has_detector:
        detector_config = config.detector_config(scenario)
        b = config.detector.b
        calibration = None
        if b is None:
            calibration = calibrate_threshold(
                detector_config, config.calibration_spec(), config.montecarlo.workers
            )
            b = calibration.threshold_b
        detector = detector_config.build(b)
        points: List[TracePoint] = []
        report = run_detector(detector, projected, b, config.output.horizon, points)
        payload = {
            "report": report.to_dict(),
            "threshold_b": b,
            "detector": detector_config.to_dict(),
            "seed": config.montecarlo.seed,
        }
        if calibration is not None:
            payload["calibration"] = calibration.to_dict()
        if config.output.trace:
            written.append(write_trace_csv(out_dir / "trace.csv", points))
        written.append(write_json(out_dir / "report.json", payload))
    written.append(_write_config(config, out_dir))
    _echo_written(written)


@cli.command()
@click.option("--k", type=int, help="Dimension of the observations.")
@click.option("--rho", type=float, help="Signal to noise ratio theta / sigma2.")
@click.option("--sigma2", type=float, help="Noise power.")
@click.option("--gamma", type=float, help="Target ARL.")
@click.pass_context
@handle_errors
def tune(
    ctx: click.Context,
    k: Optional[int],
    rho: Optional[float],
    sigma2: Optional[float],
    gamma: Optional[float],
) -> None:
    """Prints the optimal window, drift and predicted delays as JSON.

    Unset options are taken from the configured scenario and the first target ARL.
    """
    config = load_config(ctx)
    scenario = config.scenario
    sigma2 = scenario.sigma2 if sigma2 is None else sigma2
    rho = scenario.theta / scenario.sigma2 if rho is None else rho
    k = scenario.k if k is None else k
    gamma = config.montecarlo.gammas[0] if gamma is None else gamma
    result = tune_parameters(gamma, k, rho, sigma2)
    click.echo(dumps_json(result.to_dict()))


@cli.command()
@click.pass_context
@handle_errors
def calibrate(ctx: click.Context) -> None:
    """Calibrates the configured detector to every target ARL, writing calibration.json."""
    config = load_config(ctx)
    detector_config = config.detector_config()
    results = []
    for gamma in config.montecarlo.gammas:
        result = calibrate_threshold(
            detector_config, config.calibration_spec(gamma), config.montecarlo.workers
        )
        click.echo(
            f"gamma={fmt_gamma(gamma)} b={result.threshold_b:.6g} "
            f"arl={result.arl.mean:.6g} (se {result.arl.stderr:.3g})"
        )
        results.append(result.to_dict())
    out_dir = Path(config.output.dir)
    payload = {
        "detector": detector_config.to_dict(),
        "seed": config.montecarlo.seed,
        "reps": config.montecarlo.reps,
        "calibrations": results,
    }
    _echo_written([write_json(out_dir / "calibration.json", payload), _write_config(config, out_dir)])


@cli.command()
@click.pass_context
@handle_errors
def compare(ctx: click.Context) -> None:
    """Calibrates every procedure to each target ARL and writes compare.csv and compare.json.

    Rows whose calibration fails are kept with empty estimates; the exit code stays 0.
    """
    config = load_config(ctx)
    mc = config.montecarlo
    rows = compare_procedures(
        mc.gammas,
        config.build_scenario(),
        config.calibration_spec(),
        windows=mc.windows,
        w_scan=mc.w_scan or None,
        include_largest_eig=mc.largest_eig,
        eigen_method=config.detector.eigen_method,
        workers=mc.workers,
    )
    failed = [row for row in rows if not row.ok]
    for row in failed:
        click.echo(f"gamma={fmt_gamma(row.gamma)} {row.detector} w={row.w}: {row.status}", err=True)
    out_dir = Path(config.output.dir)
    written = [
        write_table_csv(out_dir / "compare.csv", CSV_HEADER, (row.csv_fields() for row in rows)),
        write_json(out_dir / "compare.json", [row.to_dict() for row in rows]),
        _write_config(config, out_dir),
    ]
    _echo_written(written)


def _write_config(config: ExperimentConfig, out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "config.ini"
    path.write_text(config.to_text())
    return path


def _echo_written(paths) -> None:
    for path in paths:
        _log.info("Wrote %s", path)
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    cli()
