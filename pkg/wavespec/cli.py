#!/usr/bin/env python3

import functools
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import typer
from rich.logging import RichHandler
from rich.traceback import install

from . import __version__
from .config import parse_config
from .exceptions import ConfigError, WavespecError
from .runner import EXIT_FAILURE, EXIT_USAGE, run
from .utils.console import console, print_error, print_warning

install(show_locals=True)

app = typer.Typer(
    name="wavespec",
    help="Shock-fronted travelling waves: wavespeeds, essential spectrum and "
         "Riccati-Evans eigenvalue counting",
    add_completion=False,
)

logger = logging.getLogger("wavespec")


def setup_logging(verbose: bool) -> None:
    """Route the package logger through rich; DEBUG with --verbose, else WARNING."""
    logger.handlers.clear()
    logger.addHandler(RichHandler(console=console, show_path=False))
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)
    logger.propagate = False


def handle_errors(func):
    """Decorator mapping exceptions onto the 0/1/2 exit-code contract."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except KeyboardInterrupt:
            print_warning("\nOperation cancelled by user")
            raise typer.Exit(EXIT_FAILURE)
        except ConfigError as e:
            print_error(str(e))
            raise typer.Exit(EXIT_USAGE)
        except WavespecError as e:
            print_error(str(e))
            raise typer.Exit(EXIT_FAILURE)
    return wrapper


def _execute(ctx: typer.Context, command: str, config_file: Optional[Path],
             overrides: Dict[str, Any]) -> None:
    overrides["verbose"] = (ctx.obj or {}).get("verbose")
    config = parse_config(command, overrides, config_file)
    code = run(config)
    if code:
        raise typer.Exit(code)


def _pair(value: Optional[Tuple[float, float]]) -> Optional[List[float]]:
    # click hands back None or an empty tuple for an absent two-value option
    return list(value) if value else None


ConfigOption = typer.Option(None, "--config", help="Flat key = value config file")
OutputOption = typer.Option(
    None, "--output-dir", "-o", help="Artifact directory (default $WAVESPEC_OUT or ./wavespec-out)"
)
WorkersOption = typer.Option(None, "--workers", "-j", help="Worker processes for lambda sweeps")
RtolOption = typer.Option(None, "--rtol", help="Relative integration tolerance")
AtolOption = typer.Option(None, "--atol", help="Absolute integration tolerance")


@app.command()
@handle_errors
def wave(
    ctx: typer.Context,
    full: Optional[bool] = typer.Option(
        None, "--full/--singular", help="Shoot the eps > 0 wave instead of the singular orbit"
    ),
    eps: Optional[float] = typer.Option(None, "--eps", help="Singular parameter, 0 < eps <= 0.01"),
    c_bracket: Optional[Tuple[float, float]] = typer.Option(
        None, "--c-bracket", help="Bracket for the singular wavespeed"
    ),
    shoot_tol: Optional[float] = typer.Option(None, "--shoot-tol", help="Newton tolerance"),
    offset: Optional[float] = typer.Option(None, "--offset", help="Take-off distance"),
    config_file: Optional[Path] = ConfigOption,
    output_dir: Optional[Path] = OutputOption,
    rtol: Optional[float] = RtolOption,
    atol: Optional[float] = AtolOption,
):
    """Compute the singular wavespeed c0, or c(eps) and the full profile."""
    _execute(ctx, "wave", config_file, {
        "full": full, "eps": eps, "c_bracket": _pair(c_bracket), "shoot_tol": shoot_tol,
        "offset": offset, "output_dir": output_dir, "rtol": rtol, "atol": atol,
    })


@app.command()
@handle_errors
def espec(
    ctx: typer.Context,
    eps: Optional[float] = typer.Option(None, "--eps", help="Singular parameter (default 0.1)"),
    order: Optional[int] = typer.Option(None, "--order", help="Regularization order, 3 or 4"),
    a: Optional[float] = typer.Option(None, "--a", help="Fourth-order coefficient"),
    wavespeed: Optional[float] = typer.Option(None, "--wavespeed", help="Wavespeed c"),
    config_file: Optional[Path] = ConfigOption,
    output_dir: Optional[Path] = OutputOption,
):
    """Fredholm borders, eps* values and sectoriality verdicts."""
    _execute(ctx, "espec", config_file, {
        "eps": eps, "order": order, "a": a, "wavespeed": wavespeed,
        "output_dir": output_dir,
    })


@app.command()
@handle_errors
def evans(
    ctx: typer.Context,
    lam: Optional[str] = typer.Option(None, "--lambda", help="Single evaluation, e.g. 0.2+0.3i"),
    contour_center: Optional[str] = typer.Option(None, "--contour-center", help="Circle center"),
    contour_radius: Optional[float] = typer.Option(None, "--contour-radius", help="Circle radius"),
    n: Optional[int] = typer.Option(None, "--n", help="Initial contour samples (>= 16)"),
    scan: Optional[Tuple[float, float]] = typer.Option(
        None, "--scan", help="Real interval to scan for eigenvalues and poles"
    ),
    sigma: Optional[float] = typer.Option(None, "--sigma", help="Section U = sigma"),
    beta: Optional[float] = typer.Option(None, "--beta", help="Left end of the slow region"),
    chart_threshold: Optional[float] = typer.Option(
        None, "--chart-threshold", help="Riccati chart switch threshold"
    ),
    method: Optional[str] = typer.Option(None, "--method", help="solve_ivp method"),
    config_file: Optional[Path] = ConfigOption,
    output_dir: Optional[Path] = OutputOption,
    workers: Optional[int] = WorkersOption,
    rtol: Optional[float] = RtolOption,
    atol: Optional[float] = AtolOption,
):
    """Riccati-Evans function: a single value, a contour winding or a real scan."""
    if lam is not None and scan:
        raise ConfigError("--lambda and --scan are mutually exclusive")
    _execute(ctx, "evans", config_file, {
        "lam": lam, "contour_center": contour_center, "contour_radius": contour_radius,
        "n": n, "scan": _pair(scan), "sigma": sigma, "beta": beta,
        "chart_threshold": chart_threshold, "method": method, "output_dir": output_dir,
        "workers": workers, "rtol": rtol, "atol": atol,
    })


@app.command()
@handle_errors
def converge(
    ctx: typer.Context,
    lam: Optional[str] = typer.Option(None, "--lambda", help="Spectral parameter (default 15)"),
    eps_list: Optional[str] = typer.Option(
        None, "--eps-list", help="Strictly descending eps values, e.g. 1e-2,3e-3,1e-3"
    ),
    freeze_c: Optional[bool] = typer.Option(
        None, "--freeze-c/--track-c", help="Use c0 for every eps or shoot c(eps)"
    ),
    stiff_method: Optional[str] = typer.Option(None, "--stiff-method", help="solve_ivp method"),
    config_file: Optional[Path] = ConfigOption,
    output_dir: Optional[Path] = OutputOption,
    workers: Optional[int] = WorkersOption,
    rtol: Optional[float] = RtolOption,
    atol: Optional[float] = AtolOption,
):
    """Distance of projectivized eps > 0 solutions to the reduced solution."""
    _execute(ctx, "converge", config_file, {
        "lam": lam, "eps_list": eps_list, "freeze_c": freeze_c,
        "stiff_method": stiff_method, "output_dir": output_dir, "workers": workers,
        "rtol": rtol, "atol": atol,
    })


@app.command()
@handle_errors
def verify(
    ctx: typer.Context,
    config_file: Optional[Path] = ConfigOption,
    output_dir: Optional[Path] = OutputOption,
    workers: Optional[int] = WorkersOption,
):
    """Run every verification suite and print the pass/fail table."""
    _execute(ctx, "verify", config_file, {"output_dir": output_dir, "workers": workers})


def version_callback(value: bool):
    if value:
        console.print(f"wavespec v{__version__}")
        raise typer.Exit(0)


@app.callback()
def main(
    ctx: typer.Context,
    version: Optional[bool] = typer.Option(
        None, "--version", "-V", callback=version_callback, is_eager=True,
        help="Show version and exit",
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """wavespec - travelling waves and their spectra for a regularized reaction-diffusion equation."""
    setup_logging(verbose)
    ctx.obj = {"verbose": verbose}


if __name__ == "__main__":
    app()
