import logging
import tempfile
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional

from . import csv_utils, espec, full_lin, slow_evans, verify, wave
from .config import RunConfig
from .contour import SpectralContour
from .exceptions import ReportError, WavespecError
from .manifest import RunManifest, write_json
from .models import Tolerances
from .template_manager import REPORT_TEMPLATE, TemplateEngine
from .utils.console import (
    display_checks_table,
    display_distances,
    display_spectrum_table,
    display_step,
    display_wavespeeds,
    print_divider,
    print_error,
    print_info,
    print_success,
    print_warning,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

DEFAULT_CONVERGE_LAMBDA = 15.0
DEFAULT_ESPEC_EPS = 0.1


def _orbit_tol(config: RunConfig) -> Tolerances:
    return Tolerances(config.rtol, config.atol, "RK45")


def _stiff_tol(config: RunConfig) -> Tolerances:
    return Tolerances(config.rtol, config.atol, config.stiff_method)


def _settings(config: RunConfig) -> slow_evans.EvansSettings:
    return slow_evans.EvansSettings(
        tol=Tolerances(config.rtol, config.atol, config.method),
        sigma=config.sigma,
        chart_threshold=config.chart_threshold,
        beta=config.beta,
    )


def _orbit(config: RunConfig, manifest: RunManifest):
    orbit = wave.find_c0(config.c_bracket, tol=_orbit_tol(config), offset=config.offset)
    manifest.constants.update(
        {"c0": orbit.c0, "p_F": orbit.p_F, "v_F": orbit.v_F, "p_J": orbit.p_J,
         "matching_defect": orbit.defect}
    )
    return orbit


def ensure_output_dir(path: Path) -> Path:
    """Create ``path`` and prove it is writable.

    Raises:
        ReportError: If the directory cannot be created or written
    """
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(dir=path):
            pass
    except OSError as e:
        raise ReportError(f"Output directory {path} is not writable: {e}")
    return path


# ---------------------------------------------------------------------------
# commands


def run_wave(config: RunConfig, manifest: RunManifest, out: Path) -> List[Path]:
    display_step(1, 2 if config.full else 1, "Locating the singular wavespeed")
    orbit = _orbit(config, manifest)
    hypotheses = wave.check_hypotheses(orbit, tol=_orbit_tol(config))
    manifest.constants["dm_dc"] = hypotheses.dm_dc
    manifest.add_check("monotone slow segments", hypotheses.monotone,
                       f"min U'={hypotheses.min_speed:.3g}")
    files = [csv_utils.write_orbit(out / "orbit.csv", orbit)]
    rows = [(0.0, orbit.c0)]

    if config.full:
        display_step(2, 2, f"Shooting the full wave for eps={config.eps:g}")
        c, profile = wave.find_c_eps(
            config.eps, c_guess=orbit.c0, tol=_stiff_tol(config),
            shoot_tol=config.shoot_tol, method=config.stiff_method,
            offset=config.offset,
        )
        manifest.constants["c_eps"] = c
        manifest.constants["newton_residual"] = profile.diagnostics["newton_residual"]
        files.append(csv_utils.write_profile(out / "profile.csv", profile))
        rows.append((config.eps, c))
    display_wavespeeds(rows)
    return files


def run_espec(config: RunConfig, manifest: RunManifest, out: Path) -> List[Path]:
    eps = config.eps if config.eps is not None else DEFAULT_ESPEC_EPS
    display_step(1, 1, f"Fredholm borders for eps={eps:g}, order {config.order}")
    borders = {
        end: espec.border_polyline(eps, end, config.order, config.a, c=config.wavespeed)
        for end in ("minus", "plus")
    }
    samples = borders["minus"] + borders["plus"]
    report = espec.summary(eps, orders=(config.order,), a=config.a, c=config.wavespeed)
    manifest.constants.update(
        {f"epsilon_star_{end}": value for end, value in report["epsilon_star"].items()}
    )
    files = [
        csv_utils.write_borders(out / "borders.csv", {eps: samples}),
        write_json(out / "espec.json", report),
    ]
    for verdict in report["sectoriality"]:
        print_info(
            f"{verdict['end']}: sectorial={verdict['sectorial']}, "
            f"Re at k={verdict['k_max']:g} is {verdict['re_at_kmax']:.6g}"
        )
    return files


def run_evans(config: RunConfig, manifest: RunManifest, out: Path) -> List[Path]:
    display_step(1, 2, "Locating the singular orbit")
    orbit = _orbit(config, manifest)
    settings = _settings(config)

    if config.lam is not None:
        display_step(2, 2, f"Evaluating E at lambda={config.lam}")
        sample = slow_evans.riccati_evans(config.lam, orbit, settings)
        print_info(f"E({config.lam}) = {sample.value:.12g}")
        return [write_json(out / "evans.json", {
            "lambda": sample.lam, "E": sample.value, "unstable_hit": sample.left_hit,
            "stable_hit": sample.right_hit, "sigma": settings.sigma,
        })]

    if config.scan is not None:
        display_step(2, 2, f"Scanning the real axis on {config.scan}")
        scan = slow_evans.find_real_eigenvalues(
            config.scan, orbit, settings=settings, workers=config.workers
        )
        manifest.eigenvalues.extend(scan.eigenvalues)
        manifest.poles.extend(scan.poles)
        for pole, wind in zip(scan.poles, scan.pole_windings):
            if wind is not None:
                manifest.windings[f"pole {pole:.6f}"] = wind
        display_spectrum_table(scan.eigenvalues, scan.poles, scan.pole_windings)
        return [csv_utils.write_scan(out / "scan.csv", scan.samples)]

    contour = SpectralContour.circle(config.contour_center, config.contour_radius,
                                     config.n)
    display_step(2, 2, f"Winding on |lambda - {config.contour_center}| = "
                       f"{config.contour_radius}")
    result = slow_evans.winding_result(contour, orbit, settings, workers=config.workers)
    manifest.windings["contour"] = result.winding
    print_success(f"Winding number {result.winding} "
                  f"({len(result.samples)} samples)")
    return [csv_utils.write_evans_samples(out / "contour.csv", result.ordered())]


def run_converge(config: RunConfig, manifest: RunManifest, out: Path) -> List[Path]:
    lam = config.lam if config.lam is not None else DEFAULT_CONVERGE_LAMBDA
    display_step(1, 2, "Locating the singular orbit")
    orbit = _orbit(config, manifest)
    settings = _settings(config)
    display_step(2, 2, f"Projectivized solutions at lambda={lam} for eps in "
                       f"{list(config.eps_list)}")
    report = full_lin.convergence_run(
        lam, config.eps_list, orbit, freeze_c=config.freeze_c, tol=_stiff_tol(config),
        settings=settings, workers=config.workers,
    )
    reduced = slow_evans.riccati_path(lam, orbit, settings)
    display_distances((r.eps, r.c, r.sup_distance) for r in report.results)
    manifest.add_check("distances strictly decreasing", report.monotone,
                       ", ".join(f"{d:.3e}" for d in report.distances))
    if not report.monotone:
        print_warning("Distances to the reduced solution do not decrease with eps")
    return [
        csv_utils.write_convergence(out / "convergence.csv", report),
        csv_utils.write_riccati_path(out / "reduced.csv", reduced),
        write_json(out / "converge.json", {
            "lambda": report.lam, "freeze_c": report.freeze_c,
            "monotone": report.monotone,
            "results": [{"eps": r.eps, "c": r.c, "sup_distance": r.sup_distance,
                         "window_samples": r.window_samples} for r in report.results],
        }),
    ]


def run_verify(config: RunConfig, manifest: RunManifest, out: Path) -> List[Path]:
    display_step(1, 1, "Running verification suites")
    ctx = verify.VerificationContext(
        tol=_orbit_tol(config), settings=_settings(config), workers=config.workers
    )
    results = verify.run_suites(ctx)
    for result in results:
        manifest.add_check(result.name, result.passed, result.detail)
    print_divider()
    display_checks_table((r.name, r.passed, r.detail) for r in results)
    failed = [r.name for r in results if not r.passed]
    if failed:
        manifest.fail(f"{len(failed)} verification check(s) failed: {', '.join(failed)}")
    return [write_json(out / "verify.json", {
        "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail}
                   for r in results],
    })]


COMMANDS: Dict[str, Callable[[RunConfig, RunManifest, Path], List[Path]]] = {
    "wave": run_wave,
    "espec": run_espec,
    "evans": run_evans,
    "converge": run_converge,
    "verify": run_verify,
}


def run(config: RunConfig, engine: Optional[TemplateEngine] = None) -> int:
    """Execute one command, write artifacts plus manifest, return the exit code."""
    try:
        out = ensure_output_dir(config.output_dir)
    except ReportError as e:
        print_error(str(e))
        return EXIT_FAILURE

    manifest = RunManifest(config=config.as_dict())
    started = time.perf_counter()
    files: List[Path] = []
    try:
        files = COMMANDS[config.command](config, manifest, out)
    except WavespecError as e:
        logger.debug("run failed", exc_info=True)
        manifest.fail(f"{type(e).__name__}: {e}")
        print_error(str(e))
    manifest.wall_clock_seconds = time.perf_counter() - started

    try:
        for path in files:
            manifest.add_file(path, out)
        engine = engine or TemplateEngine()
        report = out / "report.txt"
        report.write_text(engine.render(REPORT_TEMPLATE, manifest=manifest.to_dict()),
                          encoding="utf-8", newline="\n")
        manifest.add_file(report, out)
        manifest.write(out)
    except (ReportError, OSError) as e:
        print_error(f"Failed to write run artifacts: {e}")
        return EXIT_FAILURE

    if manifest.status != "ok":
        print_error(manifest.diagnostic or "run failed")
        return EXIT_FAILURE
    print_success(f"Artifacts written to {out}")
    return EXIT_OK
