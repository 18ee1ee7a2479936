"""Verification suites run by ``wavespec verify``.

Each check returns a CheckResult; a check that raises counts as failed with
the exception text as detail. Random samples use fixed seeds.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import espec, full_lin, slow_evans, wave
from .contour import SpectralContour
from .exceptions import WavespecError
from .models import SingularOrbit, Tolerances
from .polynomials import ModelFunctions, default_model, eval_model_exact

logger = logging.getLogger(__name__)

C0_REFERENCE = 0.199362
LAMBDA_1_REFERENCE = -0.80925
POLE_REFERENCE = -0.08
LARGE_CONTOUR_CENTER = -0.4
LARGE_CONTOUR_RADIUS = 0.48


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


class VerificationContext:
    """Lazily computed shared inputs (the singular orbit, scan results)."""

    def __init__(self, model: Optional[ModelFunctions] = None,
                 tol: Optional[Tolerances] = None,
                 settings: Optional[slow_evans.EvansSettings] = None, workers: int = 1,
                 orbit: Optional[SingularOrbit] = None):
        self.model = model or default_model()
        self.tol = tol or Tolerances()
        self.settings = settings or slow_evans.EvansSettings()
        self.workers = workers
        self._orbit = orbit
        self.rng = np.random.default_rng(20240611)

    @property
    def orbit(self) -> SingularOrbit:
        if self._orbit is None:
            self._orbit = wave.find_c0(model=self.model, tol=self.tol)
        return self._orbit

    @cached_property
    def scan(self) -> slow_evans.RealSpectrumScan:
        return slow_evans.find_real_eigenvalues(
            (self.settings.beta, 0.3), self.orbit, settings=self.settings,
            model=self.model, confirm_poles=False, workers=self.workers,
        )

    def evans(self, lam: complex) -> complex:
        return slow_evans.riccati_evans(lam, self.orbit, self.settings, self.model).value


# ---------------------------------------------------------------------------
# model


def check_jump_geometry(ctx: VerificationContext) -> CheckResult:
    left = eval_model_exact(Fraction(7, 12), ctx.model).F
    right = eval_model_exact(Fraction(5, 6), ctx.model).F
    passed = left == right == Fraction(245, 432)
    return CheckResult("model: F(7/12) = F(5/6) = 245/432", passed, f"{left}, {right}")


def check_folds(ctx: VerificationContext) -> CheckResult:
    values = [eval_model_exact(Fraction(u), ctx.model).D for u in ("7/12", "3/4")]
    return CheckResult("model: D vanishes at the folds", all(v == 0 for v in values),
                       str(values))


# ---------------------------------------------------------------------------
# wave


def check_singular_wavespeed(ctx: VerificationContext) -> CheckResult:
    gap = abs(ctx.orbit.c0 - C0_REFERENCE)
    return CheckResult("wave: singular wavespeed", gap < 1e-4, f"c0={ctx.orbit.c0:.8f}")


def check_hypotheses(ctx: VerificationContext) -> CheckResult:
    report = wave.check_hypotheses(ctx.orbit, ctx.model, ctx.tol)
    return CheckResult(
        "wave: monotone slow segments, transversal in c", report.monotone
        and report.transversal,
        f"min U'={report.min_speed:.3g}, dm/dc={report.dm_dc:.3g}",
    )


def check_layer_conserves_slow(ctx: VerificationContext) -> CheckResult:
    orbit = ctx.orbit
    layer = wave.layer_trajectory(ctx.model.u_F + 1e-3, orbit.p_F, orbit.v_F, orbit.c0,
                                  ctx.model, ctx.tol)
    drift = float(np.max(np.abs(layer.states[:, 1:] - [orbit.p_F, orbit.v_F])))
    landed = abs(layer.target - ctx.model.u_J)
    return CheckResult("wave: layer keeps (p, v) and lands on u_J", drift < 1e-12
                       and landed < 1e-10, f"drift={drift:.2g}, |target-u_J|={landed:.2g}")


# ---------------------------------------------------------------------------
# espec


_LABEL_POINTS = {
    1.0: espec.RegionLabel.OMEGA,
    -2.0: espec.RegionLabel.A1,
    -20 + 20j: espec.RegionLabel.A2,
    -20 - 20j: espec.RegionLabel.A3,
    -6.0: espec.RegionLabel.A4,
}


def check_signature_table(ctx: VerificationContext) -> CheckResult:
    wrong = []
    for eps in (0.05, 0.1):
        for lam, expected in _LABEL_POINTS.items():
            got = espec.classify(lam, eps, model=ctx.model)
            if got is not expected:
                wrong.append(f"eps={eps} lam={lam}: {got.value}")
    return CheckResult("espec: region labels at sample points", not wrong,
                       "; ".join(wrong))


def check_vertical_asymptotes(ctx: VerificationContext) -> CheckResult:
    errors = []
    for eps in (0.05, 0.1):
        for end in ("minus", "plus"):
            report = espec.sectoriality_report(eps, end, 3, model=ctx.model)
            errors.append(report.asymptote_relative_error)
    worst = max(errors)
    return CheckResult("espec: third-order borders approach -D/eps", worst < 0.01,
                       f"max relative error {worst:.3g}")


def check_fourth_order_unbounded(ctx: VerificationContext) -> CheckResult:
    bounded = [
        f"{end} a={a:g}"
        for end in ("minus", "plus")
        for a in (0.0, 1.0)
        if not espec.sectoriality_report(0.1, end, 4, a, model=ctx.model).sectorial
    ]
    return CheckResult("espec: fourth-order borders have Re -> -infinity", not bounded,
                       "; ".join(bounded))


def check_asymptotic_expansion(ctx: VerificationContext) -> CheckResult:
    eps, c = 1e-4, 0.2
    values = np.sort_complex(
        np.linalg.eigvals(espec.asymptotic_matrix(0.0, eps, "minus", "fast", c,
                                                  ctx.model).matrix)
    )
    mu_f = -21 / (8 * c)
    nu = [(2 / 21) * (2 * c - math.sqrt(4 * c * c + 42)),
          (2 / 21) * (2 * c + math.sqrt(4 * c * c + 42))]
    errors = [abs(values[0] - mu_f) / abs(mu_f)]
    errors += [abs(values[k + 1] - eps * nu[k]) / abs(eps * nu[k]) for k in range(2)]
    worst = float(max(errors))
    return CheckResult("espec: eigenvalue expansion at z-", worst <= 10 * eps,
                       f"max relative error {worst:.3g}")


# ---------------------------------------------------------------------------
# slow_evans


def check_jump_equivalence(ctx: VerificationContext) -> CheckResult:
    jd = slow_evans.jump_data(ctx.orbit, ctx.model)
    worst = 0.0
    for _ in range(50):
        P, V, lam = ctx.rng.normal(size=3) + 1j * ctx.rng.normal(size=3)
        P2, V2 = slow_evans.jump_linear(P, V, lam, jd, ctx.model)
        s2 = slow_evans.jump_projective(P / V, lam, jd, ctx.model)
        worst = max(worst, abs(P2 / V2 - s2) / max(1.0, abs(s2)))
    return CheckResult("slow_evans: linear and projective jump agree", worst <= 1e-12,
                       f"max deviation {worst:.2g}")


def check_quotient_consistency(ctx: VerificationContext, starts: int = 50) -> CheckResult:
    orbit = ctx.orbit
    left = orbit.left_segment
    span = (left.tau_min / 2, -1.0)
    worst = 0.0
    for _ in range(starts):
        lam = complex(*ctx.rng.uniform(-0.5, 0.5, size=2))
        P0, V0 = ctx.rng.normal(size=2) + 1j * ctx.rng.normal(size=2)
        sol = slow_evans.integrate_linear(lam, left, [P0, V0], span, orbit.c0,
                                          ctx.settings, ctx.model)
        hom = slow_evans.transport_projective(lam, left, orbit.c0, span, P0 / V0,
                                              ctx.settings, ctx.model)
        worst = max(worst, full_lin.fubini_study_dist(sol.y[:, -1], hom))
    return CheckResult("slow_evans: Riccati flow is the quotient of the linear flow",
                       worst <= 1e-8, f"max FS distance {worst:.2g}")


def check_conjugation(ctx: VerificationContext, samples: int = 10) -> CheckResult:
    worst = 0.0
    for _ in range(samples):
        lam = complex(ctx.rng.uniform(-0.6, 0.6), ctx.rng.uniform(0.05, 0.6))
        a, b = ctx.evans(lam), ctx.evans(lam.conjugate())
        worst = max(worst, abs(b - a.conjugate()) / max(1.0, abs(a)))
    return CheckResult("slow_evans: E(conj lambda) = conj E(lambda)", worst <= 1e-8,
                       f"max deviation {worst:.2g}")


def check_translation_eigenvalue(ctx: VerificationContext) -> CheckResult:
    value = abs(ctx.evans(0.0))
    return CheckResult("slow_evans: E(0) = 0", value <= 1e-8, f"|E(0)|={value:.2g}")


def check_real_scan(ctx: VerificationContext) -> CheckResult:
    scan = ctx.scan
    eigs, poles = scan.eigenvalues, scan.poles
    ok = (
        len(eigs) == 2
        and abs(eigs[0] - LAMBDA_1_REFERENCE) <= 1e-3
        and abs(eigs[1]) <= 1e-8
        and len(poles) == 1
        and abs(poles[0] - POLE_REFERENCE) <= 5e-3
    )
    return CheckResult("slow_evans: real scan finds {lambda_1, 0} and one pole", ok,
                       f"eigenvalues={[round(e, 6) for e in eigs]}, "
                       f"poles={[round(p, 6) for p in poles]}")


def check_windings(ctx: VerificationContext) -> CheckResult:
    centers = {"lambda_1": LAMBDA_1_REFERENCE, "zero": 0.0, "pole": POLE_REFERENCE}
    if ctx.scan.poles:
        centers["pole"] = ctx.scan.poles[0]
    if len(ctx.scan.eigenvalues) == 2:
        centers["lambda_1"] = ctx.scan.eigenvalues[0]
    expected = {"lambda_1": 1, "zero": 1, "pole": -1}
    got = {
        name: slow_evans.winding(SpectralContour.circle(center, 0.03), ctx.orbit,
                                 ctx.settings, ctx.model, ctx.workers)
        for name, center in centers.items()
    }
    return CheckResult("slow_evans: windings on radius-0.03 circles", got == expected,
                       str(got))


def check_large_contour_winding(ctx: VerificationContext) -> CheckResult:
    contour = SpectralContour.circle(LARGE_CONTOUR_CENTER, LARGE_CONTOUR_RADIUS)
    got = slow_evans.winding(contour, ctx.orbit, ctx.settings, ctx.model, ctx.workers)
    return CheckResult("slow_evans: winding +1 around lambda_1, the pole and 0", got == 1,
                       f"winding={got}")


def check_no_unstable_spectrum(ctx: VerificationContext) -> CheckResult:
    scan = slow_evans.find_real_eigenvalues((0.05, 1.0), ctx.orbit,
                                            settings=ctx.settings, model=ctx.model,
                                            confirm_poles=False, workers=ctx.workers)
    windings = [
        slow_evans.winding(SpectralContour.circle(center, 0.05), ctx.orbit, ctx.settings,
                           ctx.model, ctx.workers)
        for center in (0.2 + 0.3j, 0.2 - 0.3j)
    ]
    ok = not scan.eigenvalues and windings == [0, 0]
    return CheckResult("slow_evans: no eigenvalues with Re > 0", ok,
                       f"scan={scan.eigenvalues}, windings={windings}")


def check_simplicity(ctx: VerificationContext) -> CheckResult:
    h = 1e-5
    derivatives = []
    for lam in ctx.scan.eigenvalues:
        derivatives.append(abs(ctx.evans(lam + h) - ctx.evans(lam - h)) / (2 * h))
    ok = len(derivatives) == 2 and min(derivatives) > 0.01
    return CheckResult("slow_evans: eigenvalues are simple", ok,
                       ", ".join(f"{d:.3g}" for d in derivatives))


# ---------------------------------------------------------------------------
# full_lin


def check_wedge_sums(ctx: VerificationContext) -> CheckResult:
    ok = all(
        full_lin.wedge_eig_check(ctx.rng.normal(size=(3, 3)) + 1j * ctx.rng.normal(size=(3, 3)))
        for _ in range(20)
    )
    return CheckResult("full_lin: wedge eigenvalues are pairwise sums", ok)


def check_toy_exchange(ctx: VerificationContext) -> CheckResult:
    details, ok = [], True
    for eps in (0.02, 0.01, 0.005):
        ics = full_lin.ToyState(b=0.5, y=1.0, db=0.3 + 0.1j, dy=1.0, eps=eps, lam=2.0)
        report = full_lin.toy_exchange(ics)
        ok = ok and report.closed_form_error <= 1e-9 and report.bound_holds
        details.append(f"eps={eps}: angle={report.angle:.3g} <= {report.bound:.3g}")
    return CheckResult("full_lin: toy exchange closed form and angle bound", ok,
                       "; ".join(details))


def check_hierarchy_on_contour(ctx: VerificationContext) -> CheckResult:
    contour = SpectralContour.circle(0.0, 0.5)
    points = [contour.point(t) for t in contour.initial_parameters()]
    bars = [full_lin.epsilon_bar(points, end, ctx.orbit.c0, model=ctx.model)
            for end in ("minus", "plus")]
    ok = all(math.isfinite(bar) and bar > 0 for bar in bars)
    return CheckResult("full_lin: hierarchy holds on |lambda| = 0.5", ok,
                       f"eps_bar={min(bars):.3g}")


SUITES: Dict[str, List[Callable[[VerificationContext], CheckResult]]] = {
    "model": [check_jump_geometry, check_folds],
    "wave": [check_singular_wavespeed, check_hypotheses, check_layer_conserves_slow],
    "espec": [check_signature_table, check_vertical_asymptotes,
              check_fourth_order_unbounded, check_asymptotic_expansion],
    "slow_evans": [check_jump_equivalence, check_quotient_consistency,
                   check_conjugation, check_translation_eigenvalue, check_real_scan,
                   check_windings, check_large_contour_winding, check_no_unstable_spectrum,
                   check_simplicity],
    "full_lin": [check_wedge_sums, check_toy_exchange, check_hierarchy_on_contour],
}

EXPENSIVE = {check_real_scan, check_windings, check_large_contour_winding,
             check_no_unstable_spectrum, check_simplicity}


def run_suites(ctx: Optional[VerificationContext] = None,
               suites: Optional[Sequence[str]] = None,
               include_expensive: bool = True) -> List[CheckResult]:
    """Run the named suites (all by default) and collect their results."""
    ctx = ctx or VerificationContext()
    names = list(suites or SUITES)
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites: {unknown}")
    results = []
    for name in names:
        for check in SUITES[name]:
            if check in EXPENSIVE and not include_expensive:
                continue
            try:
                result = check(ctx)
            except (WavespecError, ValueError, ArithmeticError) as e:
                result = CheckResult(check.__name__, False, f"{type(e).__name__}: {e}")
            logger.info("%s: %s", result.name, "pass" if result.passed else "FAIL")
            results.append(result)
    return results
