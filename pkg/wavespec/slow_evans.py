"""Reduced (slow) eigenvalue problem along the singular orbit.

Everything here runs in desingularized slow time tau (the base flow is
U' = cU - P, P' = R(U) D(U)), so the fold at U = u_F is a regular point.
Projective solutions are carried on two charts, S = P/V and T = V/P, with a
switch whenever the modulus on the current chart exceeds the threshold.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize
from scipy.interpolate import CubicSpline

from .contour import SpectralContour, WindingResult, winding_number
from .exceptions import (
    GridError,
    NonHyperbolicError,
    SectionAtInfinityError,
    ShootingError,
)
from .models import (
    EvansSample,
    JumpData,
    RiccatiPoint,
    SingularOrbit,
    SlowLinState,
    SlowPath,
    SlowState,
    Tolerances,
)
from .polynomials import ModelFunctions, default_model
from .utils.odes import event, first_event, integrate

logger = logging.getLogger(__name__)

POLE_TOLERANCE = 1e-8
MAX_CHART_SWITCHES = 10000
D_MARGIN = 0.05


@dataclass(frozen=True)
class EvansSettings:
    """Integration and section settings for Riccati-Evans evaluations."""
    tol: Tolerances = Tolerances(method="DOP853")
    sigma: float = 0.95
    chart_threshold: float = 2.0
    beta: float = -0.95

    def __post_init__(self):
        if self.chart_threshold <= 1.0:
            raise ValueError("chart threshold must exceed 1 for hysteresis")


def _settings(settings: Optional[EvansSettings]) -> EvansSettings:
    return settings or EvansSettings()


# ---------------------------------------------------------------------------
# pointwise right-hand sides


def desing_lin_rhs(state: SlowLinState, lam: complex, c: float,
                   model: Optional[ModelFunctions] = None) -> np.ndarray:
    """P' = (R'(U) - lam) V, V' = cV - D(U) P."""
    model = model or default_model()
    U = state.base.U
    return np.array(
        [(model.dR(U) - lam) * state.V, c * state.V - model.D(U) * state.P],
        dtype=complex,
    )


def riccati_rhs(pt: RiccatiPoint, lam: complex, c: float,
                model: Optional[ModelFunctions] = None) -> complex:
    """Derivative on the current chart.

    S' = R' - lam - cS + D S^2, T' = -(R' - lam) T^2 + cT - D.
    """
    model = model or default_model()
    if pt.base is None:
        raise ValueError("riccati_rhs needs a base point")
    U = pt.base.U
    d, r = model.D(U), model.dR(U) - lam
    z = pt.value
    if pt.chart == "S":
        return complex(r - c * z + d * z * z)
    return complex(-r * z * z + c * z - d)


def xy_rhs(U: float, X: float, Y: float, mu: float, omega: float, c: float,
           model: Optional[ModelFunctions] = None) -> np.ndarray:
    """Real split of the S chart, S = X + iY, lam = mu + i omega."""
    model = model or default_model()
    d, r = model.D(U), model.dR(U)
    return np.array(
        [r - mu - c * X + (X * X - Y * Y) * d, -omega - c * Y + 2 * X * Y * d]
    )


def st_rhs(U: float, s: float, t: float, mu: float, omega: float, c: float,
           model: Optional[ModelFunctions] = None) -> np.ndarray:
    """Real split of the T chart, s + it = 1/(X + iY)."""
    model = model or default_model()
    d, r = model.D(U), model.dR(U)
    return np.array(
        [
            -d + c * s - 2 * omega * s * t - (r - mu) * (s * s - t * t),
            c * t - 2 * s * t * (r - mu) + omega * (s * s - t * t),
        ]
    )


def frozen_fixed_points(U: float, lam: complex, c: float,
                        model: Optional[ModelFunctions] = None,
                        backward: bool = False) -> Tuple[complex, complex]:
    """Attractor and repeller of the Riccati flow with the base frozen at U.

    Roots of D S^2 - c S + (R' - lam) = 0; in forward time the attractor has
    Re(2 D S - c) < 0. ``backward=True`` swaps the roles.

    Raises:
        NonHyperbolicError: double root
    """
    model = model or default_model()
    d = float(model.D(U))
    if d == 0:
        raise NonHyperbolicError(f"D vanishes at U={U}; frozen flow is linear")
    disc = complex(c * c + 4 * d * (lam - model.dR(U)))
    if abs(disc) < 1e-14:
        raise NonHyperbolicError(f"non-hyperbolic frozen point at U={U}, lam={lam}")
    root = np.sqrt(disc)
    first = (c - root) / (2 * d)
    second = (c + root) / (2 * d)
    if (2 * d * first - c).real < 0:
        attractor, repeller = first, second
    else:
        attractor, repeller = second, first
    if backward:
        attractor, repeller = repeller, attractor
    return complex(attractor), complex(repeller)


# ---------------------------------------------------------------------------
# jump map


def jump_data(orbit: SingularOrbit, model: Optional[ModelFunctions] = None) -> JumpData:
    model = model or default_model()
    return JumpData.from_orbit(orbit, model.u_F, model.u_J)


def jump_linear(P: complex, V: complex, lam: complex, jd: JumpData,
                model: Optional[ModelFunctions] = None,
                u: Optional[float] = None) -> Tuple[complex, complex]:
    """Transport (P, V) from the fold to u (default: the jump-on point)."""
    model = model or default_model()
    u = jd.u_J if u is None else u
    base = jd.c * jd.u_F - jd.p_F
    shear = (model.R(u) - model.R(jd.u_F) - lam * (u - jd.u_F)) / base
    return P + V * shear, V * (jd.c * u - jd.p_F) / base


def jump_projective(s0: complex, lam: complex, jd: JumpData,
                    model: Optional[ModelFunctions] = None,
                    u: Optional[float] = None,
                    u_from: Optional[float] = None) -> complex:
    """Closed-form projective jump s(u) with s(u_from) = s0 (u_from defaults to u_F)."""
    model = model or default_model()
    u = jd.u_J if u is None else u
    a = jd.u_F if u_from is None else u_from
    numerator = (
        model.R(u) - model.R(a) - lam * (u - a) + s0 * (jd.c * a - jd.p_F)
    )
    return complex(numerator / (jd.c * u - jd.p_F))


def fiber_transport(s0: complex, lam: complex, jd: JumpData,
                    model: Optional[ModelFunctions] = None,
                    tol: Optional[Tolerances] = None, offset: float = 0.0) -> complex:
    """Integrate ds/du = (R'(u) - lam - c s)/(c u - p_F) from u_F to u_J."""
    model = model or default_model()
    tol = tol or Tolerances()

    def fun(u, y):
        return np.array([(model.dR(u) - lam - jd.c * y[0]) / (jd.c * u - jd.p_F)])

    sol = integrate(fun, (jd.u_F + offset, jd.u_J), np.array([complex(s0)]), tol)
    return complex(sol.y[0, -1])


# ---------------------------------------------------------------------------
# chart riding


def _complex_charts(path: SlowPath, lam: complex, c: float, model: ModelFunctions):
    D, dR = model.D, model.dR

    def fun_for(chart):
        if chart == "S":
            def fun(t, y):
                U = path.state_at(t)[0]
                s = y[0]
                return np.array([dR(U) - lam - c * s + D(U) * s * s])
        else:
            def fun(t, y):
                U = path.state_at(t)[0]
                z = y[0]
                return np.array([-(dR(U) - lam) * z * z + c * z - D(U)])
        return fun

    def magnitude(y):
        return abs(y[0])

    def switch(y):
        return np.array([1.0 / y[0]])

    return fun_for, magnitude, switch


def _real_charts(path: SlowPath, mu: float, omega: float, c: float,
                 model: ModelFunctions):
    def fun_for(chart):
        if chart == "S":
            return lambda t, y: xy_rhs(path.state_at(t)[0], y[0], y[1], mu, omega, c,
                                       model)
        return lambda t, y: st_rhs(path.state_at(t)[0], y[0], y[1], mu, omega, c, model)

    def magnitude(y):
        return math.hypot(y[0], y[1])

    def switch(y):
        r2 = y[0] * y[0] + y[1] * y[1]
        return np.array([y[0] / r2, -y[1] / r2])

    return fun_for, magnitude, switch


@dataclass
class _Ride:
    chart: str
    y: np.ndarray
    switches: int
    pieces: List[Tuple[str, object, float, float]] = field(default_factory=list)


def _ride(charts, tau0: float, tau1: float, chart: str, y0: np.ndarray,
          tol: Tolerances, threshold: float, dense: bool = False) -> _Ride:
    fun_for, magnitude, switch = charts
    t, y, switches = tau0, np.asarray(y0), 0
    pieces = []
    leave = event(lambda t, y: magnitude(y) - threshold, direction=1)
    while True:
        sol = integrate(fun_for(chart), (t, tau1), y, tol, events=[leave],
                        dense_output=dense)
        hit = first_event(sol, 0)
        end = hit[0] if hit is not None else tau1
        if dense:
            pieces.append((chart, sol.sol, t, end))
        if hit is None:
            y = sol.y[:, -1]
            break
        t, y = hit[0], switch(hit[1])
        chart = "T" if chart == "S" else "S"
        switches += 1
        if switches > MAX_CHART_SWITCHES:
            raise ShootingError("projective solution keeps switching charts")
        if abs(t - tau1) <= 1e-14 * max(1.0, abs(tau1)):
            break
    return _Ride(chart=chart, y=np.asarray(y), switches=switches, pieces=pieces)


def _chart_for(value: complex, threshold: float) -> Tuple[str, complex]:
    if abs(value) <= threshold:
        return "S", complex(value)
    return "T", complex(1.0 / value)


def _homogeneous(chart: str, value: complex) -> Tuple[complex, complex]:
    return (value, 1.0) if chart == "S" else (1.0, value)


def _from_homogeneous(P: complex, V: complex, threshold: float) -> Tuple[str, complex]:
    if abs(P) <= threshold * abs(V):
        return "S", complex(P / V)
    return "T", complex(V / P)


def transport_projective(lam: complex, path: SlowPath, c: float,
                         tau_span: Tuple[float, float], s0: complex,
                         settings: Optional[EvansSettings] = None,
                         model: Optional[ModelFunctions] = None) -> Tuple[complex, complex]:
    """Carry the class of (s0 : 1) along ``path``; returns a homogeneous (P, V)."""
    settings = _settings(settings)
    model = model or default_model()
    chart, value = _chart_for(complex(s0), settings.chart_threshold)
    ride = _ride(_complex_charts(path, complex(lam), c, model), tau_span[0], tau_span[1],
                 chart, np.array([value]), settings.tol, settings.chart_threshold)
    return _homogeneous(ride.chart, complex(ride.y[0]))


def section_time(orbit: SingularOrbit, sigma: float) -> float:
    """tau on the right segment where U = sigma."""
    right = orbit.right_segment
    if not right.U[0] < sigma < right.U[-1]:
        raise ValueError(f"section U={sigma} is not crossed by the right segment")
    return float(
        optimize.brentq(lambda t: right.state_at(t)[0] - sigma, 0.0, right.tau_max,
                        xtol=1e-14)
    )


def _unstable_point(lam, orbit, settings, model) -> RiccatiPoint:
    c = orbit.c0
    left, right = orbit.left_segment, orbit.right_segment
    jd = jump_data(orbit, model)
    threshold = settings.chart_threshold

    U0, _ = left.state_at(left.tau_min)
    attractor, _ = frozen_fixed_points(float(U0), lam, c, model)
    chart, value = _chart_for(attractor, threshold)
    charts = _complex_charts(left, lam, c, model)
    ride = _ride(charts, left.tau_min, 0.0, chart, np.array([value]), settings.tol,
                 threshold)

    P, V = _homogeneous(ride.chart, complex(ride.y[0]))
    P, V = jump_linear(P, V, lam, jd, model)
    chart, value = _from_homogeneous(P, V, threshold)

    tau_sigma = section_time(orbit, settings.sigma)
    charts = _complex_charts(right, lam, c, model)
    ride2 = _ride(charts, 0.0, tau_sigma, chart, np.array([value]), settings.tol,
                  threshold)
    U, Pb = right.state_at(tau_sigma)
    return RiccatiPoint(chart=ride2.chart, value=complex(ride2.y[0]),
                        base=SlowState(float(U), float(Pb)),
                        wind_hint=ride.switches + ride2.switches)


def _stable_point(lam, orbit, settings, model) -> RiccatiPoint:
    c = orbit.c0
    right = orbit.right_segment
    threshold = settings.chart_threshold
    U1, _ = right.state_at(right.tau_max)
    _, repeller = frozen_fixed_points(float(U1), lam, c, model)
    chart, value = _chart_for(repeller, threshold)
    tau_sigma = section_time(orbit, settings.sigma)
    charts = _complex_charts(right, lam, c, model)
    ride = _ride(charts, right.tau_max, tau_sigma, chart, np.array([value]),
                 settings.tol, threshold)
    U, Pb = right.state_at(tau_sigma)
    return RiccatiPoint(chart=ride.chart, value=complex(ride.y[0]),
                        base=SlowState(float(U), float(Pb)), wind_hint=ride.switches)


def shoot_section(lam: complex, side: str, orbit: SingularOrbit,
                  settings: Optional[EvansSettings] = None,
                  model: Optional[ModelFunctions] = None) -> complex:
    """Value on chart S at the section U = sigma of the unstable or stable solution.

    Raises:
        SectionAtInfinityError: the hit lies at S = infinity (a pole of E)
    """
    settings = _settings(settings)
    model = model or default_model()
    lam = complex(lam)
    if side == "unstable":
        point = _unstable_point(lam, orbit, settings, model)
    elif side == "stable":
        point = _stable_point(lam, orbit, settings, model)
    else:
        raise ValueError(f"unknown side: {side}")
    if point.chart == "S":
        return point.value
    if abs(point.value) < POLE_TOLERANCE:
        raise SectionAtInfinityError(
            f"section hit at infinity for lambda={lam}; perturb lambda or move the section"
        )
    return 1.0 / point.value


def riccati_evans(lam: complex, orbit: SingularOrbit,
                  settings: Optional[EvansSettings] = None,
                  model: Optional[ModelFunctions] = None) -> EvansSample:
    """E(lam) = s1 - u0 on the section U = sigma."""
    u0 = shoot_section(lam, "unstable", orbit, settings, model)
    s1 = shoot_section(lam, "stable", orbit, settings, model)
    return EvansSample(lam=complex(lam), value=s1 - u0, left_hit=u0, right_hit=s1)


def _evans_value(lam: complex, orbit: SingularOrbit, settings: EvansSettings,
                 model: ModelFunctions) -> complex:
    try:
        return riccati_evans(lam, orbit, settings, model).value
    except SectionAtInfinityError:
        return complex(np.inf)


def evaluate_many(lams: Sequence[complex], orbit: SingularOrbit,
                  settings: Optional[EvansSettings] = None,
                  model: Optional[ModelFunctions] = None,
                  workers: int = 1) -> List[complex]:
    """E at many lambdas; poles on the section come back as infinity."""
    settings = _settings(settings)
    model = model or default_model()
    task = partial(_evans_value, orbit=orbit, settings=settings, model=model)
    lams = list(lams)
    if workers > 1 and len(lams) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(task, lams))
    return [task(lam) for lam in lams]


def winding_result(contour: SpectralContour, orbit: SingularOrbit,
                   settings: Optional[EvansSettings] = None,
                   model: Optional[ModelFunctions] = None,
                   workers: int = 1) -> WindingResult:
    def many(lams):
        return evaluate_many(lams, orbit, settings, model, workers)

    return winding_number(lambda lam: many([lam])[0], contour, evaluate_many=many)


def winding(contour: SpectralContour, orbit: SingularOrbit,
            settings: Optional[EvansSettings] = None,
            model: Optional[ModelFunctions] = None, workers: int = 1) -> int:
    """Zeros minus poles of E inside ``contour``."""
    return winding_result(contour, orbit, settings, model, workers).winding


# ---------------------------------------------------------------------------
# real axis


@dataclass
class RealSpectrumScan:
    eigenvalues: List[float]
    poles: List[float]
    samples: List[Tuple[float, float]]
    pole_windings: List[Optional[int]] = field(default_factory=list)


def find_real_eigenvalues(interval: Tuple[float, float], orbit: SingularOrbit,
                          step: float = 0.005,
                          settings: Optional[EvansSettings] = None,
                          model: Optional[ModelFunctions] = None,
                          confirm_poles: bool = True, workers: int = 1,
                          xtol: float = 1e-10) -> RealSpectrumScan:
    """Sign-change scan of the real E on a grid, refined by bisection.

    A bracketed root where |E| is large (|E| > 1e3 at the interval midpoint
    or |E| > 1 at the converged point) is recorded as a pole.
    """
    settings = _settings(settings)
    model = model or default_model()
    a, b = interval
    if a <= float(model.dR(0.0)):
        raise ValueError(f"scan must start right of R'(0) = {float(model.dR(0.0))}")
    if b <= a or step <= 0:
        raise ValueError(f"invalid scan interval {interval} / step {step}")

    grid = np.linspace(a, b, int(round((b - a) / step)) + 1)
    values = [complex(v).real for v in evaluate_many(grid, orbit, settings, model,
                                                     workers)]

    def real_evans(lam):
        value = _evans_value(lam, orbit, settings, model)
        return value.real if np.isfinite(value) else math.inf

    eigenvalues, poles = [], []
    for i in range(len(grid) - 1):
        lo, hi = float(grid[i]), float(grid[i + 1])
        f_lo, f_hi = values[i], values[i + 1]
        if f_lo == 0:
            eigenvalues.append(lo)
            continue
        if math.isinf(f_lo) or math.isinf(f_hi) or f_lo * f_hi > 0:
            if math.isinf(f_lo):
                poles.append(lo)
            continue
        root = optimize.bisect(real_evans, lo, hi, xtol=xtol, maxiter=200)
        at_root = abs(real_evans(root))
        at_mid = abs(real_evans(0.5 * (lo + hi)))
        if at_root > 1.0 or (at_mid > 1e3 and at_root > 1e-3):
            poles.append(float(root))
            logger.debug("pole near %.10f (|E|=%.3g)", root, at_root)
        else:
            eigenvalues.append(float(root))
            logger.debug("eigenvalue %.10f (|E|=%.3g)", root, at_root)

    pole_windings: List[Optional[int]] = []
    if confirm_poles:
        for pole in poles:
            circle = SpectralContour.circle(pole, 0.03)
            try:
                pole_windings.append(winding(circle, orbit, settings, model, workers))
            except Exception as e:
                logger.warning("could not confirm pole %.6f: %s", pole, e)
                pole_windings.append(None)
    return RealSpectrumScan(
        eigenvalues=sorted(eigenvalues),
        poles=sorted(poles),
        samples=list(zip(grid.tolist(), values)),
        pole_windings=pole_windings,
    )


# ---------------------------------------------------------------------------
# dense paths


@dataclass
class ProjectivePath:
    """Unstable reduced solution as homogeneous (P, V) samples against U.

    U is ascending: left segment, jump graph on [u_F, u_J], right segment.
    """
    U: np.ndarray
    hom: np.ndarray  # shape (N, 2)
    segment: np.ndarray  # 0 left, 1 jump graph, 2 right

    def at(self, u: float) -> np.ndarray:
        """Homogeneous direction at u by interpolation in a well-conditioned chart."""
        i = int(np.clip(np.searchsorted(self.U, u) - 1, 0, len(self.U) - 2))
        u0, u1 = self.U[i], self.U[i + 1]
        w = 0.0 if u1 == u0 else (u - u0) / (u1 - u0)
        h0, h1 = self.hom[i], self.hom[i + 1]
        if abs(h0[1]) >= abs(h0[0]) and abs(h1[1]) > 0:
            s = (1 - w) * h0[0] / h0[1] + w * h1[0] / h1[1]
            return np.array([s, 1.0], dtype=complex)
        t = (1 - w) * h0[1] / h0[0] + w * h1[1] / h1[0]
        return np.array([1.0, t], dtype=complex)

    def ratio(self) -> np.ndarray:
        """S = P/V at the samples (inf where V = 0)."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.hom[:, 0] / self.hom[:, 1]


def _sample_pieces(pieces, path: SlowPath, per_piece: int) -> Tuple[np.ndarray, np.ndarray]:
    Us, homs = [], []
    for chart, sol, t0, t1 in pieces:
        ts = np.linspace(t0, t1, per_piece)
        values = sol(ts)[0]
        Us.append(path.state_at(ts)[0])
        if chart == "S":
            homs.append(np.column_stack([values, np.ones_like(values)]))
        else:
            homs.append(np.column_stack([np.ones_like(values), values]))
    return np.concatenate(Us), np.concatenate(homs)


def riccati_path(lam: complex, orbit: SingularOrbit,
                 settings: Optional[EvansSettings] = None,
                 model: Optional[ModelFunctions] = None,
                 per_piece: int = 400, jump_samples: int = 101) -> ProjectivePath:
    """Dense unstable reduced solution from Z- through the jump to U = sigma."""
    settings = _settings(settings)
    model = model or default_model()
    lam = complex(lam)
    c = orbit.c0
    left, right = orbit.left_segment, orbit.right_segment
    jd = jump_data(orbit, model)
    threshold = settings.chart_threshold

    U0, _ = left.state_at(left.tau_min)
    attractor, _ = frozen_fixed_points(float(U0), lam, c, model)
    chart, value = _chart_for(attractor, threshold)
    ride = _ride(_complex_charts(left, lam, c, model), left.tau_min, 0.0, chart,
                 np.array([value]), settings.tol, threshold, dense=True)
    U_left, hom_left = _sample_pieces(ride.pieces, left, per_piece)

    P, V = _homogeneous(ride.chart, complex(ride.y[0]))
    us = np.linspace(jd.u_F, jd.u_J, jump_samples)
    hom_jump = np.array([jump_linear(P, V, lam, jd, model, u=u) for u in us])

    Pj, Vj = hom_jump[-1]
    chart, value = _from_homogeneous(Pj, Vj, threshold)
    tau_sigma = section_time(orbit, settings.sigma)
    ride2 = _ride(_complex_charts(right, lam, c, model), 0.0, tau_sigma, chart,
                  np.array([value]), settings.tol, threshold, dense=True)
    U_right, hom_right = _sample_pieces(ride2.pieces, right, per_piece)

    U = np.concatenate([U_left, us, U_right])
    hom = np.concatenate([hom_left, hom_jump, hom_right])
    segment = np.concatenate(
        [np.zeros(len(U_left)), np.ones(len(us)), 2 * np.ones(len(U_right))]
    ).astype(int)
    order = np.argsort(U, kind="stable")
    U, hom, segment = U[order], hom[order], segment[order]
    keep = np.concatenate([[True], np.diff(U) > 0])
    return ProjectivePath(U=U[keep], hom=hom[keep], segment=segment[keep])


@dataclass
class XYTrajectory:
    """Real/imaginary split of the unstable reduced solution.

    X, Y are the real and imaginary parts of S; s, t those of T = 1/S.
    """
    tau: np.ndarray
    U: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    s: np.ndarray
    t: np.ndarray
    chart: np.ndarray
    jump_before: complex
    jump_after: complex


def xy_flow(lam: complex, orbit: SingularOrbit,
            settings: Optional[EvansSettings] = None,
            model: Optional[ModelFunctions] = None,
            per_piece: int = 200) -> XYTrajectory:
    """Integrate the real split (X, Y) / (s, t) charts along the singular orbit."""
    settings = _settings(settings)
    model = model or default_model()
    lam = complex(lam)
    mu, omega = lam.real, lam.imag
    c = orbit.c0
    left, right = orbit.left_segment, orbit.right_segment
    jd = jump_data(orbit, model)
    threshold = settings.chart_threshold

    U0, _ = left.state_at(left.tau_min)
    attractor, _ = frozen_fixed_points(float(U0), lam, c, model)
    chart, value = _chart_for(attractor, threshold)
    ride = _ride(_real_charts(left, mu, omega, c, model), left.tau_min, 0.0, chart,
                 np.array([value.real, value.imag]), settings.tol, threshold,
                 dense=True)
    before = complex(ride.y[0], ride.y[1])
    P, V = _homogeneous(ride.chart, before)
    P, V = jump_linear(P, V, lam, jd, model)
    chart, value = _from_homogeneous(P, V, threshold)
    after = complex(P / V) if V != 0 else complex(np.inf)
    s_before = before if ride.chart == "S" else 1.0 / before

    tau_sigma = section_time(orbit, settings.sigma)
    ride2 = _ride(_real_charts(right, mu, omega, c, model), 0.0, tau_sigma, chart,
                  np.array([value.real, value.imag]), settings.tol, threshold,
                  dense=True)

    taus, Us, Xs, Ys, ss, ts, charts = [], [], [], [], [], [], []
    for path, pieces in ((left, ride.pieces), (right, ride2.pieces)):
        for piece_chart, sol, t0, t1 in pieces:
            grid = np.linspace(t0, t1, per_piece)
            a, b = sol(grid)
            r2 = a * a + b * b
            with np.errstate(divide="ignore", invalid="ignore"):
                if piece_chart == "S":
                    X, Y, s, t = a, b, a / r2, -b / r2
                else:
                    X, Y, s, t = a / r2, -b / r2, a, b
            taus.append(grid)
            Us.append(path.state_at(grid)[0])
            Xs.append(X)
            Ys.append(Y)
            ss.append(s)
            ts.append(t)
            charts.append(np.full(len(grid), piece_chart))
    return XYTrajectory(
        tau=np.concatenate(taus), U=np.concatenate(Us), X=np.concatenate(Xs),
        Y=np.concatenate(Ys), s=np.concatenate(ss), t=np.concatenate(ts),
        chart=np.concatenate(charts), jump_before=s_before, jump_after=after,
    )


# ---------------------------------------------------------------------------
# eigenfunctions and the Sturm-Liouville residual


@dataclass
class SlowEigenfunction:
    tau: np.ndarray
    P: np.ndarray
    V: np.ndarray
    lam: complex


def _linear_fun(path: SlowPath, lam: complex, c: float, model: ModelFunctions):
    D, dR = model.D, model.dR

    def fun(t, y):
        U = path.state_at(t)[0]
        return np.array([(dR(U) - lam) * y[1], c * y[1] - D(U) * y[0]])

    return fun


def integrate_linear(lam: complex, path: SlowPath, y0, tau_span: Tuple[float, float],
                     c: float, settings: Optional[EvansSettings] = None,
                     model: Optional[ModelFunctions] = None, t_eval=None):
    """Integrate (P, V) of the desingularized linear system along one slow segment."""
    settings = _settings(settings)
    model = model or default_model()
    return integrate(_linear_fun(path, complex(lam), c, model), tau_span,
                     np.asarray(y0, dtype=complex), settings.tol, t_eval=t_eval)


def slow_eigenfunction(lam: complex, orbit: SingularOrbit,
                       settings: Optional[EvansSettings] = None,
                       model: Optional[ModelFunctions] = None, samples: int = 2000,
                       gap: float = 1e-6) -> SlowEigenfunction:
    """Unstable linear solution on both slow segments; tau = 0 is excluded."""
    settings = _settings(settings)
    model = model or default_model()
    lam = complex(lam)
    c = orbit.c0
    left, right = orbit.left_segment, orbit.right_segment
    jd = jump_data(orbit, model)

    U0, _ = left.state_at(left.tau_min)
    attractor, _ = frozen_fixed_points(float(U0), lam, c, model)
    grid_left = np.linspace(left.tau_min, -gap, samples)
    sol_left = integrate_linear(lam, left, [attractor, 1.0], (left.tau_min, 0.0), c,
                                settings, model,
                                t_eval=np.append(grid_left, 0.0))
    P_F, V_F = sol_left.y[:, -1]
    P_J, V_J = jump_linear(P_F, V_F, lam, jd, model)
    grid_right = np.linspace(gap, right.tau_max, samples)
    sol_right = integrate_linear(lam, right, [P_J, V_J], (0.0, right.tau_max), c,
                                 settings, model, t_eval=np.insert(grid_right, 0, 0.0))
    return SlowEigenfunction(
        tau=np.concatenate([grid_left, grid_right]),
        P=np.concatenate([sol_left.y[0, :-1], sol_right.y[0, 1:]]),
        V=np.concatenate([sol_left.y[1, :-1], sol_right.y[1, 1:]]),
        lam=lam,
    )


def _spline(tau, values):
    re = CubicSpline(tau, np.real(values))
    im = CubicSpline(tau, np.imag(values))
    return re, im


def _segment_residual(tau, V, lam, path: SlowPath, c, model, d_margin) -> float:
    U, P = path.state_at(tau)
    d = model.D(U)
    keep = d > d_margin
    if np.count_nonzero(keep) < 8:
        return 0.0
    re, im = _spline(tau, V)
    dV = re.derivative()(tau) + 1j * im.derivative()(tau)
    w = np.exp(-c * tau) * dV / d
    w_re, w_im = _spline(tau, w)
    dw = w_re.derivative()(tau) + 1j * w_im.derivative()(tau)
    q = model.dR(U) + c * model.dD(U) * (c * U - P) / d**2
    residual = np.exp(c * tau) * dw + q * V - lam * V
    interior = keep.copy()
    interior[:3] = False
    interior[-3:] = False
    scale = float(np.max(np.abs(V)))
    return float(np.max(np.abs(residual[interior]))) / scale


def sl_residual(lam: complex, tau: np.ndarray, V: np.ndarray, orbit: SingularOrbit,
                model: Optional[ModelFunctions] = None,
                d_margin: float = D_MARGIN) -> float:
    """Max-norm residual of the Sturm-Liouville form, relative to max |V|.

    e^{c tau} d/dtau(e^{-c tau} V'/D) + Q V - lam V with
    Q = R' + c D' U'/D^2, on each slow segment where D > d_margin.

    Raises:
        GridError: the grid contains tau = 0
    """
    model = model or default_model()
    tau = np.asarray(tau, dtype=float)
    V = np.asarray(V, dtype=complex)
    if np.any(tau == 0.0):
        raise GridError("residual grid contains the jump point tau = 0")
    c = orbit.c0
    worst = 0.0
    for mask, path in ((tau < 0, orbit.left_segment), (tau > 0, orbit.right_segment)):
        if np.count_nonzero(mask) >= 8:
            worst = max(worst, _segment_residual(tau[mask], V[mask], complex(lam),
                                                 path, c, model, d_margin))
    return worst


def sl_weight(tau: np.ndarray, orbit: SingularOrbit,
              model: Optional[ModelFunctions] = None) -> np.ndarray:
    """Weight e^{-c tau}/D(U) on the slow segments (tau != 0)."""
    model = model or default_model()
    tau = np.asarray(tau, dtype=float)
    out = np.empty_like(tau)
    for mask, path in ((tau < 0, orbit.left_segment), (tau > 0, orbit.right_segment)):
        if np.any(mask):
            U, _ = path.state_at(tau[mask])
            out[mask] = np.exp(-orbit.c0 * tau[mask]) / model.D(U)
    return out
