"""Travelling-wave construction.

The singular orbit is built in desingularized slow time (U, P) by shooting
from both saddles to the fold / jump-on lines and matching P. For eps > 0 the
wave of the full system (u, p, v) is found by forward shooting from z- with a
bisection on c followed by a Newton correction that lands the trajectory in
the linear stable eigenplane of z+.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import optimize

from .exceptions import HierarchyError, ModelError, ShootingError
from .models import SingularOrbit, SlowPath, Tolerances, WaveProfile
from .polynomials import ModelFunctions, default_model
from .utils.odes import event, first_event, integrate

logger = logging.getLogger(__name__)

SYSTEMS = ("layer", "reduced", "desingularized", "full_fast", "full_slow")

DEFAULT_C_BRACKET = (0.19, 0.23)
EPS_C_BRACKET = (0.17, 0.25)
SIGMA_FULL = 0.7
TAKE_OFF = 1e-8
LANDING_RADIUS = 1e-5
HIERARCHY_RATIO = 10.0


@dataclass
class SaddleFrame:
    """Eigen-data of an end state, eigenvalues ascending in real part."""
    endpoint: str
    point: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns

    def vector(self, index: int) -> np.ndarray:
        return self.eigenvectors[:, index]


@dataclass
class HypothesisReport:
    """Numerical check of monotonicity and transversality of the singular orbit."""
    monotone: bool
    min_speed: float
    dm_dc: float
    defect: float

    @property
    def transversal(self) -> bool:
        return self.dm_dc != 0.0 and math.isfinite(self.dm_dc)


@dataclass
class LayerTrajectory:
    """Fast fiber u' = (v - F(u))/c with frozen (p, v)."""
    xi: np.ndarray
    states: np.ndarray
    target: float
    sol: object = field(repr=False)
    c: float = 0.0


def _state_array(state) -> np.ndarray:
    if hasattr(state, "as_array"):
        return state.as_array()
    return np.asarray(state, dtype=float)


def rhs(state, c: float, eps: float = 0.0, system: str = "desingularized",
        model: Optional[ModelFunctions] = None) -> np.ndarray:
    """Right-hand side of one of the travelling-wave systems.

    Args:
        state: (U, P) for the slow flows, (u, p, v) for the others
        c: wavespeed
        eps: timescale ratio (ignored by the eps = 0 systems)
        system: layer | reduced | desingularized | full_fast | full_slow
        model: model functions, the shipped model by default

    Raises:
        ModelError: reduced flow evaluated at a fold, or full_slow with eps = 0
    """
    model = model or default_model()
    y = _state_array(state)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if system == "layer":
        u, p, v = y
        return np.array([(v - model.F(u)) / c, 0.0, 0.0])
    if system == "reduced":
        U, P = y[:2]
        d = model.reduced_rhs_guard(U)
        return np.array([(c * U - P) / d, model.R(U)])
    if system == "desingularized":
        U, P = y[:2]
        return np.array([c * U - P, model.R(U) * model.D(U)])
    if system == "full_fast":
        u, p, v = y
        return np.array([(v - model.F(u)) / c, eps * model.R(u), eps * (c * u - p)])
    if system == "full_slow":
        if eps <= 0:
            raise ModelError("full_slow requires eps > 0")
        U, P, V = y
        return np.array([(V - model.F(U)) / (c * eps), model.R(U), c * U - P])
    raise ValueError(f"unknown system: {system}")


def fast_jacobian(u: float, c: float, eps: float, model: ModelFunctions,
                  lam: complex = 0.0) -> np.ndarray:
    """Jacobian of the fast system (lam = 0) or the fast eigenvalue matrix."""
    d = model.D(u)
    dtype = complex if lam != 0 else float
    return np.array(
        [
            [-(d + eps * lam) / c, 0.0, 1.0 / c],
            [eps * (model.dR(u) - lam), 0.0, 0.0],
            [eps * c, -eps, 0.0],
        ],
        dtype=dtype,
    )


def _sup_normalize(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec)))
    return vec / vec[k]


def saddle_frame(endpoint: str, c: float, eps: float,
                 model: Optional[ModelFunctions] = None) -> SaddleFrame:
    """Eigenvalues and eigenvectors at z- (endpoint='minus') or z+ ('plus').

    For eps = 0 the 2x2 saddle data of the desingularized slow flow at
    Z- = (0, 0) or Z+ = (1, c) is returned.
    """
    model = model or default_model()
    if c <= 0:
        raise ValueError("wavespeed must be positive")
    if not 0 <= eps <= 0.1:
        raise ValueError("saddle_frame expects 0 <= eps <= 0.1")
    if endpoint not in ("minus", "plus"):
        raise ValueError(f"unknown endpoint: {endpoint}")
    u = 0.0 if endpoint == "minus" else 1.0

    if eps == 0:
        jac = np.array([[c, -1.0], [model.dRD(u), 0.0]])
        point = np.array([u, c * u])
    else:
        jac = fast_jacobian(u, c, eps, model)
        point = np.array([u, c * u, model.F(u)])

    values, vectors = np.linalg.eig(jac)
    order = np.argsort(values.real)
    values = values[order]
    vectors = np.column_stack([_sup_normalize(vectors[:, k]) for k in order])
    if np.all(np.abs(values.imag) < 1e-14):
        values, vectors = values.real, vectors.real

    if eps > 0:
        mu_f, mu_s1, mu_s2 = values.real
        slow = max(abs(values[1]), abs(values[2]))
        if not (mu_f < mu_s1 < 0 < mu_s2) or abs(values[0]) < HIERARCHY_RATIO * slow:
            raise HierarchyError(
                f"eigenvalue hierarchy violated at {endpoint} for eps={eps:g}: "
                f"{values}; eps is too large"
            )
    return SaddleFrame(endpoint=endpoint, point=point, eigenvalues=values,
                       eigenvectors=vectors)


def _desing_fun(c: float, model: ModelFunctions):
    R, D = model.R, model.D

    def fun(t, y):
        U, P = y
        return np.array([c * U - P, R(U) * D(U)])

    return fun


def _left_leg(c, model, tol, offset, dense=False):
    frame = saddle_frame("minus", c, 0.0, model)
    e_u = frame.vector(1)
    e_u = e_u if e_u[0] > 0 else -e_u
    y0 = frame.point + offset * e_u / np.max(np.abs(e_u))

    fold = event(lambda t, y: y[0] - model.u_F, direction=1)
    stall = event(lambda t, y: c * y[0] - y[1], direction=-1)
    sol = integrate(_desing_fun(c, model), (0.0, 500.0), y0, tol,
                    events=[fold, stall], dense_output=dense)
    hit = first_event(sol, 0)
    if hit is None:
        raise ShootingError(f"left slow segment does not reach the fold at c={c:.10g}")
    return sol, hit


def _right_leg(c, model, tol, offset, dense=False):
    frame = saddle_frame("plus", c, 0.0, model)
    e_s = frame.vector(0)
    e_s = e_s if e_s[0] < 0 else -e_s
    y0 = frame.point + offset * e_s / np.max(np.abs(e_s))

    jump = event(lambda t, y: y[0] - model.u_J)
    stall = event(lambda t, y: c * y[0] - y[1])
    sol = integrate(_desing_fun(c, model), (0.0, -500.0), y0, tol,
                    events=[jump, stall], dense_output=dense)
    hit = first_event(sol, 0)
    if hit is None:
        raise ShootingError(
            f"right slow segment does not reach the jump-on line at c={c:.10g}"
        )
    return sol, hit


def matching_defect(c: float, model: Optional[ModelFunctions] = None,
                    tol: Optional[Tolerances] = None, offset: float = TAKE_OFF) -> float:
    """m(c) = P at the fold (from Z-) minus P at the jump-on line (from Z+)."""
    model = model or default_model()
    tol = tol or Tolerances()
    _, (_, y_fold) = _left_leg(c, model, tol, offset)
    _, (_, y_jump) = _right_leg(c, model, tol, offset)
    return float(y_fold[1] - y_jump[1])


def build_singular_orbit(c: float, model: Optional[ModelFunctions] = None,
                         tol: Optional[Tolerances] = None,
                         offset: float = TAKE_OFF) -> SingularOrbit:
    """Integrate both slow segments at wavespeed c with dense output."""
    model = model or default_model()
    tol = tol or Tolerances()
    left, (t_fold, y_fold) = _left_leg(c, model, tol, offset, dense=True)
    right, (t_jump, y_jump) = _right_leg(c, model, tol, offset, dense=True)

    left_path = SlowPath(
        tau=left.t - t_fold, U=left.y[0], P=left.y[1], sol=left.sol, t_shift=t_fold
    )
    right_path = SlowPath(
        tau=(right.t - t_jump)[::-1],
        U=right.y[0][::-1],
        P=right.y[1][::-1],
        sol=right.sol,
        t_shift=t_jump,
    )
    return SingularOrbit(
        left_segment=left_path,
        jump_fiber=np.linspace(model.u_F, model.u_J, 101),
        right_segment=right_path,
        c0=c,
        p_F=float(y_fold[1]),
        v_F=model.v_F,
        p_J=float(y_jump[1]),
        defect=float(y_fold[1] - y_jump[1]),
    )


def find_c0(bracket: Tuple[float, float] = DEFAULT_C_BRACKET,
            model: Optional[ModelFunctions] = None, tol: Optional[Tolerances] = None,
            offset: float = TAKE_OFF) -> SingularOrbit:
    """Locate the singular wavespeed c0 as the root of the matching defect.

    Bisection to 1e-6 followed by a secant polish.

    Raises:
        ShootingError: no sign change of the defect over the bracket
    """
    model = model or default_model()
    tol = tol or Tolerances()
    lo, hi = bracket
    if not 0 < lo < hi:
        raise ValueError(f"invalid wavespeed bracket: {bracket}")

    def defect(c):
        return matching_defect(c, model, tol, offset)

    m_lo, m_hi = defect(lo), defect(hi)
    if m_lo * m_hi > 0:
        raise ShootingError(
            f"no transversal connection in bracket [{lo}, {hi}] "
            f"(m={m_lo:.3g}, {m_hi:.3g})"
        )
    c_rough = optimize.bisect(defect, lo, hi, xtol=1e-6)
    c0 = optimize.newton(defect, c_rough, x1=c_rough + 1e-7, tol=1e-15, maxiter=50)
    orbit = build_singular_orbit(float(c0), model, tol, offset)
    logger.info("singular wavespeed c0=%.12f, defect %.3g", orbit.c0, orbit.defect)
    if abs(orbit.defect) > 1e-9:
        raise ShootingError(
            f"secant polish stalled at c={c0:.12g}", residual=abs(orbit.defect)
        )
    return orbit


def check_hypotheses(orbit: SingularOrbit, model: Optional[ModelFunctions] = None,
                     tol: Optional[Tolerances] = None, h: float = 1e-5) -> HypothesisReport:
    """Monotonicity of U along both slow segments and transversality in c."""
    model = model or default_model()
    tol = tol or Tolerances()
    c = orbit.c0
    speeds = np.concatenate(
        [orbit.left_segment.dU(c)[1:], orbit.right_segment.dU(c)[:-1]]
    )
    min_speed = float(np.min(speeds))
    dm_dc = (matching_defect(c + h, model, tol) - matching_defect(c - h, model, tol)) / (
        2 * h
    )
    return HypothesisReport(
        monotone=min_speed > 0, min_speed=min_speed, dm_dc=float(dm_dc),
        defect=orbit.defect,
    )


def layer_trajectory(u_start: float, p: float, v: float, c: float,
                     model: Optional[ModelFunctions] = None,
                     tol: Optional[Tolerances] = None,
                     approach: float = 1e-9) -> LayerTrajectory:
    """Integrate the layer problem from u_start until it settles on S0.

    The end point is the next root of F(u) = v in the direction of motion;
    integration stops ``approach`` short of it.
    """
    model = model or default_model()
    tol = tol or Tolerances()
    speed = (v - model.F(u_start)) / c
    if speed == 0:
        raise ModelError(f"u={u_start} is already on the critical manifold")

    coeffs = np.array(model._float["F"], dtype=float)
    coeffs[-1] -= v
    roots = np.roots(coeffs)
    real_roots = np.sort(roots[np.abs(roots.imag) < 1e-9].real)
    if speed > 0:
        ahead = real_roots[real_roots > u_start + 1e-12]
        if len(ahead) == 0:
            raise ShootingError("layer trajectory escapes to +infinity")
        target = float(ahead[0])
        stop = event(lambda t, y: y[0] - (target - approach), direction=1)
    else:
        ahead = real_roots[real_roots < u_start - 1e-12]
        if len(ahead) == 0:
            raise ShootingError("layer trajectory escapes to -infinity")
        target = float(ahead[-1])
        stop = event(lambda t, y: y[0] - (target + approach), direction=-1)

    def fun(t, y):
        return np.array([(y[2] - model.F(y[0])) / c, 0.0, 0.0])

    sol = integrate(fun, (0.0, 1e9), [u_start, p, v], tol, events=[stop],
                    dense_output=True)
    if first_event(sol, 0) is None:
        raise ShootingError("layer trajectory did not settle")
    return LayerTrajectory(xi=sol.t, states=sol.y.T, target=target, sol=sol.sol, c=c)


# ---------------------------------------------------------------------------
# eps > 0


def _full_fast_fun(c, eps, model):
    F, R, D, dR = model.F, model.R, model.D, model.dR

    def fun(t, y):
        u, p, v = y
        return np.array([(v - F(u)) / c, eps * R(u), eps * (c * u - p)])

    def jac(t, y):
        u = y[0]
        return np.array(
            [[-D(u) / c, 0.0, 1.0 / c], [eps * dR(u), 0.0, 0.0], [eps * c, -eps, 0.0]]
        )

    return fun, jac


def _take_off(c, eps, model, offset):
    frame = saddle_frame("minus", c, eps, model)
    e_u = np.real(frame.vector(2))
    e_u = e_u if e_u[0] > 0 else -e_u
    return frame.point + offset * e_u


@dataclass
class _Shooter:
    eps: float
    model: ModelFunctions
    tol: Tolerances
    method: str
    offset: float
    overshoot: float = 0.05

    @property
    def xi_max(self) -> float:
        return 400.0 / self.eps

    def escape(self, c: float) -> float:
        """+1 when the trajectory from z- overshoots u = 1, -1 when it turns back."""
        fun, jac = _full_fast_fun(c, self.eps, self.model)
        F = self.model.F
        over = event(lambda t, y: y[0] - (1.0 + self.overshoot), direction=1)
        turn = event(lambda t, y: y[2] - F(y[0]), direction=-1)
        sol = integrate(fun, (0.0, self.xi_max), _take_off(c, self.eps, self.model,
                        self.offset), self.tol, events=[over, turn],
                        method=self.method, jac=jac)
        if first_event(sol, 0) is not None:
            return 1.0
        if first_event(sol, 1) is not None:
            return -1.0
        return 1.0 if sol.y[0, -1] > 1.0 else -1.0

    def flight(self, c: float, T: float, dense: bool = False, events=None):
        fun, jac = _full_fast_fun(c, self.eps, self.model)
        return integrate(fun, (0.0, T), _take_off(c, self.eps, self.model, self.offset),
                         self.tol, method=self.method, jac=jac, dense_output=dense,
                         events=events)


def _stable_plane(c, eps, model):
    frame = saddle_frame("plus", c, eps, model)
    e_f = np.real(frame.vector(0))
    e_s = np.real(frame.vector(1))
    return frame, e_f / np.linalg.norm(e_f), e_s / np.linalg.norm(e_s)


def find_c_eps(eps: float, c_guess: Optional[float] = None,
               model: Optional[ModelFunctions] = None,
               tol: Optional[Tolerances] = None, shoot_tol: float = 1e-8,
               method: str = "LSODA", offset: float = TAKE_OFF,
               landing: float = LANDING_RADIUS,
               bracket: Tuple[float, float] = EPS_C_BRACKET,
               max_iter: int = 50) -> Tuple[float, WaveProfile]:
    """Wavespeed c(eps) and wave profile of the full system for 0 < eps <= 0.01.

    The forward trajectory from z- along its unstable eigenvector must land on
    z+ + landing*(cos(theta) e_f + sin(theta) e_s1) after flight time T; Newton
    solves for (c, theta, T) with a 3-component residual.

    Raises:
        ShootingError: no bracketing wavespeed, or Newton did not converge
    """
    model = model or default_model()
    tol = tol or Tolerances()
    if not 0 < eps <= 0.01:
        raise ValueError("find_c_eps requires 0 < eps <= 0.01")
    shooter = _Shooter(eps=eps, model=model, tol=tol, method=method, offset=offset)

    lo, hi = bracket
    if c_guess is not None:
        near = (c_guess - 0.01, c_guess + 0.01)
        if shooter.escape(near[0]) * shooter.escape(near[1]) < 0:
            lo, hi = near
    s_lo, s_hi = shooter.escape(lo), shooter.escape(hi)
    if s_lo * s_hi > 0:
        raise ShootingError(f"no wavespeed in bracket [{lo}, {hi}] for eps={eps:g}")
    c_star = optimize.bisect(shooter.escape, lo, hi, xtol=1e-14, maxiter=200)
    logger.debug("eps=%g: bisection wavespeed %.15f", eps, c_star)

    # initial landing guess from the bisected trajectory
    frame, e_f, e_s = _stable_plane(c_star, eps, model)
    z_plus = frame.point

    arrive = event(lambda t, y: np.linalg.norm(y - z_plus) - landing, direction=-1)
    trial = shooter.flight(c_star, shooter.xi_max, dense=True, events=[arrive])
    hit = first_event(trial, 0)
    if hit is not None:
        T0, y_T = hit
    else:
        k = int(np.argmin(np.linalg.norm(trial.y.T - z_plus, axis=1)))
        T0, y_T = trial.t[k], trial.y[:, k]
        logger.warning("eps=%g: landing sphere missed, closest approach %.3g", eps,
                       np.linalg.norm(y_T - z_plus))
    basis = np.column_stack([e_f, e_s])
    coef, *_ = np.linalg.lstsq(basis, (y_T - z_plus) / landing, rcond=None)
    theta0 = math.atan2(coef[1], coef[0])

    def residual(x):
        c, theta, T = x
        _, ef, es = _stable_plane(c, eps, model)
        target = np.array([1.0, c, model.F(1.0)]) + landing * (
            math.cos(theta) * ef + math.sin(theta) * es
        )
        sol = shooter.flight(c, T)
        return sol.y[:, -1] - target, sol.y[:, -1]

    x = np.array([c_star, theta0, T0])
    r, y_end = residual(x)
    norm = float(np.max(np.abs(r)))
    fun, _ = _full_fast_fun(c_star, eps, model)
    for iteration in range(max_iter):
        if norm < shoot_tol:
            break
        c, theta, T = x
        h_c = 1e-11
        r_c, _ = residual(x + np.array([h_c, 0.0, 0.0]))
        _, ef, es = _stable_plane(c, eps, model)
        fun, _ = _full_fast_fun(c, eps, model)
        jac = np.column_stack(
            [
                (r_c - r) / h_c,
                -landing * (-math.sin(theta) * ef + math.cos(theta) * es),
                fun(T, y_end),
            ]
        )
        step = np.linalg.solve(jac, -r)
        damping = 1.0
        for _ in range(12):
            candidate = x + damping * step
            r_new, y_new = residual(candidate)
            norm_new = float(np.max(np.abs(r_new)))
            if norm_new < norm:
                break
            damping *= 0.5
        x, r, y_end, norm = candidate, r_new, y_new, norm_new
        logger.debug("eps=%g newton %d: c=%.15f residual %.3g", eps, iteration, x[0],
                     norm)
    if norm >= shoot_tol:
        raise ShootingError(
            f"Newton did not converge for eps={eps:g} after {max_iter} iterations",
            residual=norm,
        )

    c, theta, T = x
    profile = _assemble_profile(shooter, c, theta, T, landing, norm)
    logger.info("eps=%g: c(eps)=%.10f", eps, c)
    return float(c), profile


def _assemble_profile(shooter: _Shooter, c: float, theta: float, T: float,
                      landing: float, residual: float) -> WaveProfile:
    eps, model = shooter.eps, shooter.model
    sol = shooter.flight(c, T, dense=True)
    frame, e_f, e_s = _stable_plane(c, eps, model)
    mu_f, mu_s = float(np.real(frame.eigenvalues[0])), float(
        np.real(frame.eigenvalues[1])
    )
    z_plus = frame.point

    def tail(s):
        s = np.atleast_1d(s)
        return z_plus[:, None] + landing * (
            math.cos(theta) * np.exp(mu_f * s)[None, :] * e_f[:, None]
            + math.sin(theta) * np.exp(mu_s * s)[None, :] * e_s[:, None]
        )

    t_tail = math.log(landing / 1e-8) / abs(mu_s)
    s_tail = np.geomspace(1e-3, t_tail, 200)
    grid = np.concatenate([sol.t, T + s_tail])
    states = np.concatenate([sol.y.T, tail(s_tail).T])

    sigma = optimize.brentq(lambda t: sol.sol(t)[0] - SIGMA_FULL, 0.0, T) if (
        sol.y[0, -1] > SIGMA_FULL
    ) else 0.0

    def evaluator(xi):
        xi = np.asarray(xi, dtype=float) + sigma
        scalar = xi.ndim == 0
        xi = np.atleast_1d(xi)
        out = np.empty((3, xi.size))
        inside = xi <= T
        if np.any(inside):
            out[:, inside] = sol.sol(np.clip(xi[inside], 0.0, T))
        if np.any(~inside):
            out[:, ~inside] = tail(xi[~inside] - T)
        return out[:, 0] if scalar else out

    return WaveProfile(
        grid=grid - sigma,
        states=states,
        c=c,
        eps=eps,
        timescale="fast",
        evaluator=evaluator,
        sigma_u=SIGMA_FULL,
        diagnostics={"newton_residual": residual, "flight_time": T, "theta": theta,
                     "landing_radius": landing, "flight_end": T - sigma},
    )


def profile_residual(profile: WaveProfile, model: Optional[ModelFunctions] = None,
                     h: float = 1e-4) -> float:
    """Max centered-difference ODE residual at grid midpoints of the flight part."""
    model = model or default_model()
    flight_end = profile.diagnostics.get("flight_end", profile.grid[-1])
    mids = 0.5 * (profile.grid[1:] + profile.grid[:-1])
    mids = mids[(mids - h > profile.grid[0]) & (mids + h < flight_end)]
    worst = 0.0
    for xi in mids:
        derivative = (profile.state_at(xi + h) - profile.state_at(xi - h)) / (2 * h)
        expected = rhs(profile.state_at(xi), profile.c, profile.eps, "full_fast", model)
        scale = 1.0 + np.max(np.abs(expected))
        worst = max(worst, float(np.max(np.abs(derivative - expected)) / scale))
    return worst
