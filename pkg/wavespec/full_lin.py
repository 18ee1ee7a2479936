"""Linearized eigenvalue problem for eps > 0.

The fast linear system along a wave profile is

    u' = (v - (eps lam + D(u_bar)) u)/c,  p' = eps (R'(u_bar) - lam) u,
    v' = eps (c u - p),

and the slow system is the same divided by eps. This module carries its
projectivization on CP^2 charts, the induced flow of 2-planes in Pluecker
coordinates, the asymptotic eigen-structure at the rest states, the
convergence of projectivized solutions onto the reduced solution as eps
shrinks, the rescaled layer problem across the jump, and a linear toy problem
with an explicit solution for exchange-type angle estimates.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import HierarchyError
from .models import FastState, SingularOrbit, Tolerances, WaveProfile
from .polynomials import ModelFunctions, default_model
from .slow_evans import EvansSettings, jump_data, jump_projective, riccati_path
from .utils.odes import event, first_event, integrate, real_split, to_complex, to_real
from .wave import (
    HIERARCHY_RATIO,
    TAKE_OFF,
    fast_jacobian,
    find_c0,
    find_c_eps,
    layer_trajectory,
    rhs,
    saddle_frame,
)

logger = logging.getLogger(__name__)

CHARTS = ("u0", "p0", "v0")
PLUECKER_PAIRS = ((0, 1), (1, 2), (2, 0))
DEFAULT_EPS_LIST = (1e-2, 3e-3, 1e-3)
JUMP_MARGIN = 0.02
WINDOW_START = 0.05


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True)
class LinState3:
    """Linearized (u, p, v) at a base point of the wave (U, P, V on the slow clock)."""
    u: complex
    p: complex
    v: complex
    base: FastState
    lam: complex
    eps: float
    c: float

    def __post_init__(self):
        if self.eps < 0:
            raise ValueError("eps must be non-negative")
        if self.c <= 0:
            raise ValueError("wavespeed must be positive")

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.p, self.v], dtype=complex)


@dataclass(frozen=True)
class ChartPointCP2:
    """Point of CP^2 on the chart where the named homogeneous coordinate is 1.

    u0: (p/u, v/u), p0: (u/p, v/p), v0: (u/v, p/v).
    """
    chart: str
    coords: Tuple[complex, complex]

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise ValueError(f"unknown chart: {self.chart}")
        coords = tuple(complex(z) for z in self.coords)
        if len(coords) != 2:
            raise ValueError("a CP^2 chart point has two coordinates")
        if not all(math.isfinite(z.real) and math.isfinite(z.imag) for z in coords):
            raise ValueError("chart coordinates must be finite")
        object.__setattr__(self, "coords", coords)

    @property
    def index(self) -> int:
        return CHARTS.index(self.chart)

    def to_homogeneous(self) -> np.ndarray:
        y = np.empty(3, dtype=complex)
        k = self.index
        y[k] = 1.0
        y[[i for i in range(3) if i != k]] = self.coords
        return y

    @classmethod
    def from_homogeneous(cls, y, chart: Optional[str] = None) -> "ChartPointCP2":
        """Chart point of y; without ``chart`` the largest component is normalized."""
        y = np.asarray(y, dtype=complex)
        if not np.any(y):
            raise ValueError("the zero vector has no projective class")
        k = int(np.argmax(np.abs(y))) if chart is None else CHARTS.index(chart)
        if y[k] == 0:
            raise ValueError(f"point lies outside chart {CHARTS[k]}")
        rest = [y[i] / y[k] for i in range(3) if i != k]
        return cls(chart=CHARTS[k], coords=(rest[0], rest[1]))

    def to_chart(self, chart: str) -> "ChartPointCP2":
        return ChartPointCP2.from_homogeneous(self.to_homogeneous(), chart)


@dataclass(frozen=True)
class WedgeState:
    """Pluecker coordinates (u^p, p^v, v^u) of a complex 2-plane."""
    w_up: complex
    w_pv: complex
    w_vu: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.w_up, self.w_pv, self.w_vu], dtype=complex)

    @classmethod
    def of(cls, y1, y2) -> "WedgeState":
        """Wedge of two vectors."""
        y1, y2 = np.asarray(y1, dtype=complex), np.asarray(y2, dtype=complex)
        w = [y1[i] * y2[j] - y1[j] * y2[i] for i, j in PLUECKER_PAIRS]
        return cls(*w)


@dataclass(frozen=True)
class ToyState:
    """Initial data (b, y, db, dy) of the toy exchange problem."""
    b: float
    y: float
    db: complex
    dy: complex
    eps: float
    lam: complex

    def __post_init__(self):
        if not 0 < self.eps <= 0.1:
            raise ValueError("toy problem requires 0 < eps <= 0.1")
        if self.y <= 0:
            raise ValueError("toy problem requires y > 0")


# ---------------------------------------------------------------------------
# linear and projective right-hand sides


def lin_matrix(u: float, c: float, eps: float, lam: complex, timescale: str = "fast",
               model: Optional[ModelFunctions] = None) -> np.ndarray:
    model = model or default_model()
    a = fast_jacobian(u, c, eps, model, complex(lam)).astype(complex)
    if timescale == "fast":
        return a
    if timescale == "slow":
        if eps <= 0:
            raise ValueError("the slow clock requires eps > 0")
        return a / eps
    raise ValueError(f"unknown timescale: {timescale}")


def lin_rhs(state: LinState3, timescale: str = "fast",
            model: Optional[ModelFunctions] = None) -> np.ndarray:
    """Derivative of (u, p, v) at the state's base point."""
    a = lin_matrix(state.base.u, state.c, state.eps, state.lam, timescale, model)
    return a @ state.as_array()


def lin_fun(profile: WaveProfile, lam: complex, timescale: str = "fast",
            model: Optional[ModelFunctions] = None):
    """solve_ivp right-hand side along ``profile`` (dense output for the base point)."""
    model = model or default_model()
    eps, c = profile.eps, profile.c
    to_fast = 1.0 / eps if timescale == "slow" else 1.0

    def fun(t, y):
        u_bar = float(profile.state_at(t * to_fast)[0])
        return lin_matrix(u_bar, c, eps, lam, timescale, model) @ y

    return fun


def normalized_lin_rhs(a: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Linear flow with the Rayleigh-quotient growth removed; keeps |y| constant."""
    ay = a @ y
    return ay - (np.vdot(y, ay).real / np.vdot(y, y).real) * y


def proj_rhs(pt: ChartPointCP2, lam: complex, eps: float, base: FastState, c: float,
             timescale: str = "fast",
             model: Optional[ModelFunctions] = None) -> np.ndarray:
    """Chart derivative beta_i' = (Ay)_i - beta_i (Ay)_k for the normalized index k."""
    a = lin_matrix(base.u, c, eps, lam, timescale, model)
    y = pt.to_homogeneous()
    dy = a @ y
    k = pt.index
    return np.array([dy[i] - y[i] * dy[k] for i in range(3) if i != k])


def fast_chart_rhs(b1: complex, b2: complex, u_bar: float, lam: complex, eps: float,
                   c: float, model: Optional[ModelFunctions] = None) -> np.ndarray:
    """Fast-clock chart (p/u, v/u)."""
    model = model or default_model()
    d, r = model.D(u_bar), model.dR(u_bar)
    return np.array(
        [
            (d * b1 - b1 * b2) / c + eps * (r + lam * (b1 / c - 1.0)),
            (d * b2 - b2 * b2) / c + eps * (c - b1 + lam * b2 / c),
        ],
        dtype=complex,
    )


def slow_chart_rhs(b1: complex, b2: complex, u_bar: float, lam: complex, eps: float,
                   c: float, model: Optional[ModelFunctions] = None) -> np.ndarray:
    """Slow-clock chart (U/V, P/V)."""
    if eps <= 0:
        raise ValueError("the slow chart requires eps > 0")
    model = model or default_model()
    d, r = model.D(u_bar), model.dR(u_bar)
    return np.array(
        [
            ((1.0 - d * b1) / c + eps * (b1 * b2 - c * b1 * b1 - lam * b1 / c)) / eps,
            b2 * b2 - c * b1 * b2 + (r - lam) * b1,
        ],
        dtype=complex,
    )


# ---------------------------------------------------------------------------
# 2-planes


def _pluecker_index(i: int, j: int) -> Tuple[int, float]:
    for n, pair in enumerate(PLUECKER_PAIRS):
        if pair == (i, j):
            return n, 1.0
        if pair == (j, i):
            return n, -1.0
    raise ValueError(f"no Pluecker coordinate for ({i}, {j})")


def second_compound(a: np.ndarray) -> np.ndarray:
    """Matrix of w' for w = y1 ^ y2 when y' = A y, basis (u^p, p^v, v^u)."""
    a = np.asarray(a)
    if a.shape != (3, 3):
        raise ValueError("second_compound expects a 3x3 matrix")
    out = np.zeros((3, 3), dtype=complex)
    for row, (i, j) in enumerate(PLUECKER_PAIRS):
        for k in range(3):
            # (y_i z_j - y_j z_i)' picks up A_ik w_kj + A_jk w_ik
            if k != j:
                col, sign = _pluecker_index(k, j)
                out[row, col] += sign * a[i, k]
            if k != i:
                col, sign = _pluecker_index(i, k)
                out[row, col] += sign * a[j, k]
    return out


def wedge_matrix(u: float, lam: complex, eps: float, c: float,
                 model: Optional[ModelFunctions] = None) -> np.ndarray:
    return second_compound(lin_matrix(u, c, eps, lam, "fast", model))


def wedge_rhs(w: WedgeState, lam: complex, eps: float, base: FastState, c: float,
              model: Optional[ModelFunctions] = None) -> np.ndarray:
    return wedge_matrix(base.u, lam, eps, c, model) @ w.as_array()


def _matched_gap(first: np.ndarray, second: np.ndarray) -> float:
    cost = np.abs(first[:, None] - second[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))


def wedge_eig_check(matrix: np.ndarray, tol: float = 1e-8) -> bool:
    """Eigenvalues of the second compound are the pairwise sums of eigenvalues."""
    values = np.linalg.eigvals(np.asarray(matrix, dtype=complex))
    sums = np.array([values[i] + values[j] for i, j in ((0, 1), (0, 2), (1, 2))])
    induced = np.linalg.eigvals(second_compound(matrix))
    scale = 1.0 + float(np.max(np.abs(values)))
    return _matched_gap(sums, induced) <= tol * scale


# ---------------------------------------------------------------------------
# asymptotic eigen-structure


@dataclass
class AsymptoticEigs:
    """Eigenpairs of the fast eigenvalue matrix at a rest state.

    Columns of ``vectors`` are sup-normalized, ordered fast, slow stable, slow
    unstable; ``reduced`` holds the eps -> 0 limits of the eigenvectors.
    """
    lam: complex
    eps: float
    end: str
    values: np.ndarray
    vectors: np.ndarray
    nu: Tuple[complex, complex]
    reduced: np.ndarray

    @property
    def mu_f(self) -> complex:
        return complex(self.values[0])


def _sup_normalize(vec: np.ndarray) -> np.ndarray:
    return vec / vec[int(np.argmax(np.abs(vec)))]


def reduced_nu(lam: complex, end: str, c: float,
               model: Optional[ModelFunctions] = None) -> Tuple[complex, complex]:
    """nu_-, nu_+ = (c -+ sqrt(c^2 + 4 D (lam - R')))/(2 D) at the rest state."""
    model = model or default_model()
    u = 0.0 if end == "minus" else 1.0
    d, r = float(model.D(u)), float(model.dR(u))
    root = np.sqrt(complex(c * c + 4 * d * (lam - r)))
    first, second = (c - root) / (2 * d), (c + root) / (2 * d)
    if first.real > second.real:
        first, second = second, first
    return complex(first), complex(second)


def asymptotic_eigs(lam: complex, eps: float, end: str, c: float,
                    model: Optional[ModelFunctions] = None) -> AsymptoticEigs:
    """Eigenpairs of a(lam, eps) at z- or z+ with the reduced limits.

    Raises:
        HierarchyError: Re mu_f << Re mu_s1 < 0 < Re mu_s2 fails, or the
            eigenvectors are numerically degenerate
    """
    model = model or default_model()
    if end not in ("minus", "plus"):
        raise ValueError(f"unknown end state: {end}")
    if eps <= 0:
        raise ValueError("asymptotic_eigs requires eps > 0")
    u = 0.0 if end == "minus" else 1.0
    values, vectors = np.linalg.eig(lin_matrix(u, c, eps, lam, "fast", model))
    order = np.argsort(values.real)
    values, vectors = values[order], vectors[:, order]
    mu_f, mu_s1, mu_s2 = values
    slow = max(abs(mu_s1), abs(mu_s2))
    if not (mu_f.real < mu_s1.real < 0 < mu_s2.real) or abs(mu_f) < HIERARCHY_RATIO * slow:
        raise HierarchyError(
            f"hierarchy violated at {end} for lambda={lam}, eps={eps:g}: {values}"
        )
    if np.linalg.cond(vectors) > 1e12:
        raise HierarchyError(f"degenerate eigenvectors at {end} for lambda={lam}")
    vectors = np.column_stack([_sup_normalize(vectors[:, k]) for k in range(3)])

    d = float(model.D(u))
    nu_m, nu_p = reduced_nu(lam, end, c, model)
    reduced = np.array(
        [
            [1.0, 0.0, 0.0],
            [1.0 / d, c / d - nu_m, 1.0],
            [1.0 / d, c / d - nu_p, 1.0],
        ],
        dtype=complex,
    ).T
    return AsymptoticEigs(lam=complex(lam), eps=eps, end=end, values=values,
                          vectors=vectors, nu=(nu_m, nu_p), reduced=reduced)


def epsilon_bar(points: Iterable[complex], end: str, c: float,
                eps_start: float = 0.1, floor: float = 1e-8,
                model: Optional[ModelFunctions] = None) -> float:
    """Largest eps on the ladder eps_start / 2^k with the hierarchy at every point."""
    points = list(points)
    eps = eps_start
    while eps >= floor:
        try:
            for lam in points:
                asymptotic_eigs(lam, eps, end, c, model)
            return eps
        except HierarchyError:
            eps /= 2.0
    raise HierarchyError(f"hierarchy fails on the contour for every eps >= {floor:g}")


def fubini_study_dist(x, y) -> float:
    """sqrt(1 - |<x, y>|^2 / (|x|^2 |y|^2)), the sine of the Hermitian angle."""
    x, y = np.asarray(x, dtype=complex), np.asarray(y, dtype=complex)
    nx, ny = np.vdot(x, x).real, np.vdot(y, y).real
    if nx == 0 or ny == 0:
        raise ValueError("Fubini-Study distance is undefined for the zero vector")
    overlap = abs(np.vdot(x, y)) ** 2 / (nx * ny)
    return math.sqrt(max(0.0, 1.0 - overlap))


# ---------------------------------------------------------------------------
# convergence onto the reduced solution


@dataclass
class ConvergenceResult:
    eps: float
    c: float
    sup_distance: float
    ubar: np.ndarray = field(repr=False)
    S: np.ndarray = field(repr=False)
    window_samples: int = 0


@dataclass
class ConvergenceReport:
    lam: complex
    freeze_c: bool
    results: List[ConvergenceResult]

    @property
    def distances(self) -> List[float]:
        return [r.sup_distance for r in self.results]

    @property
    def monotone(self) -> bool:
        d = self.distances
        return all(later < earlier for earlier, later in zip(d, d[1:]))


def in_window(ubar, u_F: float, u_J: float, sigma: float = 0.95,
              margin: float = JUMP_MARGIN) -> np.ndarray:
    ubar = np.asarray(ubar)
    return ((ubar >= WINDOW_START) & (ubar <= u_F - margin)) | (
        (ubar >= u_J + margin) & (ubar <= sigma)
    )


def _convergence_point(eps: float, lam: complex, orbit: SingularOrbit, freeze_c: bool,
                       tol: Tolerances, settings: EvansSettings,
                       model: ModelFunctions, path, samples: int) -> ConvergenceResult:
    c = orbit.c0 if freeze_c else find_c_eps(eps, c_guess=orbit.c0, model=model)[0]
    frame = saddle_frame("minus", c, eps, model)
    e_u = np.real(frame.vector(2))
    e_u = e_u if e_u[0] > 0 else -e_u
    base0 = frame.point + TAKE_OFF * e_u
    lin0 = asymptotic_eigs(lam, eps, "minus", c, model).vectors[:, 2]
    lin0 = lin0 / np.linalg.norm(lin0)

    def complex_fun(t, z):
        base = z[:3].real
        a = lin_matrix(base[0], c, eps, lam, "fast", model)
        return np.concatenate(
            [rhs(base, c, eps, "full_fast", model), normalized_lin_rhs(a, z[3:])]
        )

    stop = event(lambda t, y: y[0] - settings.sigma, direction=1)
    sol = integrate(real_split(complex_fun), (0.0, 2000.0 / eps),
                    to_real(np.concatenate([base0, lin0])), tol, events=[stop],
                    dense_output=True, method="LSODA")
    if first_event(sol, 0) is None:
        logger.warning("eps=%g: base trajectory never reached u=%g", eps, settings.sigma)

    grid = np.union1d(sol.t, np.linspace(sol.t[0], sol.t[-1], samples))
    states = to_complex(sol.sol(grid))
    ubar = states[0].real
    p, v = states[4], states[5]
    mask = in_window(ubar, model.u_F, model.u_J, settings.sigma)
    worst = 0.0
    for u, pk, vk in zip(ubar[mask], p[mask], v[mask]):
        worst = max(worst, fubini_study_dist((pk, vk), path.at(u)))
    with np.errstate(divide="ignore", invalid="ignore"):
        S = p / v
    logger.info("eps=%g: sup distance %.3e over %d samples", eps, worst,
                int(np.count_nonzero(mask)))
    return ConvergenceResult(eps=eps, c=c, sup_distance=worst, ubar=ubar, S=S,
                             window_samples=int(np.count_nonzero(mask)))


def convergence_run(lam: complex, eps_list: Sequence[float] = DEFAULT_EPS_LIST,
                    orbit: Optional[SingularOrbit] = None, freeze_c: bool = True,
                    tol: Optional[Tolerances] = None,
                    settings: Optional[EvansSettings] = None,
                    model: Optional[ModelFunctions] = None, workers: int = 1,
                    samples: int = 20000) -> ConvergenceReport:
    """Sup Fubini-Study distance of the projected full solution to the reduced one.

    For each eps the wave from z- (speed frozen at c0 unless ``freeze_c`` is
    False) is integrated together with the normalized linear flow started on
    the unstable eigenvector at z-. (p, v) is compared with the reduced
    solution plus jump graph at the same u_bar, away from the jump.
    """
    model = model or default_model()
    tol = tol or Tolerances()
    settings = settings or EvansSettings()
    eps_list = [float(e) for e in eps_list]
    if any(e <= 0 for e in eps_list):
        raise ValueError("eps values must be positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly descending")
    orbit = orbit or find_c0(model=model)
    lam = complex(lam)
    path = riccati_path(lam, orbit, settings, model)

    task = partial(_convergence_point, lam=lam, orbit=orbit, freeze_c=freeze_c,
                   tol=tol, settings=settings, model=model, path=path,
                   samples=samples)
    if workers > 1 and len(eps_list) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, eps_list))
    else:
        results = [task(eps) for eps in eps_list]
    return ConvergenceReport(lam=lam, freeze_c=freeze_c, results=results)


# ---------------------------------------------------------------------------
# rescaled layer


@dataclass
class RescaledLayer:
    xi: np.ndarray
    ubar: np.ndarray
    u: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    C: complex
    g_error: float
    u_identity_error: float
    quadrature_error: float
    s_end: complex
    s_closed_form: complex
    s_jump: complex


def rescaled_layer(lam: complex, orbit: SingularOrbit, K: complex = 1.0,
                   C: Optional[complex] = None, s0: complex = 0.0,
                   offset: float = 1e-4, xi_grid: Optional[np.ndarray] = None,
                   tol: Optional[Tolerances] = None,
                   model: Optional[ModelFunctions] = None) -> RescaledLayer:
    """Integrate u' = -D u/c, beta1' = (R' - lam) u, beta2' = c u along the jump layer.

    The layer starts ``offset`` right of the fold at (p_F, v_F). Initial data
    are u = K (v_F - F(u_bar)), beta2 = K c (C + c u_bar), beta1 = s0 beta2, so
    that u/beta2 = (v_F - F(u_bar))/(c (c u_bar + C)) exactly. C defaults to
    -p_F, for which beta1/beta2 at the jump-on point matches the jump map.
    """
    model = model or default_model()
    tol = tol or Tolerances()
    lam, K = complex(lam), complex(K)
    c, p_F, v_F = orbit.c0, orbit.p_F, orbit.v_F
    C = complex(-p_F if C is None else C)

    layer = layer_trajectory(model.u_F + offset, p_F, v_F, c, model, tol)
    xi_end = float(layer.xi[-1])
    grid = np.linspace(0.0, xi_end, 2001) if xi_grid is None else np.asarray(xi_grid)

    def u_bar(xi):
        return float(layer.sol(xi)[0])

    u0 = u_bar(0.0)
    y0 = np.array([K * (v_F - model.F(u0)), 0.0, K * c * (C + c * u0)], dtype=complex)
    y0[1] = s0 * y0[2]

    def fun(xi, y):
        ub = u_bar(xi)
        return np.array(
            [-model.D(ub) * y[0] / c, (model.dR(ub) - lam) * y[0], c * y[0]]
        )

    sol = integrate(fun, (0.0, xi_end), y0, tol, t_eval=grid)
    ubar = layer.sol(sol.t)[0]
    u, beta1, beta2 = sol.y

    g_closed = (v_F - model.F(ubar)) / (c * (c * ubar + C))
    g_error = float(np.max(np.abs(u / beta2 - g_closed)))
    u_identity = float(np.max(np.abs(u - K * (v_F - model.F(ubar)))))
    quadrature = abs((beta2[-1] - beta2[0]) - K * c * c * (ubar[-1] - ubar[0]))

    # exact solution of ds/du = (R'(u) - lam - c s)/(c u + C)
    u_end = float(ubar[-1])
    s_closed = (model.R(u_end) - model.R(u0) - lam * (u_end - u0) + s0 * (c * u0 + C)) / (
        c * u_end + C
    )
    s_jump = jump_projective(s0, lam, jump_data(orbit, model), model, u=u_end, u_from=u0)
    return RescaledLayer(
        xi=sol.t, ubar=ubar, u=u, beta1=beta1, beta2=beta2, C=C, g_error=g_error,
        u_identity_error=u_identity, quadrature_error=float(quadrature),
        s_end=complex(beta1[-1] / beta2[-1]), s_closed_form=complex(s_closed),
        s_jump=complex(s_jump),
    )


# ---------------------------------------------------------------------------
# toy exchange problem


@dataclass
class ToyReport:
    t: np.ndarray
    closed_form_error: float
    slow_manifold_error: float
    angle: float
    bound: float
    bound_initial_y: float
    t_end: float

    @property
    def bound_holds(self) -> bool:
        return self.angle <= self.bound


def toy_closed_form(ics: ToyState, t) -> np.ndarray:
    """(b, y, db, dy) at times t."""
    t = np.asarray(t, dtype=float)
    eps, lam = ics.eps, ics.lam
    coupling = eps * lam * ics.y * ics.dy
    db = (np.exp(-t) * (ics.db * (1 + 2 * eps) - coupling)
          + np.exp(2 * eps * t) * coupling) / (1 + 2 * eps)
    return np.array(
        [ics.b * np.exp(-t), ics.y * np.exp(eps * t), db, ics.dy * np.exp(eps * t)],
        dtype=complex,
    )


def slow_subbundle(y: float, eps: float, lam: complex) -> np.ndarray:
    return np.array([eps * lam * y / (1 + eps), 1.0], dtype=complex)


def toy_exchange(ics: ToyState, t_end: Optional[float] = None,
                 samples: int = 2001) -> ToyReport:
    """Integrate b' = -b, y' = eps y, db' = -db + eps lam y dy, dy' = eps dy.

    Compares with the explicit solution, measures the distance from the
    slow manifold {b = 0, db = eps lam y dy/(1 + 2 eps)} and the Fubini-Study
    angle of (db, dy) to the slow subbundle at y(t_end).
    """
    eps, lam = ics.eps, complex(ics.lam)
    t_end = 1.0 / eps if t_end is None else float(t_end)
    tol = Tolerances(rtol=1e-12, atol=1e-12, method="DOP853")

    def fun(t, z):
        b, y, db, dy = z
        return np.array([-b, eps * y, -db + eps * lam * y * dy, eps * dy])

    grid = np.linspace(0.0, t_end, samples)
    y0 = np.array([ics.b, ics.y, ics.db, ics.dy], dtype=complex)
    sol = integrate(fun, (0.0, t_end), y0, tol, t_eval=grid)
    exact = toy_closed_form(ics, sol.t)
    scale = np.maximum(1.0, np.abs(exact))
    error = float(np.max(np.abs(sol.y - exact) / scale))

    y_t, db_t, dy_t = sol.y[1].real, sol.y[2], sol.y[3]
    manifold = float(np.max(np.abs(db_t - eps * lam * y_t * dy_t / (1 + 2 * eps))))

    y_end = float(y_t[-1])
    angle = fubini_study_dist((db_t[-1], dy_t[-1]), slow_subbundle(y_end, eps, lam))
    factor = 2 * eps * eps * abs(lam) / ((1 + 2 * eps) * (1 + eps))
    return ToyReport(t=sol.t, closed_form_error=error, slow_manifold_error=manifold,
                     angle=angle, bound=factor * y_end,
                     bound_initial_y=factor * ics.y, t_end=t_end)
