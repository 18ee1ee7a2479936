import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np


def _require_finite(*values) -> None:
    for value in values:
        if not np.all(np.isfinite(value)):
            raise ValueError(f"non-finite component: {value!r}")


@dataclass(frozen=True)
class Tolerances:
    """Integrator settings shared by every shooting and projective integration."""
    rtol: float = 1e-10
    atol: float = 1e-12
    method: str = "RK45"

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")

    def scaled(self, factor: float) -> "Tolerances":
        return Tolerances(self.rtol * factor, self.atol * factor, self.method)


@dataclass(frozen=True)
class SlowState:
    """Point (U, P) of the reduced/desingularized slow flow."""
    U: float
    P: float

    def __post_init__(self):
        _require_finite(self.U, self.P)

    def as_array(self) -> np.ndarray:
        return np.array([self.U, self.P])


@dataclass(frozen=True)
class FastState:
    """Point (u, p, v) of the full travelling-wave system."""
    u: float
    p: float
    v: float

    def __post_init__(self):
        _require_finite(self.u, self.p, self.v)

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.p, self.v])


@dataclass
class SlowPath:
    """Sampled slow segment in desingularized time with dense output.

    ``tau`` is shifted so the fold (left segment) or the jump-on point
    (right segment) sits at tau = 0.
    """
    tau: np.ndarray
    U: np.ndarray
    P: np.ndarray
    sol: Callable
    t_shift: float

    def __post_init__(self):
        if len(self.tau) < 2:
            raise ValueError("a slow path needs at least two samples")
        if not np.all(np.diff(self.tau) > 0):
            raise ValueError("slow path grid must be ascending")

    @property
    def tau_min(self) -> float:
        return float(self.tau[0])

    @property
    def tau_max(self) -> float:
        return float(self.tau[-1])

    def state_at(self, tau):
        """Return (U, P) at tau (scalar or array) from dense output."""
        y = self.sol(np.asarray(tau) + self.t_shift)
        return y[0], y[1]

    def dU(self, c: float) -> np.ndarray:
        """Desingularized U-velocity cU - P at the samples."""
        return c * self.U - self.P


@dataclass
class SingularOrbit:
    """Singular heteroclinic orbit: left slow segment, jump fiber, right slow segment."""
    left_segment: SlowPath
    jump_fiber: np.ndarray
    right_segment: SlowPath
    c0: float
    p_F: float
    v_F: float
    p_J: float
    defect: float = 0.0

    def __post_init__(self):
        if self.c0 <= 0:
            raise ValueError("wavespeed must be positive")
        if self.c0 * self.jump_fiber[0] - self.p_F <= 0:
            raise ValueError("orbit violates c*u_F - p_F > 0")


@dataclass
class WaveProfile:
    """Sampled heteroclinic trajectory of the full system.

    ``states`` has one (u, p, v) row per grid value. ``evaluator`` returns
    states at arbitrary frame values within the grid (dense output).
    """
    grid: np.ndarray
    states: np.ndarray
    c: float
    eps: float
    timescale: str = "fast"
    evaluator: Optional[Callable] = field(default=None, repr=False)
    sigma_u: float = 0.7
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.timescale not in ("slow", "fast"):
            raise ValueError(f"unknown timescale: {self.timescale}")
        if self.eps < 0:
            raise ValueError("eps must be non-negative")
        if self.states.shape != (len(self.grid), 3):
            raise ValueError("states must have one (u, p, v) row per grid point")
        if not np.all(np.diff(self.grid) > 0):
            raise ValueError("profile grid must be ascending")

    def state_at(self, xi) -> np.ndarray:
        """Return (u, p, v) at frame value ``xi``."""
        if self.evaluator is not None:
            return self.evaluator(xi)
        xi = np.asarray(xi)
        return np.array([np.interp(xi, self.grid, self.states[:, k]) for k in range(3)])

    @property
    def zeta(self) -> np.ndarray:
        """Grid in the slow frame."""
        return self.grid * self.eps if self.timescale == "fast" else self.grid


@dataclass(frozen=True)
class JumpData:
    """Fold and jump-on data transporting slow linear data across the fast layer."""
    u_F: float
    u_J: float
    p_F: float
    v_F: float
    c: float

    def __post_init__(self):
        if self.c * self.u_F - self.p_F <= 0:
            raise ValueError("jump data requires c*u_F - p_F > 0")
        if self.u_J <= self.u_F:
            raise ValueError("jump-on point must lie right of the fold")

    @classmethod
    def from_orbit(cls, orbit: SingularOrbit, u_F: float, u_J: float) -> "JumpData":
        return cls(u_F=u_F, u_J=u_J, p_F=orbit.p_F, v_F=orbit.v_F, c=orbit.c0)


@dataclass(frozen=True)
class SlowLinState:
    """Linearized slow variables (P, V) riding on a base point of the singular orbit."""
    P: complex
    V: complex
    base: SlowState


@dataclass(frozen=True)
class RiccatiPoint:
    """Chart-tagged point of CP^1: S = P/V on chart 'S', T = V/P on chart 'T'."""
    chart: str
    value: complex
    base: Optional[SlowState] = None
    wind_hint: int = 0

    def __post_init__(self):
        if self.chart not in ("S", "T"):
            raise ValueError(f"unknown chart: {self.chart}")
        if not (math.isfinite(self.value.real) and math.isfinite(self.value.imag)):
            raise ValueError("chart value must be finite")

    def homogeneous(self) -> Tuple[complex, complex]:
        """(P, V) representative."""
        return (self.value, 1.0) if self.chart == "S" else (1.0, self.value)

    def switched(self) -> "RiccatiPoint":
        return RiccatiPoint(
            chart="T" if self.chart == "S" else "S",
            value=1.0 / self.value,
            base=self.base,
            wind_hint=self.wind_hint + 1,
        )


@dataclass(frozen=True)
class EvansSample:
    """One evaluation of the Riccati-Evans function."""
    lam: complex
    value: complex
    left_hit: complex
    right_hit: complex
