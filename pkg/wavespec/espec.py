"""Essential spectrum: dispersion relations, asymptotic matrices and signatures.

Region labels follow the signature pairs of the asymptotic matrices at the two
end states. Third order (3x3 matrices):

    Omega   minus (2,1)  plus (2,1)
    A1      minus (1,2)  plus (2,1)
    A2/A3   minus (2,1)  plus (1,2)   (A2 for Im >= 0, A3 for Im < 0)
    A4      minus (1,2)  plus (1,2)

Fourth order (4x4 matrices) uses (2,2) in place of (2,1) and (3,1) in place
of (1,2).
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .polynomials import ModelFunctions, default_model

logger = logging.getLogger(__name__)

END_VALUES = {"minus": 0.0, "plus": 1.0}
DEFAULT_WAVESPEED = 0.199362
ZERO_REAL_TOL = 1e-12
SECTORIAL_DECADES = 1e3
SECTORIAL_MIN_SCALE = 100.0


class RegionLabel(str, Enum):
    OMEGA = "Omega"
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"
    BORDER = "Border"


@dataclass(frozen=True)
class EndState:
    """Asymptotic end state of the wave and its model data."""
    tag: str
    U: float
    D: float
    dR: float

    @classmethod
    def of(cls, tag: str, model: Optional[ModelFunctions] = None) -> "EndState":
        if tag not in END_VALUES:
            raise ValueError(f"unknown end state: {tag}")
        model = model or default_model()
        u = END_VALUES[tag]
        return cls(tag=tag, U=u, D=float(model.D(u)), dR=float(model.dR(u)))


@dataclass(frozen=True)
class DispersionSample:
    k: float
    lam: complex
    end: str
    order: int
    a: float = 0.0


@dataclass(frozen=True)
class Signature:
    """Counts of eigenvalues with negative / positive real part.

    ``border`` is set when an eigenvalue lies on the imaginary axis within
    tolerance; the counts are then not meaningful.
    """
    n_neg: int
    n_pos: int
    border: bool = False

    def as_tuple(self) -> Tuple[int, int]:
        return self.n_neg, self.n_pos


@dataclass(frozen=True)
class AsymptoticMatrix:
    matrix: np.ndarray
    charpoly: np.ndarray  # highest power first, leading coefficient -1
    scaling: str


def _check_order(order: int, a: float) -> None:
    if order not in (3, 4):
        raise ValueError(f"order must be 3 or 4, got {order}")
    if order == 4 and a < 0:
        raise ValueError("fourth-order mixing weight a must be non-negative")


def dispersion(k, eps: float, end: str, order: int = 3, a: float = 1.0,
               c: float = DEFAULT_WAVESPEED,
               model: Optional[ModelFunctions] = None):
    """Essential-spectrum border lambda(k) of the given end state.

    Third order: -ick + (R' - Dk^2)/(1 + eps k^2).
    Fourth order: (-eps^2 k^4 - Dk^2 + R')/(1 + a eps k^2) + ick.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    _check_order(order, a)
    state = EndState.of(end, model)
    k = np.asarray(k, dtype=float)
    if order == 3:
        lam = -1j * c * k + (state.dR - state.D * k**2) / (1 + eps * k**2)
    else:
        lam = (-(eps**2) * k**4 - state.D * k**2 + state.dR) / (
            1 + a * eps * k**2
        ) + 1j * c * k
    return lam if lam.ndim else complex(lam)


def asymptotic_matrix(lam: complex, eps: float, end: str, scaling: str = "fast",
                      c: float = DEFAULT_WAVESPEED,
                      model: Optional[ModelFunctions] = None) -> AsymptoticMatrix:
    """Limit a(lam, eps) (fast) or A = a/eps (slow) of the eigenvalue matrix.

    The characteristic polynomial is det(M - mu I) with the coefficients
    fast: [-1, -(D + eps lam)/c, eps, eps^2 (lam - R')/c]
    slow: [-1, -(lam + D/eps)/c, 1/eps, (lam - R')/(c eps)]
    """
    state = EndState.of(end, model)
    D, dR = state.D, state.dR
    a = np.array(
        [
            [-(D + eps * lam) / c, 0.0, 1.0 / c],
            [eps * (dR - lam), 0.0, 0.0],
            [eps * c, -eps, 0.0],
        ],
        dtype=complex,
    )
    if scaling == "fast":
        charpoly = np.array(
            [-1.0, -(D + eps * lam) / c, eps, eps**2 * (lam - dR) / c], dtype=complex
        )
        return AsymptoticMatrix(matrix=a, charpoly=charpoly, scaling="fast")
    if scaling == "slow":
        if eps <= 0:
            raise ValueError("slow scaling requires eps > 0")
        charpoly = np.array(
            [-1.0, -(lam + D / eps) / c, 1.0 / eps, (lam - dR) / (c * eps)],
            dtype=complex,
        )
        return AsymptoticMatrix(matrix=a / eps, charpoly=charpoly, scaling="slow")
    raise ValueError(f"unknown scaling: {scaling}")


def fourth_order_matrix(lam: complex, eps: float, end: str, a: float = 1.0,
                        c: float = DEFAULT_WAVESPEED,
                        model: Optional[ModelFunctions] = None) -> np.ndarray:
    """4x4 first-order form of the fourth-order regularization.

    (eps p, eps q, r, s)' = M (p, q, r, s) with
    M = [[-ac, 1, 0, 0], [D + eps a lam, 0, 1, 0], [c, 0, 0, 1], [R' - lam, 0, 0, 0]].
    """
    if eps <= 0:
        raise ValueError("fourth-order matrix requires eps > 0")
    state = EndState.of(end, model)
    m = np.array(
        [
            [-a * c, 1.0, 0.0, 0.0],
            [state.D + eps * a * lam, 0.0, 1.0, 0.0],
            [c, 0.0, 0.0, 1.0],
            [state.dR - lam, 0.0, 0.0, 0.0],
        ],
        dtype=complex,
    )
    return np.diag([1.0 / eps, 1.0 / eps, 1.0, 1.0]) @ m


def charpoly_scaling_defect(lam: complex, eps: float, end: str, mu: complex,
                            c: float = DEFAULT_WAVESPEED,
                            model: Optional[ModelFunctions] = None) -> float:
    """Relative defect of P_A(mu) = eps^-3 p(eps mu)."""
    slow = asymptotic_matrix(lam, eps, end, "slow", c, model).charpoly
    fast = asymptotic_matrix(lam, eps, end, "fast", c, model).charpoly
    lhs = np.polyval(slow, mu)
    rhs = np.polyval(fast, eps * mu) / eps**3
    return float(abs(lhs - rhs) / max(1.0, abs(lhs)))


def _signature_of(matrix: np.ndarray) -> Signature:
    values = np.linalg.eigvals(matrix)
    radius = float(np.max(np.abs(values)))
    tol = ZERO_REAL_TOL * (1.0 + radius)
    if np.any(np.abs(values.real) < tol):
        return Signature(0, 0, border=True)
    return Signature(int(np.sum(values.real < 0)), int(np.sum(values.real > 0)))


def signature(lam: complex, eps: float, end: str, order: int = 3, a: float = 1.0,
              c: float = DEFAULT_WAVESPEED,
              model: Optional[ModelFunctions] = None) -> Signature:
    """Sign counts of the real parts of the asymptotic eigenvalues at ``end``."""
    _check_order(order, a)
    if order == 3:
        return _signature_of(asymptotic_matrix(lam, eps, end, "fast", c, model).matrix)
    return _signature_of(fourth_order_matrix(lam, eps, end, a, c, model))


_THIRD_ORDER_TABLE = {
    ((2, 1), (2, 1)): RegionLabel.OMEGA,
    ((1, 2), (2, 1)): RegionLabel.A1,
    ((2, 1), (1, 2)): RegionLabel.A2,
    ((1, 2), (1, 2)): RegionLabel.A4,
}
_FOURTH_ORDER_TABLE = {
    ((2, 2), (2, 2)): RegionLabel.OMEGA,
    ((3, 1), (2, 2)): RegionLabel.A1,
    ((2, 2), (3, 1)): RegionLabel.A2,
    ((3, 1), (3, 1)): RegionLabel.A4,
}


def classify(lam: complex, eps: float, order: int = 3, a: float = 1.0,
             c: float = DEFAULT_WAVESPEED,
             model: Optional[ModelFunctions] = None) -> RegionLabel:
    """Region of the lambda-plane from the signature pair (minus, plus)."""
    minus = signature(lam, eps, "minus", order, a, c, model)
    plus = signature(lam, eps, "plus", order, a, c, model)
    if minus.border or plus.border:
        return RegionLabel.BORDER
    table = _THIRD_ORDER_TABLE if order == 3 else _FOURTH_ORDER_TABLE
    label = table.get((minus.as_tuple(), plus.as_tuple()))
    if label is None:
        raise ValueError(
            f"signature pair {minus.as_tuple()}, {plus.as_tuple()} not in the table"
        )
    if label is RegionLabel.A2 and complex(lam).imag < 0:
        return RegionLabel.A3
    return label


def fredholm_index(lam: complex, eps: float, order: int = 3, a: float = 1.0,
                   c: float = DEFAULT_WAVESPEED,
                   model: Optional[ModelFunctions] = None) -> Optional[int]:
    """Unstable dimension at minus infinity minus unstable dimension at plus infinity."""
    minus = signature(lam, eps, "minus", order, a, c, model)
    plus = signature(lam, eps, "plus", order, a, c, model)
    if minus.border or plus.border:
        return None
    return minus.n_pos - plus.n_pos


def epsilon_star(end: str, model: Optional[ModelFunctions] = None) -> float:
    """eps at which the third-order border is a vertical line: -D/R'."""
    state = EndState.of(end, model)
    return -state.D / state.dR


def border_polyline(eps: float, end: str, order: int = 3, a: float = 1.0,
                    k_range: Tuple[float, float] = (-50.0, 50.0), n: int = 401,
                    c: float = DEFAULT_WAVESPEED,
                    model: Optional[ModelFunctions] = None) -> List[DispersionSample]:
    """Sample the border lambda(k) on an ascending k grid."""
    if n < 2:
        raise ValueError("border polyline needs n >= 2")
    lo, hi = k_range
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise ValueError(f"invalid k range: {k_range}")
    ks = np.linspace(lo, hi, n)
    lams = dispersion(ks, eps, end, order, a, c, model)
    return [
        DispersionSample(k=float(k), lam=complex(l), end=end, order=order, a=a)
        for k, l in zip(ks, lams)
    ]


@dataclass(frozen=True)
class SectorialityReport:
    """Measured large-k behaviour of one border.

    ``growth_ratio`` compares the change of Re lambda over the last two decades
    of the k grid; below one the border converges to ``asymptote``.
    """
    end: str
    order: int
    eps: float
    asymptote: float  # -inf when the border opens leftward
    predicted_asymptote: float
    re_at_kmax: float
    k_max: float
    growth_ratio: float
    sectorial: bool

    @property
    def asymptote_relative_error(self) -> float:
        if math.isinf(self.predicted_asymptote) or math.isinf(self.asymptote):
            return float("nan")
        return abs(self.asymptote - self.predicted_asymptote) / abs(self.predicted_asymptote)


def sectoriality_report(eps: float, end: str, order: int = 3, a: float = 1.0,
                        k_max: Optional[float] = None, c: float = DEFAULT_WAVESPEED,
                        model: Optional[ModelFunctions] = None) -> SectorialityReport:
    """Large-k behaviour of the border, measured on k_max/100, k_max/10, k_max.

    A border whose Re lambda changes less over the last decade than over the one
    before converges to a vertical line (not sectorial); one that keeps falling
    faster opens leftward (sectorial). Third-order borders are expected to approach
    Re = -D/eps, fourth-order ones to fall without bound.

    Raises:
        ValueError: the grid does not reach the regularized regime k >= 1/sqrt(eps)
    """
    if eps <= 0:
        raise ValueError("sectoriality needs eps > 0")
    k_max = SECTORIAL_DECADES / math.sqrt(eps) if k_max is None else k_max
    if k_max * math.sqrt(eps) < SECTORIAL_MIN_SCALE:
        raise ValueError(
            f"k_max={k_max:g} does not resolve the large-k regime for eps={eps:g}; "
            f"need k_max >= {SECTORIAL_MIN_SCALE / math.sqrt(eps):g}"
        )
    state = EndState.of(end, model)
    ks = k_max * np.array([1e-2, 1e-1, 1.0])
    f0, f1, f2 = np.real(dispersion(ks, eps, end, order, a, c, model))
    d1, d2 = f1 - f0, f2 - f1
    if d1 == 0.0:
        ratio = 0.0 if d2 == 0.0 else math.inf
    else:
        ratio = abs(d2 / d1)
    sectorial = ratio >= 1.0 and d2 < 0
    if ratio < 1.0:
        asymptote = float(f2 + d2 * ratio / (1.0 - ratio))
    else:
        asymptote = -math.inf if d2 < 0 else math.inf
    predicted = -state.D / eps if order == 3 else -math.inf
    logger.debug("sectoriality %s order %d eps=%g: ratio %.3g", end, order, eps, ratio)
    return SectorialityReport(
        end=end, order=order, eps=eps, asymptote=asymptote,
        predicted_asymptote=predicted, re_at_kmax=float(f2), k_max=float(k_max),
        growth_ratio=float(ratio), sectorial=bool(sectorial),
    )


def spatial_eigenvalue_gap(sample: DispersionSample, eps: float,
                           c: float = DEFAULT_WAVESPEED,
                           model: Optional[ModelFunctions] = None) -> float:
    """Distance from ik to the nearest eigenvalue of the slow-scaled matrix."""
    if sample.order == 3:
        matrix = asymptotic_matrix(sample.lam, eps, sample.end, "slow", c, model).matrix
    else:
        matrix = fourth_order_matrix(sample.lam, eps, sample.end, sample.a, c, model)
    values = np.linalg.eigvals(matrix)
    return float(np.min(np.abs(values - 1j * sample.k)))


def summary(eps: float, orders: Sequence[int] = (3, 4), a: float = 1.0,
            c: float = DEFAULT_WAVESPEED,
            model: Optional[ModelFunctions] = None) -> dict:
    """JSON-ready summary of eps* values and sectoriality verdicts."""
    verdicts = []
    for order in orders:
        for end in ("minus", "plus"):
            report = sectoriality_report(eps, end, order, a, c=c, model=model)
            verdicts.append(
                {
                    "end": end,
                    "order": order,
                    "sectorial": report.sectorial,
                    "asymptote": None if math.isinf(report.asymptote)
                    else report.asymptote,
                    "re_at_kmax": report.re_at_kmax,
                    "growth_ratio": report.growth_ratio,
                    "k_max": report.k_max,
                }
            )
    return {
        "eps": eps,
        "a": a,
        "c": c,
        "epsilon_star": {end: epsilon_star(end, model) for end in ("minus", "plus")},
        "sectoriality": verdicts,
    }
