"""Model polynomials D, R, F with exact rational coefficients.

Coefficients are stored highest power first. Floating point evaluation uses
Horner's scheme (``numpy.polyval``); the ``Fraction`` path is the exact
reference used by tests and the rational identities.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Tuple, Union

import numpy as np

from .exceptions import ModelError

Coeffs = Tuple[Fraction, ...]
ArrayLike = Union[float, np.ndarray]


def _as_fractions(coeffs: Sequence) -> Coeffs:
    return tuple(Fraction(c) for c in coeffs)


def _derivative(coeffs: Coeffs) -> Coeffs:
    degree = len(coeffs) - 1
    if degree == 0:
        return (Fraction(0),)
    return tuple(c * (degree - i) for i, c in enumerate(coeffs[:-1]))


def _horner_exact(coeffs: Coeffs, u: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * u + c
    return acc


@dataclass(frozen=True)
class ModelValues:
    """Values of the model functions at one point (or an array of points)."""
    D: ArrayLike
    R: ArrayLike
    F: ArrayLike
    dR: ArrayLike
    dD: ArrayLike


@dataclass(frozen=True)
class ModelFunctions:
    """Diffusion D, reaction R and potential F (F' = D) of the travelling-wave model."""
    d_coeffs: Coeffs
    r_coeffs: Coeffs
    f_coeffs: Coeffs
    u_fold_left: Fraction
    u_fold_right: Fraction
    u_jump: Fraction
    _float: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("d_coeffs", "r_coeffs", "f_coeffs"):
            object.__setattr__(self, name, _as_fractions(getattr(self, name)))
        for name in ("u_fold_left", "u_fold_right", "u_jump"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if _derivative(self.f_coeffs) != _strip(self.d_coeffs):
            raise ValueError("potential F must satisfy F' = D")
        if _horner_exact(self.d_coeffs, self.u_fold_left) != 0:
            raise ValueError("left fold must be a root of D")
        if _horner_exact(self.d_coeffs, self.u_fold_right) != 0:
            raise ValueError("right fold must be a root of D")
        if _horner_exact(self.f_coeffs, self.u_fold_left) != _horner_exact(
            self.f_coeffs, self.u_jump
        ):
            raise ValueError("jump fiber must be horizontal: F(u_fold_left) != F(u_jump)")

        table = {
            "D": self.d_coeffs,
            "R": self.r_coeffs,
            "F": self.f_coeffs,
            "dR": _derivative(self.r_coeffs),
            "dD": _derivative(self.d_coeffs),
        }
        for key, coeffs in table.items():
            self._float[key] = np.array([float(c) for c in coeffs])
        self._float["exact"] = table

    def _eval(self, key: str, u: ArrayLike) -> ArrayLike:
        return np.polyval(self._float[key], u)

    def D(self, u: ArrayLike) -> ArrayLike:
        return self._eval("D", u)

    def R(self, u: ArrayLike) -> ArrayLike:
        return self._eval("R", u)

    def F(self, u: ArrayLike) -> ArrayLike:
        return self._eval("F", u)

    def dR(self, u: ArrayLike) -> ArrayLike:
        return self._eval("dR", u)

    def dD(self, u: ArrayLike) -> ArrayLike:
        return self._eval("dD", u)

    def evaluate(self, u: ArrayLike) -> ModelValues:
        """Evaluate all five model functions at ``u``."""
        return ModelValues(
            D=self.D(u), R=self.R(u), F=self.F(u), dR=self.dR(u), dD=self.dD(u)
        )

    def evaluate_exact(self, u) -> ModelValues:
        """Evaluate all five model functions in rational arithmetic."""
        u = Fraction(u)
        exact = self._float["exact"]
        return ModelValues(
            **{key: _horner_exact(exact[key], u) for key in ("D", "R", "F", "dR", "dD")}
        )

    def dRD(self, u: ArrayLike) -> ArrayLike:
        """Derivative of the product R*D (linearization of the desingularized flow)."""
        return self.dR(u) * self.D(u) + self.R(u) * self.dD(u)

    def reduced_rhs_guard(self, u: float, threshold: float = 1e-13) -> float:
        """Return D(u), raising when the reduced flow is singular there."""
        d = float(self.D(u))
        if abs(d) < threshold:
            raise ModelError(
                f"reduced flow is singular at U={u:.12g} (|D|={abs(d):.3g}); "
                "use the desingularized system"
            )
        return d

    @property
    def u_F(self) -> float:
        return float(self.u_fold_left)

    @property
    def u_J(self) -> float:
        return float(self.u_jump)

    @property
    def v_F(self) -> float:
        return float(_horner_exact(self.f_coeffs, self.u_fold_left))


def _strip(coeffs: Coeffs) -> Coeffs:
    i = 0
    while i < len(coeffs) - 1 and coeffs[i] == 0:
        i += 1
    return coeffs[i:]


@lru_cache(maxsize=1)
def default_model() -> ModelFunctions:
    """The shipped model.

    D(U) = 6(U - 7/12)(U - 3/4), R(U) = 5U(1 - U)(U - 1/5),
    F(U) = 2U^3 - 4U^2 + 21/8 U.
    """
    F = Fraction
    return ModelFunctions(
        d_coeffs=(F(6), F(-8), F(21, 8)),
        r_coeffs=(F(-5), F(6), F(-1), F(0)),
        f_coeffs=(F(2), F(-4), F(21, 8), F(0)),
        u_fold_left=F(7, 12),
        u_fold_right=F(3, 4),
        u_jump=F(5, 6),
    )


def eval_model(u: ArrayLike, model: ModelFunctions = None) -> ModelValues:
    """Evaluate D, R, F, R', D' at ``u`` in floating point."""
    return (model or default_model()).evaluate(u)


def eval_model_exact(u, model: ModelFunctions = None) -> ModelValues:
    """Evaluate D, R, F, R', D' at ``u`` in rational arithmetic."""
    return (model or default_model()).evaluate_exact(u)
