"""Thin wrappers around ``scipy.integrate.solve_ivp``."""

import logging
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from ..exceptions import ShootingError
from ..models import Tolerances

logger = logging.getLogger(__name__)


def event(fn: Callable, *, terminal: bool = True, direction: float = 0.0) -> Callable:
    """Tag ``fn`` as a solve_ivp event function."""
    fn.terminal = terminal
    fn.direction = direction
    return fn


def integrate(
    fun: Callable,
    t_span: Sequence[float],
    y0,
    tol: Tolerances,
    *,
    events: Optional[Sequence[Callable]] = None,
    dense_output: bool = False,
    method: Optional[str] = None,
    t_eval=None,
    **options,
):
    """Run solve_ivp and raise ShootingError when the solver itself fails."""
    sol = solve_ivp(
        fun,
        t_span,
        y0,
        method=method or tol.method,
        rtol=tol.rtol,
        atol=tol.atol,
        events=events,
        dense_output=dense_output,
        t_eval=t_eval,
        **options,
    )
    if sol.status == -1:
        raise ShootingError(f"integration failed on {tuple(t_span)}: {sol.message}")
    logger.debug(
        "solve_ivp %s over %s: %d steps, status %d",
        method or tol.method,
        tuple(t_span),
        len(sol.t),
        sol.status,
    )
    return sol


def first_event(sol, index: int):
    """Return (t, y) of the first occurrence of event ``index`` or None."""
    if sol.t_events is None or len(sol.t_events[index]) == 0:
        return None
    return sol.t_events[index][0], sol.y_events[index][0]


def to_real(z: np.ndarray) -> np.ndarray:
    """Stack real and imaginary parts of a complex vector."""
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag])


def to_complex(y: np.ndarray) -> np.ndarray:
    """Inverse of ``to_real`` along the first axis."""
    n = y.shape[0] // 2
    return y[:n] + 1j * y[n:]


def real_split(fun: Callable) -> Callable:
    """Wrap a complex right-hand side ``fun(t, z)`` for real-only solvers."""

    def wrapped(t, y):
        return to_real(fun(t, to_complex(y)))

    return wrapped
