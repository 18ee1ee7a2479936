"""Closed contours in the lambda-plane and argument-principle winding numbers."""

import logging
import math
from bisect import insort
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import ContourError

logger = logging.getLogger(__name__)

MAX_SAMPLES = 4096
PHASE_STEP = math.pi / 2


@dataclass(frozen=True)
class SpectralContour:
    """Circle (center, radius) or closed polyline (vertices), positively oriented.

    Points are addressed by a parameter t in [0, 1).
    """
    kind: str = "circle"
    center: complex = 0j
    radius: float = 0.03
    vertices: Tuple[complex, ...] = ()
    n: int = 32

    def __post_init__(self):
        if self.kind == "circle":
            if self.radius <= 0:
                raise ValueError("circle radius must be positive")
        elif self.kind == "polyline":
            if len(self.vertices) < 3:
                raise ValueError("a polyline contour needs at least three vertices")
            object.__setattr__(self, "vertices", tuple(complex(v) for v in self.vertices))
        else:
            raise ValueError(f"unknown contour kind: {self.kind}")
        if self.n < 16:
            raise ValueError("contours need at least 16 initial samples")

    @classmethod
    def circle(cls, center: complex, radius: float, n: int = 32) -> "SpectralContour":
        return cls(kind="circle", center=complex(center), radius=radius, n=n)

    @classmethod
    def rectangle(cls, lower_left: complex, upper_right: complex,
                  n: int = 32) -> "SpectralContour":
        a, b = complex(lower_left), complex(upper_right)
        return cls(
            kind="polyline",
            vertices=(a, complex(b.real, a.imag), b, complex(a.real, b.imag)),
            n=n,
        )

    def _edges(self) -> List[Tuple[complex, complex, float]]:
        verts = list(self.vertices) + [self.vertices[0]]
        lengths = [abs(verts[i + 1] - verts[i]) for i in range(len(self.vertices))]
        total = sum(lengths)
        return [(verts[i], verts[i + 1], lengths[i] / total) for i in range(len(lengths))]

    def point(self, t: float) -> complex:
        t = t % 1.0
        if self.kind == "circle":
            return self.center + self.radius * complex(math.cos(2 * math.pi * t),
                                                       math.sin(2 * math.pi * t))
        acc = 0.0
        for start, end, share in self._edges():
            if t <= acc + share or share == 0:
                s = (t - acc) / share if share else 0.0
                return start + min(max(s, 0.0), 1.0) * (end - start)
            acc += share
        return self.vertices[0]

    def initial_parameters(self) -> List[float]:
        return [k / self.n for k in range(self.n)]

    def contains(self, z: complex) -> bool:
        """Point-in-contour test (used to pick sample points, not for counting)."""
        if self.kind == "circle":
            return abs(z - self.center) < self.radius
        ts = np.linspace(0.0, 1.0, 4 * len(self.vertices) + 1)
        pts = [self.point(t) - z for t in ts]
        return abs(winding_of_samples(pts)) == 1


def _wrap(delta: float) -> float:
    return (delta + math.pi) % (2 * math.pi) - math.pi


def winding_of_samples(values: Sequence[complex]) -> int:
    """Winding number around 0 of a closed sample sequence (last joins first)."""
    phases = np.angle(np.asarray(values, dtype=complex))
    steps = np.diff(np.append(phases, phases[0]))
    total = float(np.sum((steps + np.pi) % (2 * np.pi) - np.pi))
    return int(round(total / (2 * math.pi)))


@dataclass
class WindingResult:
    winding: int
    total_phase: float
    samples: Dict[float, complex] = field(default_factory=dict)
    points: Dict[float, complex] = field(default_factory=dict)

    def ordered(self) -> List[Tuple[complex, complex]]:
        return [(self.points[t], self.samples[t]) for t in sorted(self.samples)]


def winding_number(f: Callable[[complex], complex], contour: SpectralContour,
                   evaluate_many: Optional[Callable[[Iterable[complex]], List[complex]]]
                   = None,
                   max_samples: int = MAX_SAMPLES) -> WindingResult:
    """Winding of f around 0 along ``contour`` with adaptive refinement.

    Midpoints are inserted wherever the phase step between neighbours is at
    least pi/2, until every step is below that.

    Raises:
        ContourError: more than ``max_samples`` samples would be needed
    """
    def run(ts):
        lams = [contour.point(t) for t in ts]
        if evaluate_many is not None:
            vals = evaluate_many(lams)
        else:
            vals = [f(lam) for lam in lams]
        for t, lam, val in zip(ts, lams, vals):
            if val == 0 or not np.isfinite(val):
                raise ContourError(
                    f"contour passes through a zero or pole at lambda={lam}; "
                    "contour too close to zero/pole"
                )
            samples[t] = complex(val)
            points[t] = lam

    samples: Dict[float, complex] = {}
    points: Dict[float, complex] = {}
    params: List[float] = []
    for t in contour.initial_parameters():
        insort(params, t)
    run(params)

    while True:
        ordered = params + [params[0] + 1.0]
        values = [samples[t % 1.0] for t in ordered]
        steps = [_wrap(np.angle(values[i + 1]) - np.angle(values[i]))
                 for i in range(len(params))]
        total = float(sum(steps))
        coarse = [i for i, step in enumerate(steps) if abs(step) >= PHASE_STEP]
        if not coarse:
            break
        new = [0.5 * (ordered[i] + ordered[i + 1]) % 1.0 for i in coarse]
        if len(params) + len(new) > max_samples:
            raise ContourError(
                f"refinement cap of {max_samples} samples exceeded; "
                "contour too close to zero/pole"
            )
        logger.debug("winding refinement: %d samples, +%d", len(params), len(new))
        run(new)
        for t in new:
            insort(params, t)

    winding = int(round(total / (2 * math.pi)))
    return WindingResult(winding=winding, total_phase=total, samples=samples,
                         points=points)
