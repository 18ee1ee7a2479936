import csv
from pathlib import Path
from typing import Dict, Iterable, List, Sequence

import numpy as np

from .exceptions import ReportError
from .models import SingularOrbit, WaveProfile


ORBIT_HEADERS = ["segment", "tau", "U", "P"]
PROFILE_HEADERS = ["xi", "u", "p", "v"]
BORDER_HEADERS = ["k", "re_lambda", "im_lambda", "end", "order", "eps", "a"]
EVANS_HEADERS = ["re_lambda", "im_lambda", "re_E", "im_E"]
SCAN_HEADERS = EVANS_HEADERS
CONVERGENCE_HEADERS = ["ubar", "re_S", "im_S", "eps"]
RICCATI_PATH_HEADERS = ["ubar", "re_S", "im_S", "segment"]


def _format(value) -> str:
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_rows(path: Path, headers: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write a header row plus data rows; floats at 17 significant digits, LF endings.

    Raises:
        ReportError: If the file cannot be written
    """
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as csvfile:
            writer = csv.writer(csvfile, lineterminator="\n")
            writer.writerow(headers)
            for row in rows:
                if len(row) != len(headers):
                    raise ValueError(f"row has {len(row)} fields, expected {len(headers)}")
                writer.writerow([_format(value) for value in row])
    except (OSError, ValueError) as e:
        raise ReportError(f"Error writing {path.name}: {e}")
    return path


def read_rows(path: Path) -> List[Dict[str, str]]:
    """Read a CSV written by ``write_rows`` back into dicts."""
    try:
        with open(path, "r", newline="", encoding="utf-8") as csvfile:
            return list(csv.DictReader(csvfile))
    except FileNotFoundError:
        raise ReportError(f"CSV file not found: {path}")


def write_orbit(path: Path, orbit: SingularOrbit) -> Path:
    """Export the singular orbit: both slow segments, fold/jump at tau = 0.

    Output format:
    segment,tau,U,P
    left,-40.1,1.0000000000000001e-08,...
    """
    rows = []
    for name, seg in (("left", orbit.left_segment), ("right", orbit.right_segment)):
        rows.extend((name, t, u, p) for t, u, p in zip(seg.tau, seg.U, seg.P))
    return write_rows(path, ORBIT_HEADERS, rows)


def write_profile(path: Path, profile: WaveProfile) -> Path:
    rows = [(xi, *state) for xi, state in zip(profile.grid, profile.states)]
    return write_rows(path, PROFILE_HEADERS, rows)


def write_borders(path: Path, samples_by_eps: Dict[float, Iterable]) -> Path:
    """Border polylines; one block of DispersionSample rows per eps."""
    rows = []
    for eps, samples in samples_by_eps.items():
        for s in samples:
            rows.append((s.k, s.lam.real, s.lam.imag, s.end, s.order, float(eps),
                         float(s.a)))
    return write_rows(path, BORDER_HEADERS, rows)


def write_evans_samples(path: Path, pairs: Iterable) -> Path:
    """(lambda, E(lambda)) pairs, e.g. from a contour sweep."""
    rows = [
        (complex(lam).real, complex(lam).imag, complex(val).real, complex(val).imag)
        for lam, val in pairs
    ]
    return write_rows(path, EVANS_HEADERS, rows)


def write_scan(path: Path, samples: Iterable) -> Path:
    """Real-axis scan: real lambda against the real E, imaginary parts zero."""
    rows = [(float(l), 0.0, float(e), 0.0) for l, e in samples]
    return write_rows(path, SCAN_HEADERS, rows)


def write_convergence(path: Path, report, stride: int = 10) -> Path:
    """Projected S = p/v against u_bar for every eps."""
    rows = []
    for result in report.results:
        for u, s in zip(result.ubar[::stride], result.S[::stride]):
            if np.isfinite(s):
                rows.append((float(u), float(s.real), float(s.imag), result.eps))
    return write_rows(path, CONVERGENCE_HEADERS, rows)


def write_riccati_path(path: Path, reduced) -> Path:
    """Reduced solution plus jump graph as S = P/V against U."""
    S = reduced.ratio()
    names = np.array(["left", "jump", "right"])
    rows = [
        (float(u), float(s.real), float(s.imag), names[k])
        for u, s, k in zip(reduced.U, S, reduced.segment)
        if np.isfinite(s)
    ]
    return write_rows(path, RICCATI_PATH_HEADERS, rows)
