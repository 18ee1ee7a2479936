import re
from typing import List, Sequence, Tuple

from ..exceptions import ConfigError


def parse_complex(text) -> complex:
    """Parse a complex number written like ``0.2+0.3i``, ``-1j`` or ``0.5``.

    Raises:
        ConfigError: If the text is not a complex number
    """
    if isinstance(text, (int, float, complex)) and not isinstance(text, bool):
        return complex(text)
    raw = str(text).strip().replace(" ", "")
    if not raw:
        raise ConfigError("Empty complex number")
    normalized = raw.replace("I", "i")
    if normalized.endswith("i"):
        normalized = normalized[:-1] + "j"
        if normalized[-2:-1] in ("", "+", "-"):
            normalized = normalized[:-1] + "1j"
    try:
        return complex(normalized)
    except ValueError:
        raise ConfigError(f"Invalid complex number: {text!r}. Use e.g. 0.2+0.3i")


def parse_float_list(value) -> List[float]:
    """Parse ``1e-2,3e-3`` or a YAML list into floats."""
    if isinstance(value, (list, tuple)):
        items = value
    else:
        items = [part for part in re.split(r"[,\s]+", str(value).strip()) if part]
    try:
        return [float(item) for item in items]
    except (TypeError, ValueError):
        raise ConfigError(f"Invalid list of numbers: {value!r}")


def parse_interval(value: Sequence) -> Tuple[float, float]:
    """Parse a two-element interval with lower < upper."""
    numbers = parse_float_list(value)
    if len(numbers) != 2:
        raise ConfigError(f"An interval needs exactly two numbers, got {value!r}")
    lower, upper = numbers
    if lower >= upper:
        raise ConfigError(f"Interval lower bound must be below upper bound: {value!r}")
    return lower, upper
