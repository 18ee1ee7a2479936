import os
import pathlib
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

import yaml
from appdirs import user_config_dir

from .exceptions import ConfigError
from .utils.parsing import parse_complex, parse_float_list, parse_interval


COMMANDS = ("wave", "espec", "evans", "converge", "verify")
DEFAULT_OUTPUT_DIR = "wavespec-out"
OUTPUT_ENV = "WAVESPEC_OUT"


def _as_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"Invalid boolean: {value!r}")


def _as_optional(convert: Callable) -> Callable:
    def wrapped(value):
        return None if value is None else convert(value)
    return wrapped


@dataclass(frozen=True)
class RunConfig:
    """Everything a single ``wavespec`` run needs."""
    command: str
    rtol: float = 1e-10
    atol: float = 1e-12
    shoot_tol: float = 1e-8
    method: str = "DOP853"
    stiff_method: str = "LSODA"
    c_bracket: Tuple[float, float] = (0.19, 0.23)
    eps: Optional[float] = None
    full: bool = False
    order: int = 3
    a: float = 1.0
    wavespeed: float = 0.199362
    lam: Optional[complex] = None
    contour_center: complex = 0j
    contour_radius: float = 0.03
    n: int = 32
    scan: Optional[Tuple[float, float]] = None
    eps_list: Tuple[float, ...] = (1e-2, 3e-3, 1e-3)
    beta: float = -0.95
    sigma: float = 0.95
    chart_threshold: float = 2.0
    offset: float = 1e-8
    workers: int = 1
    freeze_c: bool = True
    output_dir: Path = field(default_factory=lambda: Path(DEFAULT_OUTPUT_DIR))
    verbose: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"Unknown command: {self.command}")
        if self.rtol <= 0 or self.atol <= 0 or self.shoot_tol <= 0:
            raise ValueError("Tolerances must be positive")
        if self.n < 16:
            raise ValueError("Contour needs n >= 16 samples")
        if self.contour_radius <= 0:
            raise ValueError("Contour radius must be positive")
        if not -1.0 < self.beta < 0.0:
            raise ValueError("beta must lie in (R'(0), 0) = (-1, 0)")
        if self.order not in (3, 4):
            raise ValueError("order must be 3 or 4")
        if self.a < 0:
            raise ValueError("a must be non-negative")
        if not 5 / 6 < self.sigma < 1.0:
            raise ValueError("section sigma must lie in (5/6, 1)")
        if self.chart_threshold <= 1.0:
            raise ValueError("chart threshold must exceed 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        lo, hi = self.c_bracket
        if not 0 < lo < hi:
            raise ValueError(f"Invalid wavespeed bracket: {self.c_bracket}")
        if self.eps is not None and self.eps < 0:
            raise ValueError("eps must be non-negative")
        if self.command == "wave" and self.full:
            if self.eps is None or not 0 < self.eps <= 0.01:
                raise ValueError("wave --full needs 0 < eps <= 0.01")
        if self.command == "espec" and self.eps is not None and self.eps <= 0:
            raise ValueError("espec needs eps > 0")
        if self.scan is not None and self.scan[0] <= -1.0:
            raise ValueError("scan must start right of R'(0) = -1")
        if any(e <= 0 for e in self.eps_list) or any(
            b >= a for a, b in zip(self.eps_list, self.eps_list[1:])
        ):
            raise ValueError("eps list must be positive and strictly descending")

    def as_dict(self) -> Dict[str, Any]:
        """JSON-friendly echo of the configuration."""
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, complex):
                data[key] = [value.real, value.imag]
            elif isinstance(value, Path):
                data[key] = str(value)
            elif isinstance(value, tuple):
                data[key] = list(value)
        return data


CONVERTERS: Dict[str, Callable] = {
    "command": str,
    "rtol": float,
    "atol": float,
    "shoot_tol": float,
    "method": str,
    "stiff_method": str,
    "c_bracket": parse_interval,
    "eps": _as_optional(float),
    "full": _as_bool,
    "order": int,
    "a": float,
    "wavespeed": float,
    "lam": _as_optional(parse_complex),
    "contour_center": parse_complex,
    "contour_radius": float,
    "n": int,
    "scan": _as_optional(parse_interval),
    "eps_list": lambda v: tuple(parse_float_list(v)),
    "beta": float,
    "sigma": float,
    "chart_threshold": float,
    "offset": float,
    "workers": int,
    "freeze_c": _as_bool,
    "output_dir": Path,
    "verbose": _as_bool,
}


class ConfigManager:
    """Reads flat ``key = value`` configuration files."""

    CONFIG_PATH = pathlib.Path(user_config_dir("wavespec")) / "wavespec.conf"

    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path) if path is not None else self.CONFIG_PATH
        self._data: Dict[str, Any] = {}
        if path is not None and not self.path.exists():
            raise ConfigError(f"Config file not found: {self.path}")
        self.load()

    def load(self) -> None:
        """Load configuration from file (silently empty when the default is absent)."""
        if not self.path.exists():
            return
        try:
            text = self.path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Failed to load config: {e}")
        self._data = parse_config_text(text, source=str(self.path))

    def get(self, key: str, default=None):
        return self._data.get(key, default)

    def as_dict(self) -> Dict[str, Any]:
        return dict(self._data)


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, Any]:
    """Parse ``key = value`` lines; values go through ``yaml.safe_load``."""
    values: Dict[str, Any] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{number}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONVERTERS or key == "command":
            raise ConfigError(f"{source}:{number}: unknown key {key!r}")
        try:
            values[key] = yaml.safe_load(raw) if raw else None
        except yaml.YAMLError as e:
            raise ConfigError(f"{source}:{number}: malformed value {raw!r}: {e}")
    return values


def resolve_output_dir(flag: Optional[Path]) -> Path:
    """``--output-dir``, else $WAVESPEC_OUT, else ./wavespec-out."""
    if flag is not None:
        return Path(flag)
    env = os.environ.get(OUTPUT_ENV)
    return Path(env) if env else Path(DEFAULT_OUTPUT_DIR)


def parse_config(command: str, overrides: Optional[Mapping[str, Any]] = None,
                 config_file: Optional[Path] = None) -> RunConfig:
    """Build a RunConfig: explicit flags override the file, defaults fill the rest.

    ``overrides`` holds CLI values; ``None`` entries count as not given.

    Raises:
        ConfigError: Unknown key, malformed value or violated precondition
    """
    merged: Dict[str, Any] = ConfigManager(config_file).as_dict()
    for key, value in (overrides or {}).items():
        if key not in CONVERTERS:
            raise ConfigError(f"Unknown option: {key}")
        if value is not None:
            merged[key] = value
    merged["output_dir"] = resolve_output_dir(merged.get("output_dir"))

    kwargs: Dict[str, Any] = {"command": command}
    for key, value in merged.items():
        try:
            kwargs[key] = CONVERTERS[key](value)
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid value for {key}: {value!r} ({e})")
    try:
        return RunConfig(**kwargs)
    except ValueError as e:
        raise ConfigError(str(e))
