"""Custom exceptions for wavespec."""


class WavespecError(Exception):
    """Base exception for all wavespec errors."""
    pass


class ConfigError(WavespecError):
    """Raised when configuration or command-line values are malformed or unknown."""
    pass


class ModelError(WavespecError):
    """Raised when a model system is evaluated outside its domain."""
    pass


class ShootingError(WavespecError):
    """Raised when a shooting or root-finding procedure cannot produce a connection."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class HierarchyError(WavespecError):
    """Raised when the fast/slow eigenvalue hierarchy breaks down."""
    pass


class NonHyperbolicError(WavespecError):
    """Raised when a frozen fixed point of the Riccati flow is a double root."""
    pass


class SectionAtInfinityError(WavespecError):
    """Raised when a projective solution meets the section at S = infinity."""
    pass


class ContourError(WavespecError):
    """Raised when contour sampling cannot resolve the winding number."""
    pass


class GridError(WavespecError):
    """Raised when a sample grid is unusable for a residual check."""
    pass


class ReportError(WavespecError):
    """Raised when there's an issue writing reports, templates or manifests."""
    pass
