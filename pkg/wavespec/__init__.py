"""wavespec - travelling-wave construction and spectral stability for a regularized
reaction-nonlinear-diffusion equation."""

__version__ = "0.1.0"
__author__ = "wavespec developers"
