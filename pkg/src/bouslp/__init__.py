"""Boussinesq solver, dyadic-decomposition toolkit and estimate harness."""

__version__ = "0.1.0"

from bouslp.spectral import (  # noqa: F401
    Grid,
    SpectralField,
    VelocityField,
    advect,
    biot_savart,
    curl,
    dealias,
    divergence,
    gradient,
    laplacian,
    lp_norm,
    spectral_derivative,
)
