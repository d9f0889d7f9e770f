"""Spectral solver, bifurcation toolkit and particle simulator for the
midpoint-alignment kinetic model on the circle."""

__version__ = "0.1.0"

from .spectral import (
    CollisionKernel,
    CouplingTable,
    FejerFamily,
    FourierState,
    GaussianPeriodizedFamily,
    NoiseSpectrum,
    ScaledFamily,
    build_coupling_table,
    explicit_spectrum,
    fejer_spectrum,
    gamma_eval,
    periodized_spectrum,
    reconstruct_density,
)

__all__ = [
    "__version__",
    "CollisionKernel",
    "CouplingTable",
    "FejerFamily",
    "FourierState",
    "GaussianPeriodizedFamily",
    "NoiseSpectrum",
    "ScaledFamily",
    "build_coupling_table",
    "explicit_spectrum",
    "fejer_spectrum",
    "gamma_eval",
    "periodized_spectrum",
    "reconstruct_density",
]
