"""Spectral diagnostics for energy-equality criteria of periodic 3D
incompressible flow: dyadic shells, Besov and weak-Lebesgue norms,
energy-flux balances, parameter-region classification, the intermittency
cascade model, and a pseudo-spectral solver that feeds them."""

__version__ = "0.1.0"

from .spectral import (  # noqa: F401
    Grid,
    Trajectory,
    VelocityField,
    from_physical,
    leray_project,
    lp_norm,
    make_grid,
    to_physical,
)
