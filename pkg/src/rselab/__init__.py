"""Desk-scale laboratory for massless free fields: wave equation, RSE, Helmholtz,
Madelung diagnostics, linearized gravitational waves and polarization states."""

from .fieldcore import (
    DerivMethod,
    Grid1D,
    PhysParams,
    ScalarField,
    commutator_residual,
    derivative,
    inner_product,
    make_gaussian,
    make_plane_wave,
    make_standing_wave,
    normalize,
)

__all__ = [
    "DerivMethod",
    "Grid1D",
    "PhysParams",
    "ScalarField",
    "commutator_residual",
    "derivative",
    "inner_product",
    "make_gaussian",
    "make_plane_wave",
    "make_standing_wave",
    "normalize",
]
__version__ = "0.1.0"
