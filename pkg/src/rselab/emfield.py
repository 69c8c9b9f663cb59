"""Field-theoretic densities of the massless complex scalar and polarization states.

The scalar densities are written in c = 1 form,

    L = psi_dot* psi_dot - grad psi* . grad psi
    H = pi* pi + grad psi* . grad psi,     pi = psi_dot*

and correspond to (E^2/c^2 - B^2) and (E^2/c^2 + B^2)/2 of the vector
potential picture.  That correspondence is not computed here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroField
from .fieldcore import (
    ZERO_NORM_FLOOR,
    PhysParams,
    ScalarField,
    check_same_grid,
    derivative_samples,
    normalize,
)


def _grad(psi: ScalarField) -> np.ndarray:
    return derivative_samples(psi.samples, psi.grid, 1)


def conjugate_momentum(psi_dot: ScalarField) -> ScalarField:
    """pi = psi_dot*."""
    return psi_dot.replace(np.conj(psi_dot.samples))


def lagrangian_density(psi: ScalarField, psi_dot: ScalarField) -> np.ndarray:
    check_same_grid(psi, psi_dot)
    g = _grad(psi)
    return (np.abs(psi_dot.samples) ** 2 - np.abs(g) ** 2).astype(float)


def hamiltonian_density(psi: ScalarField, pi_conj: ScalarField) -> np.ndarray:
    """pi* pi + |grad psi|^2; non-negative by construction."""
    check_same_grid(psi, pi_conj)
    g = _grad(psi)
    return (np.abs(pi_conj.samples) ** 2 + np.abs(g) ** 2).astype(float)


def total_energy(psi: ScalarField, pi_conj: ScalarField) -> float:
    """int H dx."""
    return float(np.sum(hamiltonian_density(psi, pi_conj)) * psi.grid.spacing)


def momentum_density(
    psi: ScalarField, psi_dot: ScalarField, params: PhysParams | None = None
) -> np.ndarray:
    """-(1/2c)(psi_dot* grad psi + psi_dot grad psi*).

    The overall sign makes the density point along the direction of
    propagation: +omega k for exp(i(kx - omega t)).
    """
    check_same_grid(psi, psi_dot)
    c = 1.0 if params is None else params.c
    g = _grad(psi)
    dot = psi_dot.samples
    return -((np.conj(dot) * g + dot * np.conj(g)) / (2.0 * c)).real


@dataclass(frozen=True)
class JonesVector:
    ex: complex
    ey: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.ex, self.ey], dtype=complex)

    @property
    def intensity(self) -> float:
        return abs(self.ex) ** 2 + abs(self.ey) ** 2


def jones_normalize(v: JonesVector) -> JonesVector:
    total = v.intensity
    if total < ZERO_NORM_FLOOR:
        raise ZeroField("cannot normalize a zero Jones vector")
    s = 1.0 / np.sqrt(total)
    return JonesVector(complex(v.ex * s), complex(v.ey * s))


def jones_from_phases(psi0: complex, e_x: float, e_y: float, phi_x: float, phi_y: float):
    """Normalized Jones vector of E_x = psi0 e_x e^{i phi_x}, E_y = psi0 e_y e^{i phi_y}."""
    return jones_normalize(
        JonesVector(psi0 * e_x * np.exp(1j * phi_x), psi0 * e_y * np.exp(1j * phi_y))
    )


@dataclass(frozen=True)
class PolState:
    """Angles of e^{i phi_g}(cos theta, e^{i chi_p} sin theta)."""

    phi_g: float = 0.0
    theta: float = 0.0
    chi_p: float = 0.0


def pol_state_vector(p: PolState) -> np.ndarray:
    return np.exp(1j * p.phi_g) * np.array(
        [np.cos(p.theta), np.exp(1j * p.chi_p) * np.sin(p.theta)]
    )


def product_state(psi: ScalarField, p: PolState) -> np.ndarray:
    """(psi/||psi||) (x) |eps>, shape (n, 2)."""
    unit = normalize(psi)
    return np.outer(unit.samples, pol_state_vector(p))


def product_state_intensity(psi: ScalarField, p: PolState) -> float:
    state = product_state(psi, p)
    return float(np.sqrt(np.sum(np.abs(state) ** 2) * psi.grid.spacing))
