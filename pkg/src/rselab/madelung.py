"""Polar decomposition psi = sqrt(rho) exp(i phi) and its hydrodynamic identities.

Covers the quantum potential, the Hamilton-Jacobi and continuity pair, the
current density, the stationary Poynting theorem and the energy/momentum
expectation values.  Spatial derivatives of the phase are taken through the
complex field, ``grad phi = Im(grad psi / psi)``, so the 2pi branch of the
stored phase never enters a residual.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AllMasked, NotNormalized, NotStationary, TimeSliceMismatch
from .fieldcore import (
    Grid1D,
    PhysParams,
    ScalarField,
    check_same_grid,
    derivative_samples,
    inner_product,
)

RHO_MIN_FRACTION = 1e-10
STATIONARY_DRIFT_TOL = 1e-6
NORMALIZATION_TOL = 1e-8
DEFAULT_PROBE = 1e-4  # in units of 1/omega


@dataclass(frozen=True, eq=False)
class MadelungFields:
    """Density, unwrapped phase and trust mask of a field.

    ``phi`` holds the raw argument at masked points so that
    ``sqrt(rho) * exp(1j * phi)`` reproduces the field everywhere.
    """

    grid: Grid1D
    rho: np.ndarray
    phi: np.ndarray
    mask: np.ndarray
    time: float = 0.0
    rho_min: float = 0.0

    def reconstruct(self) -> np.ndarray:
        return np.sqrt(self.rho) * np.exp(1j * self.phi)

    def as_field(self) -> ScalarField:
        return ScalarField(self.grid, self.reconstruct(), self.time)


class HJReport(NamedTuple):
    q_field: np.ndarray
    hj_residual: float
    continuity_residual: float
    hamiltonian_identity_residual: float
    energy_expectation: float
    momentum_expectation: float
    hj_residual_action_form: float
    poynting_residual: float
    mask: np.ndarray


class Expectations(NamedTuple):
    energy: float
    momentum: float
    energy_imag: float
    momentum_imag: float


def default_rho_min(rho: np.ndarray) -> float:
    return RHO_MIN_FRACTION * float(np.max(rho))


def unwrap_masked(raw_phase: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Left-to-right unwrapping that restarts after every masked gap."""
    phi = np.array(raw_phase, dtype=float)
    prev = None
    for j in range(phi.size):
        if not mask[j]:
            prev = None
            continue
        if prev is not None:
            jump = phi[j] - phi[prev]
            phi[j] -= 2.0 * np.pi * np.round(jump / (2.0 * np.pi))
        prev = j
    return phi


def decompose(field: ScalarField, rho_min: float | None = None) -> MadelungFields:
    psi = field.samples
    rho = np.abs(psi) ** 2
    if rho_min is None:
        rho_min = default_rho_min(rho)
    if not rho_min > 0:
        raise AllMasked(f"rho_min must be > 0 (got {rho_min!r}); the field may vanish")
    mask = rho >= rho_min
    if not mask.any():
        raise AllMasked("no sample has rho >= rho_min")
    phi = unwrap_masked(np.angle(psi), mask)
    for arr in (rho, phi, mask):
        arr.flags.writeable = False
    return MadelungFields(field.grid, rho, phi, mask, field.time, float(rho_min))


def _log_derivatives(psi: np.ndarray, grid: Grid1D, mask: np.ndarray):
    """grad phi and lap(sqrt rho)/sqrt rho on unmasked points (0 elsewhere).

    A nodeless field has a smooth periodic sqrt(rho), which is differentiated
    directly.  Otherwise the curvature comes from
    psi''/psi = lap(sqrt rho)/sqrt rho - (grad phi)^2 + i(...),
    which stays smooth across the kinks of sqrt(rho) at nodes.
    """
    d1 = derivative_samples(psi, grid, 1)
    safe = np.where(mask, psi, 1.0)
    grad_phi = np.where(mask, (d1 / safe).imag, 0.0)
    if mask.all():
        amp = np.abs(psi)
        amp_curv = derivative_samples(amp, grid, 2) / amp
    else:
        d2 = derivative_samples(psi, grid, 2)
        amp_curv = np.where(mask, (d2 / safe).real + grad_phi**2, 0.0)
    return grad_phi, amp_curv


def phase_gradient(m: MadelungFields) -> np.ndarray:
    """grad phi computed from the stored phase samples alone.

    A fully unmasked phase is split into its winding ramp plus a periodic
    remainder that is differentiated spectrally.  Otherwise second-order
    differences are taken inside each unmasked run; masked points get 0.
    """
    grid, phi, mask = m.grid, m.phi, m.mask
    if mask.all():
        closing = np.angle(np.exp(1j * (phi[0] - phi[-1])))
        winding = (phi[-1] + closing - phi[0]) / grid.length
        periodic = phi - winding * grid.x
        return winding + derivative_samples(periodic, grid, 1)
    h = grid.spacing
    grad = np.zeros_like(phi)
    n = phi.size
    for j in range(n):
        if not mask[j]:
            continue
        left = j > 0 and mask[j - 1]
        right = j < n - 1 and mask[j + 1]
        if left and right:
            grad[j] = (phi[j + 1] - phi[j - 1]) / (2 * h)
        elif right:
            grad[j] = (phi[j + 1] - phi[j]) / h
        elif left:
            grad[j] = (phi[j] - phi[j - 1]) / h
    return grad


def quantum_potential(
    m: MadelungFields, params: PhysParams, method: str = "auto", sentinel=np.nan
) -> np.ndarray:
    """Q = -(hbar^2/2m*) lap(sqrt rho)/sqrt rho on unmasked points.

    ``method="auto"`` differentiates sqrt(rho) directly when no point is
    masked and otherwise goes through the smooth complex field, which stays
    spectrally accurate when sqrt(rho) has kinks at nodes.  ``"field"`` and
    ``"direct"`` force one route.  Masked points carry ``sentinel``.
    """
    if not m.mask.any():
        raise AllMasked("no unmasked points")
    coef = -(params.hbar**2) / (2.0 * params.effective_mass())
    if method == "auto":
        method = "direct" if m.mask.all() else "field"
    if method == "field":
        d2 = derivative_samples(m.reconstruct(), m.grid, 2)
        psi = np.where(m.mask, m.reconstruct(), 1.0)
        grad_phi = np.where(m.mask, (derivative_samples(m.reconstruct(), m.grid, 1) / psi).imag, 0.0)
        curv = np.where(m.mask, (d2 / psi).real + grad_phi**2, 0.0)
    elif method == "direct":
        amp = np.sqrt(m.rho)
        lap = derivative_samples(amp, m.grid, 2)
        curv = np.where(m.mask, lap / np.where(m.mask, amp, 1.0), 0.0)
    else:
        raise ValueError(f"unknown method {method!r}")
    return np.where(m.mask, coef * curv, sentinel)


def _masked_max(values, mask) -> float:
    return float(np.max(np.abs(values[mask]))) if mask.any() else 0.0


def _current_from_psi(psi: np.ndarray, grid: Grid1D, params: PhysParams) -> np.ndarray:
    d1 = derivative_samples(psi, grid, 1)
    return params.hbar / params.effective_mass() * (np.conj(psi) * d1).imag


def current_density(field: ScalarField, params: PhysParams) -> np.ndarray:
    """j = -(i hbar/2m*)(psi* grad psi - grad psi* psi), returned as real samples."""
    psi = field.samples
    d1 = derivative_samples(psi, field.grid, 1)
    j = -1j * params.hbar / (2.0 * params.effective_mass()) * (
        np.conj(psi) * d1 - np.conj(d1) * psi
    )
    return j.real


def current_density_polar(m: MadelungFields, params: PhysParams) -> np.ndarray:
    """j = rho grad W / m* with grad W = hbar grad phi (zero on masked points)."""
    grad_w = params.hbar * phase_gradient(m)
    return np.where(m.mask, m.rho * grad_w / params.effective_mass(), 0.0)


def hj_residuals(
    field_t0: ScalarField,
    field_t1: ScalarField | None,
    params: PhysParams,
    rho_min: float | None = None,
    energy: float | None = None,
) -> HJReport:
    """Hamilton-Jacobi, continuity and H = hbar omega + Q residuals.

    d phi/dt comes from the phase difference of the two slices and is
    centred at their midpoint, where the spatial terms are averaged.  When
    the caller asserts S = W - E t by passing ``energy``, d phi/dt = -E/hbar
    and ``field_t1`` may be None.

    Residuals (L-infinity over unmasked points):
      hj: d_t phi + (c^2/omega)(grad phi)^2 + Q/hbar, divided by omega
      continuity: div(rho grad phi), divided by
        max|rho lap phi| + max|grad rho . grad phi| + max(rho)(2pi/L)^2
      hamiltonian identity: |H - (hbar omega + Q)| / hbar omega with
        H = (grad W)^2 c^2 / (hbar omega) + Q.
    """
    grid = field_t0.grid
    omega, hbar = params.omega, params.hbar
    slices = [field_t0]
    if field_t1 is not None:
        check_same_grid(field_t0, field_t1, error=TimeSliceMismatch)
        slices.append(field_t1)
    elif energy is None:
        raise ValueError("field_t1 is required unless energy is given")

    decs = [decompose(f, rho_min) for f in slices]
    mask = np.logical_and.reduce([d.mask for d in decs])
    if not mask.any():
        raise AllMasked("no point is unmasked in every slice")

    if energy is not None:
        dphi_dt = np.full(grid.n, -energy / hbar)
    else:
        dt = field_t1.time - field_t0.time
        if dt == 0:
            raise TimeSliceMismatch("the two slices have the same time")
        ratio = field_t1.samples * np.conj(np.where(mask, field_t0.samples, 1.0))
        dphi_dt = np.angle(ratio) / dt

    grad_phi = np.zeros(grid.n)
    curv = np.zeros(grid.n)
    div_flux = np.zeros(grid.n)
    rho = np.zeros(grid.n)
    grad_rho = np.zeros(grid.n)
    for f in slices:
        gp, cv = _log_derivatives(f.samples, grid, mask)
        grad_phi += gp
        curv += cv
        psi = f.samples
        d1 = derivative_samples(psi, grid, 1)
        d2 = derivative_samples(psi, grid, 2)
        # div(rho grad phi) = Im(psi* lap psi)
        div_flux += (np.conj(psi) * d2).imag
        rho += np.abs(psi) ** 2
        grad_rho += 2.0 * (np.conj(psi) * d1).real
    ns = len(slices)
    grad_phi, curv, div_flux, rho, grad_rho = (
        a / ns for a in (grad_phi, curv, div_flux, rho, grad_rho)
    )

    q_red = -params.diffusion * curv  # Q / hbar
    q_field = np.where(mask, hbar * q_red, np.nan)

    hj = dphi_dt + params.diffusion * grad_phi**2 + q_red
    hj_res = _masked_max(hj, mask) / omega

    # same equation written with the action S = hbar phi and m*
    mstar = params.effective_mass()
    ds_dt = hbar * dphi_dt
    ds_dx = hbar * grad_phi
    q = hbar * q_red
    hj_action = ds_dt + ds_dx**2 / (2.0 * mstar) + q
    hj_action_res = _masked_max(hj_action, mask) / (hbar * omega)

    safe_rho = np.where(mask, rho, 1.0)
    lap_phi = np.where(mask, (div_flux - grad_rho * grad_phi) / safe_rho, 0.0)
    scale = (
        _masked_max(rho * lap_phi, mask)
        + _masked_max(grad_rho * grad_phi, mask)
        + float(np.max(rho)) * grid.fundamental**2
    )
    cont_res = _masked_max(div_flux, mask) / scale

    grad_w = hbar * grad_phi
    ham = grad_w**2 * params.c**2 / (hbar * omega) + q
    ham_res = _masked_max(ham - (hbar * omega + q), mask) / (hbar * omega)

    e_mean, p_mean = _ratio_expectations(slices, params, energy)
    poyn = poynting_divergence(field_t0, params)

    return HJReport(
        q_field=q_field,
        hj_residual=hj_res,
        continuity_residual=cont_res,
        hamiltonian_identity_residual=ham_res,
        energy_expectation=e_mean,
        momentum_expectation=p_mean,
        hj_residual_action_form=hj_action_res,
        poynting_residual=poyn,
        mask=mask,
    )


def _ratio_expectations(slices, params, energy):
    """<E>, <p> as normalization-independent ratios <psi|O|psi>/<psi|psi>."""
    f0 = slices[0]
    nrm2 = inner_product(f0, f0).real
    d1 = f0.replace(derivative_samples(f0.samples, f0.grid, 1))
    p = (-1j * params.hbar * inner_product(f0, d1)).real / nrm2
    if energy is not None:
        return float(energy), float(p)
    f1 = slices[1]
    mid = f0.replace(0.5 * (f0.samples + f1.samples))
    dpsi = f0.replace((f1.samples - f0.samples) / (f1.time - f0.time))
    e = (1j * params.hbar * inner_product(mid, dpsi)).real / inner_product(mid, mid).real
    return float(e), float(p)


def density_drift(field_t0: ScalarField, field_t1: ScalarField) -> float:
    """||rho(t1) - rho(t0)|| / ||rho(t0)||."""
    check_same_grid(field_t0, field_t1, error=TimeSliceMismatch)
    rho0 = np.abs(field_t0.samples) ** 2
    rho1 = np.abs(field_t1.samples) ** 2
    return float(np.linalg.norm(rho1 - rho0) / np.linalg.norm(rho0))


def poynting_vector(field: ScalarField, params: PhysParams, E_total: float | None = None):
    """S = E j with E defaulting to hbar omega."""
    energy = params.hbar * params.omega if E_total is None else E_total
    return energy * current_density(field, params)


def poynting_divergence(
    field: ScalarField,
    params: PhysParams,
    E_total: float | None = None,
    field_dt: ScalarField | None = None,
) -> float:
    """max|div S| / (E max|j| / L) for the stationary flux S = E j.

    ``field_dt`` is an optional later slice used to confirm stationarity;
    a relative density drift above 1e-6 raises NotStationary.  The
    denominator is floored at the current of a unit-winding mode of the
    same peak density, so fields with j = 0 stay well defined.
    """
    if field_dt is not None:
        drift = density_drift(field, field_dt)
        if drift > STATIONARY_DRIFT_TOL:
            raise NotStationary(f"density drift {drift:.3e} between slices")
    energy = params.hbar * params.omega if E_total is None else E_total
    grid = field.grid
    j = current_density(field, params)
    div = derivative_samples(energy * j, grid, 1)
    j_floor = (
        params.hbar / params.effective_mass()
        * float(np.max(np.abs(field.samples) ** 2))
        * grid.fundamental
    )
    scale = abs(energy) * max(float(np.max(np.abs(j))), j_floor) / grid.length
    return float(np.max(np.abs(div)) / scale)


def poynting_identity_residual(
    field: ScalarField,
    params: PhysParams,
    E_total: float | None = None,
    rho_min: float | None = None,
) -> float:
    """Relative max difference between S = E j and (E/m*) rho p, p = hbar grad phi."""
    energy = params.hbar * params.omega if E_total is None else E_total
    m = decompose(field, rho_min)
    s_flux = poynting_vector(field, params, energy)
    s_polar = energy / params.effective_mass() * m.rho * params.hbar * phase_gradient(m)
    diff = np.where(m.mask, s_flux - s_polar, 0.0)
    scale = max(float(np.max(np.abs(s_flux))), abs(energy) / params.effective_mass()
                * params.hbar * float(np.max(m.rho)) * field.grid.fundamental)
    return float(np.max(np.abs(diff)) / scale)


def expectations(
    field: ScalarField, field_dt: ScalarField, params: PhysParams
) -> Expectations:
    """<E> = i hbar int psi* d_t psi, <p> = (-i hbar/2) int psi* <-> d_x psi.

    d_t psi is the two-slice difference, centred at the midpoint.
    """
    nrm2 = inner_product(field, field).real
    if abs(nrm2 - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"||psi||^2 = {nrm2!r}")
    check_same_grid(field, field_dt, error=TimeSliceMismatch)
    dt = field_dt.time - field.time
    if dt == 0:
        raise TimeSliceMismatch("the two slices have the same time")
    mid = field.replace(0.5 * (field.samples + field_dt.samples))
    dpsi = field.replace((field_dt.samples - field.samples) / dt)
    e = 1j * params.hbar * inner_product(mid, dpsi)
    d1 = field.replace(derivative_samples(field.samples, field.grid, 1))
    # psi* d psi - (d psi*) psi, written as two inner products
    p = -0.5j * params.hbar * (inner_product(field, d1) - inner_product(d1, field))
    return Expectations(e.real, p.real, e.imag, p.imag)
