"""Time evolution and residuals for the wave equation, the RSE and Helmholtz.

The RSE ``i dpsi/dt = -(c^2/omega) d^2psi/dx^2`` is advanced with its exact
Fourier-space propagator.  The wave equation uses leapfrog with a spectral
Laplacian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CFLViolation, ZeroField
from .fieldcore import (
    ZERO_NORM_FLOOR,
    Grid1D,
    PhysParams,
    ScalarField,
    check_same_grid,
    derivative_samples,
)

MAX_CFL = 0.5


def _laplacian(samples, grid):
    return derivative_samples(samples, grid, 2)


def _l2(values) -> float:
    return float(np.linalg.norm(values))


@dataclass(frozen=True, eq=False)
class WaveState:
    """Two consecutive leapfrog slices, ``psi_prev`` one step ``dt`` behind."""

    psi: ScalarField
    psi_prev: ScalarField
    dt: float
    c: float = 1.0

    def __post_init__(self):
        check_same_grid(self.psi, self.psi_prev)
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be finite and > 0, got {self.dt!r}")
        if not self.c > 0:
            raise ValueError(f"c must be > 0, got {self.c!r}")

    @property
    def cfl(self) -> float:
        return self.c * self.dt / self.psi.grid.spacing

    @property
    def velocity(self) -> np.ndarray:
        """Backward-difference time derivative (psi - psi_prev) / dt."""
        return (self.psi.samples - self.psi_prev.samples) / self.dt


def stationary_wave_state(field: ScalarField, params: PhysParams, dt: float) -> WaveState:
    """Leapfrog start for a stationary field chi(x) exp(-i omega t)."""
    prev = field.replace(field.samples * np.exp(1j * params.omega * dt), field.time - dt)
    return WaveState(field, prev, dt, params.c)


def taylor_wave_state(
    psi: ScalarField, psi_dot: np.ndarray, dt: float, c: float = 1.0
) -> WaveState:
    """Second-order Taylor start from initial value and velocity."""
    lap = _laplacian(psi.samples, psi.grid)
    prev = psi.samples - dt * np.asarray(psi_dot) + 0.5 * (c * dt) ** 2 * lap
    return WaveState(psi, psi.replace(prev, psi.time - dt), dt, c)


def leapfrog_frequency(grid: Grid1D, dt: float, c: float = 1.0) -> np.ndarray:
    """Angular frequency of each grid mode under leapfrog with a spectral Laplacian."""
    arg = np.clip(c * dt * np.abs(grid.wavenumbers) / 2.0, 0.0, 1.0)
    return 2.0 * np.arcsin(arg) / dt


def traveling_wave_state(
    psi: ScalarField, dt: float, c: float = 1.0, direction: int = 1
) -> WaveState:
    """Start a pure one-way packet f(x -/+ ct) using the discrete dispersion.

    Each Fourier mode k is given the single time dependence
    exp(-i sign(k) direction w(k) t), so no counter-propagating component
    is excited by the start-up.
    """
    grid = psi.grid
    w = leapfrog_frequency(grid, dt, c)
    phase = np.exp(1j * direction * np.sign(grid.wavenumbers) * w * dt)
    prev = np.fft.ifft(np.fft.fft(psi.samples) * phase)
    return WaveState(psi, psi.replace(prev, psi.time - dt), dt, c)


def check_cfl(state: WaveState):
    if state.cfl > MAX_CFL:
        raise CFLViolation(f"CFL number {state.cfl:.4g} exceeds {MAX_CFL}")


def wave_evolve(state: WaveState, steps: int) -> WaveState:
    """Advance ``steps`` leapfrog steps of psi_tt = c^2 psi_xx."""
    check_cfl(state)
    if steps < 0:
        raise ValueError("steps must be non-negative")
    grid = state.psi.grid
    cur = np.array(state.psi.samples)
    prev = np.array(state.psi_prev.samples)
    coef = (state.c * state.dt) ** 2
    # Fourier-space update; the spectral Laplacian is diagonal there
    lap = -(grid.wavenumbers**2)
    cur_hat, prev_hat = np.fft.fft(cur), np.fft.fft(prev)
    for _ in range(steps):
        cur_hat, prev_hat = 2.0 * cur_hat - prev_hat + coef * lap * cur_hat, cur_hat
    t = state.psi.time + steps * state.dt
    return WaveState(
        ScalarField(grid, np.fft.ifft(cur_hat), t),
        ScalarField(grid, np.fft.ifft(prev_hat), t - state.dt),
        state.dt,
        state.c,
    )


def wave_energy(state: WaveState) -> float:
    """Discrete energy sum(|psi_dot|^2 + c^2 grad psi* . grad psi) dx.

    psi_dot is the backward difference between the two slices and the
    gradient term pairs the two slices, Re(grad psi_n* . grad psi_{n-1});
    this is the form leapfrog conserves exactly.
    """
    grid = state.psi.grid
    g_now = derivative_samples(state.psi.samples, grid, 1)
    g_prev = derivative_samples(state.psi_prev.samples, grid, 1)
    kinetic = np.abs(state.velocity) ** 2
    gradient = (np.conj(g_now) * g_prev).real
    return float(np.sum(kinetic + state.c**2 * gradient) * grid.spacing)


@dataclass(frozen=True, eq=False)
class RSEState:
    psi: ScalarField
    params: PhysParams


def rse_phase(grid: Grid1D, params: PhysParams, t: float) -> np.ndarray:
    """exp(-i (c^2/omega) k^2 t) for every grid mode."""
    return np.exp(-1j * params.diffusion * grid.wavenumbers**2 * t)


def rse_dispersion(grid: Grid1D, params: PhysParams) -> np.ndarray:
    """Omega(k) = c^2 k^2 / omega."""
    return params.diffusion * grid.wavenumbers**2


def rse_evolve(state: RSEState, t: float) -> RSEState:
    """Exact free propagation of the RSE for a duration ``t``."""
    psi = state.psi
    if t == 0:
        return state
    evolved = np.fft.ifft(np.fft.fft(psi.samples) * rse_phase(psi.grid, state.params, t))
    return RSEState(psi.replace(evolved, psi.time + t), state.params)


def free_gaussian(
    grid: Grid1D,
    params: PhysParams,
    sigma0: float,
    t: float,
    center: float | None = None,
    k0: float = 0.0,
) -> ScalarField:
    """Closed-form free-Schrodinger Gaussian with mass m* = hbar omega / 2c^2.

    At t = 0 this is ``fieldcore.make_gaussian``.  Valid on the periodic
    grid while the packet stays far from the box edges.
    """
    d = params.hbar / (2.0 * params.effective_mass())
    x0 = grid.length / 2 if center is None else center
    tau = 1.0 + 1j * d * t / sigma0**2
    dx = grid.x - x0
    shifted = dx - 2.0 * d * k0 * t
    samples = (
        (2.0 * np.pi * sigma0**2) ** -0.25
        / np.sqrt(tau)
        * np.exp(-(shifted**2) / (4.0 * sigma0**2 * tau) + 1j * k0 * dx - 1j * d * k0**2 * t)
    )
    return ScalarField(grid, samples, t)


def _require_nonzero(field: ScalarField) -> float:
    nrm = _l2(field.samples)
    if nrm < ZERO_NORM_FLOOR:
        raise ZeroField("residual of a vanishing field is undefined")
    return nrm


def helmholtz_residual(field: ScalarField, params: PhysParams) -> float:
    """||psi'' + k^2 psi|| / ||k^2 psi|| with k = omega/c."""
    nrm = _require_nonzero(field)
    k2 = params.k**2
    lap = _laplacian(field.samples, field.grid)
    return _l2(lap + k2 * field.samples) / (k2 * nrm)


@dataclass(frozen=True)
class ChainResiduals:
    wave: float
    rse: float
    helmholtz: float

    def max(self) -> float:
        return max(self.wave, self.rse, self.helmholtz)


def chain_consistency(
    field: ScalarField, params: PhysParams, dt_probe: float | None = None
) -> ChainResiduals:
    """Relative residuals of the wave equation, the RSE and Helmholtz.

    With ``dt_probe`` unset the time derivatives are those of the stationary
    ansatz (d/dt -> -i omega).  With ``dt_probe`` set they are measured by
    central differences of RSE-propagated slices at t +/- dt_probe, which is
    meaningful for non-stationary input.
    """
    nrm = _require_nonzero(field)
    psi = field.samples
    omega, c = params.omega, params.c
    lap = _laplacian(psi, field.grid)
    if dt_probe is None:
        dpsi_dt = -1j * omega * psi
        d2psi_dt2 = -(omega**2) * psi
    else:
        state = RSEState(field, params)
        ahead = rse_evolve(state, dt_probe).psi.samples
        behind = rse_evolve(state, -dt_probe).psi.samples
        dpsi_dt = (ahead - behind) / (2.0 * dt_probe)
        d2psi_dt2 = (ahead - 2.0 * psi + behind) / dt_probe**2
    scale = omega**2 / c**2 * nrm
    wave = _l2(lap - d2psi_dt2 / c**2) / scale
    rse = _l2(1j * dpsi_dt + params.diffusion * lap) / (omega * nrm)
    return ChainResiduals(wave, rse, helmholtz_residual(field, params))
