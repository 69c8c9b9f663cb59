"""Linearized gravitational waves along z: TT polarization algebra and the GW RSE.

Index order is (t, x, y, z) with metric signature eta = diag(-1, 1, 1, 1)
and c = 1 throughout.  Wavevectors are passed with upper indices, so
k = (omega, 0, 0, omega) gives k.x = omega (z - t).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    GridMismatch,
    NonNullWavevector,
    NotNormalized,
    NotSinglePhase,
    TimeSliceMismatch,
    ZeroField,
)
from .fieldcore import Grid1D, PhysParams, derivative_samples
from .evolvers import rse_phase
from .madelung import HJReport, NORMALIZATION_TOL, RHO_MIN_FRACTION, _log_derivatives

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])
ETA.flags.writeable = False

SINGLE_PHASE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class PolTensor:
    """Symmetric 4x4 polarization (or metric perturbation) tensor.

    Entries are normally real; complex entries are accepted so that the
    circular combinations e_plus +/- i e_cross can be represented.
    """

    m: np.ndarray

    def __post_init__(self):
        arr = np.array(self.m)
        if arr.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {arr.shape}")
        if not np.array_equal(arr, arr.T):
            raise ValueError("polarization tensor must be symmetric")
        dtype = np.complex128 if np.iscomplexobj(arr) else np.float64
        arr = arr.astype(dtype)
        arr.flags.writeable = False
        object.__setattr__(self, "m", arr)

    def __add__(self, other):
        return PolTensor(self.m + other.m)

    def __sub__(self, other):
        return PolTensor(self.m - other.m)

    def __mul__(self, scale):
        return PolTensor(self.m * scale)

    __rmul__ = __mul__

    def allclose(self, other, atol=0.0) -> bool:
        return bool(np.max(np.abs(self.m - other.m)) <= atol)


def frobenius_inner(X: PolTensor, Y: PolTensor):
    """<X|Y> = Tr(X^dagger Y) / 2; a float for real inputs."""
    val = 0.5 * np.trace(np.conj(X.m).T @ Y.m)
    return complex(val) if np.iscomplexobj(val) else float(val)


def basis_tensors() -> tuple[PolTensor, PolTensor]:
    """(e_plus, e_cross), the unit TT polarization tensors for propagation along z."""
    plus = np.zeros((4, 4))
    plus[1, 1], plus[2, 2] = 1.0, -1.0
    cross = np.zeros((4, 4))
    cross[1, 2] = cross[2, 1] = 1.0
    return PolTensor(plus), PolTensor(cross)


def ket(index: int) -> np.ndarray:
    v = np.zeros(4)
    v[index] = 1.0
    return v


def basis_from_kets() -> tuple[PolTensor, PolTensor]:
    """e_plus = |++> - |-->, e_cross = |+-> + |-+> with |+> = x, |-> = y."""
    up, down = ket(1), ket(2)
    plus = np.outer(up, up) - np.outer(down, down)
    cross = np.outer(up, down) + np.outer(down, up)
    return PolTensor(plus), PolTensor(cross)


class TTViolations(NamedTuple):
    temporal: float
    trace: float
    longitudinal: float

    def max(self) -> float:
        return max(self)


def tt_gauge_check(h: PolTensor) -> TTViolations:
    """Departures from h_t. = 0, zero spatial trace and h_z. = 0."""
    m = h.m
    return TTViolations(
        temporal=float(np.max(np.abs(m[0, :]))),
        trace=float(abs(np.trace(m[1:, 1:]))),
        longitudinal=float(np.max(np.abs(m[3, :]))),
    )


def lower(k) -> np.ndarray:
    return ETA @ np.asarray(k, dtype=float)


def minkowski_dot(a, b) -> float:
    return float(np.asarray(a) @ ETA @ np.asarray(b))


def check_null(k):
    k = np.asarray(k, dtype=float)
    if k.shape != (4,):
        raise ValueError("wavevector must have 4 components")
    kk = minkowski_dot(k, k)
    if abs(kk) > 1e-12 * float(k @ k):
        raise NonNullWavevector(f"k.k = {kk!r} is not zero")
    return k


def gauge_constraint_residual(alpha: PolTensor, k) -> float:
    """max_mu |k_nu alpha^nu_mu - (1/2) k_mu alpha^nu_nu| for h = alpha exp(i k.x)."""
    k_up = check_null(k)
    k_low = lower(k_up)
    mixed = ETA @ alpha.m  # alpha^nu_mu, first index raised
    divergence = k_low @ mixed
    trace = np.trace(mixed)
    return float(np.max(np.abs(divergence - 0.5 * k_low * trace)))


def rotation_z(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    r = np.eye(4)
    r[1:3, 1:3] = [[c, -s], [s, c]]
    return r


def rotate_about_z(X: PolTensor, theta: float) -> PolTensor:
    r = rotation_z(theta)
    out = r @ X.m @ r.T
    # the product is symmetric only up to rounding
    return PolTensor(0.5 * (out + out.T))


def build_h(alpha: PolTensor, k, x) -> PolTensor:
    """Real plane-wave solution alpha e^{ik.x} + c.c. = 2 alpha cos(k.x)."""
    if np.iscomplexobj(alpha.m):
        raise ValueError("build_h takes a real amplitude tensor")
    phase = minkowski_dot(check_null(k), x)
    return PolTensor(2.0 * alpha.m * np.cos(phase))


def sample_h(alpha: PolTensor, k, grid: Grid1D, t: float = 0.0) -> np.ndarray:
    """h_{mu nu}(t, z_j) for every grid point, shape (n, 4, 4)."""
    k = check_null(k)
    phases = np.array([minkowski_dot(k, (t, 0.0, 0.0, z)) for z in grid.x])
    return 2.0 * alpha.m[None, :, :] * np.cos(phases)[:, None, None]


def metric(h: PolTensor) -> np.ndarray:
    """g = eta + h."""
    return ETA + h.m


def _frozen(values, n):
    arr = np.array(values, dtype=np.complex128)
    if arr.shape != (n,):
        raise ValueError(f"expected {n} samples, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("samples must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class GWState:
    """Plus and cross envelopes of |psi> = f_plus |e_plus> + f_cross |e_cross>."""

    grid: Grid1D
    f_plus: np.ndarray
    f_cross: np.ndarray
    params: PhysParams
    time: float = 0.0

    def __post_init__(self):
        if self.params.c != 1.0:
            raise ValueError("gravitational-wave states use c = 1")
        object.__setattr__(self, "f_plus", _frozen(self.f_plus, self.grid.n))
        object.__setattr__(self, "f_cross", _frozen(self.f_cross, self.grid.n))

    def replace(self, f_plus=None, f_cross=None, time=None) -> "GWState":
        return GWState(
            self.grid,
            self.f_plus if f_plus is None else f_plus,
            self.f_cross if f_cross is None else f_cross,
            self.params,
            self.time if time is None else time,
        )

    def swapped(self) -> "GWState":
        return self.replace(self.f_cross, self.f_plus)

    def tensor_at(self, j: int) -> np.ndarray:
        plus, cross = basis_tensors()
        return self.f_plus[j] * plus.m + self.f_cross[j] * cross.m


def gw_plane_state(
    grid: Grid1D, params: PhysParams, k: float | None = None, t: float = 0.0
) -> GWState:
    """Normalized f_plus = f_cross = exp(i(kz - omega t)) / sqrt(2L)."""
    from .fieldcore import commensurate_mode

    k = params.omega if k is None else k
    commensurate_mode(grid, k)
    f = np.exp(1j * (k * grid.x - params.omega * t)) / np.sqrt(2.0 * grid.length)
    return GWState(grid, f, f, params, t)


def gw_evolve(state: GWState, t: float) -> GWState:
    """Exact propagation of i d_t|psi> = -(1/omega) d_z^2 |psi> for each envelope."""
    if t == 0:
        return state
    phase = rse_phase(state.grid, state.params, t)
    fp = np.fft.ifft(np.fft.fft(state.f_plus) * phase)
    fc = np.fft.ifft(np.fft.fft(state.f_cross) * phase)
    return state.replace(fp, fc, state.time + t)


def gw_norm_and_inner(a: GWState, b: GWState) -> complex:
    """int <a|b> dz with the Frobenius product, <e_i|e_j> = delta_ij."""
    if a.grid != b.grid:
        raise GridMismatch(f"grid mismatch: {a.grid} vs {b.grid}")
    plus, cross = basis_tensors()
    g_pp = frobenius_inner(plus, plus)
    g_cc = frobenius_inner(cross, cross)
    g_pc = frobenius_inner(plus, cross)
    total = (
        g_pp * np.vdot(a.f_plus, b.f_plus)
        + g_cc * np.vdot(a.f_cross, b.f_cross)
        + g_pc * (np.vdot(a.f_plus, b.f_cross) + np.vdot(a.f_cross, b.f_plus))
    )
    return complex(total * a.grid.spacing)


def gw_normalize(state: GWState) -> GWState:
    nrm2 = gw_norm_and_inner(state, state).real
    if nrm2 < 1e-60:
        raise ZeroField("cannot normalize a vanishing GW state")
    s = 1.0 / np.sqrt(nrm2)
    return state.replace(state.f_plus * s, state.f_cross * s)


def gw_madelung_and_expectations(state: GWState, state_dt: GWState) -> HJReport:
    """Polar diagnostics of |psi> = R e^{iS/hbar} (|e_plus> + |e_cross>).

    Written in the action form: Q = -(hbar^2/2m*) R''/R, HJ residual
    d_t S + (d_z S)^2/2m* + Q over hbar omega, continuity d_z(R^2 d_z W),
    Poynting d_z(E j_z), with m* = hbar omega / 2 and the convention
    int 2 R^2 dz = 1.
    """
    if state.grid != state_dt.grid:
        raise TimeSliceMismatch("GW slices live on different grids")
    for s in (state, state_dt):
        scale = np.linalg.norm(s.f_plus)
        if scale == 0 or np.linalg.norm(s.f_plus - s.f_cross) > SINGLE_PHASE_TOL * scale:
            raise NotSinglePhase("f_plus and f_cross must coincide for a single overall phase")
    nrm2 = gw_norm_and_inner(state, state).real
    if abs(nrm2 - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"int <psi|psi> dz = {nrm2!r}")

    p = state.params
    hbar, omega = p.hbar, p.omega
    mstar = p.effective_mass()
    grid = state.grid
    dt = state_dt.time - state.time
    if dt == 0:
        raise TimeSliceMismatch("the two slices have the same time")

    f0, f1 = state.f_plus, state_dt.f_plus
    amp2 = np.abs(f0) ** 2
    mask = amp2 >= RHO_MIN_FRACTION * amp2.max()
    mask &= np.abs(f1) ** 2 >= RHO_MIN_FRACTION * amp2.max()

    ds_dt = hbar * np.angle(f1 * np.conj(np.where(mask, f0, 1.0))) / dt
    ds_dz = np.zeros(grid.n)
    r_curv = np.zeros(grid.n)
    flux_div = np.zeros(grid.n)
    for f in (f0, f1):
        d2 = derivative_samples(f, grid, 2)
        dphi, curv = _log_derivatives(f, grid, mask)
        ds_dz += 0.5 * hbar * dphi
        r_curv += 0.5 * curv
        # d_z(R^2 d_z W) = hbar Im(f* f'')
        flux_div += 0.5 * hbar * (np.conj(f) * d2).imag

    q = -(hbar**2) / (2.0 * mstar) * r_curv
    hj = ds_dt + ds_dz**2 / (2.0 * mstar) + q
    hj_res = float(np.max(np.abs(hj[mask]))) / (hbar * omega)

    r2 = 0.5 * (np.abs(f0) ** 2 + np.abs(f1) ** 2)
    cont_scale = hbar * float(r2.max()) * (omega**2 + grid.fundamental**2)
    cont_res = float(np.max(np.abs(flux_div[mask]))) / cont_scale

    ham = ds_dz**2 / (2.0 * mstar) + q
    ham_res = float(np.max(np.abs((ham - (hbar * omega + q))[mask]))) / (hbar * omega)

    energy = hbar * omega
    d1 = derivative_samples(f0, grid, 1)
    # <psi|d_z psi> under the Frobenius product: <e|e> = 2 for equal envelopes
    j_z = 2.0 * hbar / mstar * (np.conj(f0) * d1).imag
    s_z = energy * j_z
    div_s = derivative_samples(s_z, grid, 1)
    s_scale = max(float(np.max(np.abs(s_z))),
                  energy * 2.0 * hbar / mstar * float(amp2.max()) * grid.fundamental)
    poyn_res = float(np.max(np.abs(div_s))) / (s_scale / grid.length)

    fmid = 0.5 * (f0 + f1)
    dfdt = (f1 - f0) / dt
    e_val = 1j * hbar * 2.0 * np.vdot(fmid, dfdt) * grid.spacing
    e_val /= 2.0 * np.vdot(fmid, fmid).real * grid.spacing
    p_val = -0.5j * hbar * 2.0 * (np.vdot(f0, d1) - np.vdot(d1, f0)) * grid.spacing

    return HJReport(
        q_field=np.where(mask, q, np.nan),
        hj_residual=hj_res,
        continuity_residual=cont_res,
        hamiltonian_identity_residual=ham_res,
        energy_expectation=float(e_val.real),
        momentum_expectation=float(p_val.real),
        hj_residual_action_form=hj_res,
        poynting_residual=poyn_res,
        mask=mask,
    )
