"""Periodic 1D grids, complex scalar fields and the derivative machinery.

Everything here is an immutable value.  Fields live on a uniform periodic
grid ``x_j = j * spacing`` for ``j = 0 .. n-1``; spectral derivatives use the
exact Fourier multipliers ``ik`` and ``-k**2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    GridMismatch,
    MarginTooSmall,
    NonCommensurateWavenumber,
    ZeroField,
)

ZERO_NORM_FLOOR = 1e-30


@dataclass(frozen=True)
class PhysParams:
    """Speed of light, unit of action and angular frequency of the mode."""

    c: float = 1.0
    hbar: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        for name in ("c", "hbar", "omega"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")

    def effective_mass(self) -> float:
        """m* = hbar * omega / (2 c**2)."""
        return self.hbar * self.omega / (2.0 * self.c**2)

    @property
    def k(self) -> float:
        """Wavenumber of the monochromatic mode, omega / c."""
        return self.omega / self.c

    @property
    def diffusion(self) -> float:
        """Coefficient c**2/omega of the Laplacian, equal to hbar / 2m*."""
        return self.c**2 / self.omega


@dataclass(frozen=True)
class Grid1D:
    n: int
    length: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8 or self.n % 2:
            raise ValueError(f"n must be an even integer >= 8, got {self.n!r}")
        if not (math.isfinite(self.length) and self.length > 0):
            raise ValueError(f"length must be finite and > 0, got {self.length!r}")
        object.__setattr__(self, "n", int(self.n))
        # store a length that is exactly n * spacing
        object.__setattr__(self, "length", float(self.n * (self.length / self.n)))

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.spacing

    @property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.spacing)

    @property
    def fundamental(self) -> float:
        return 2.0 * np.pi / self.length


def _frozen_complex(values, n=None) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"expected {n} samples, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("samples must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Complex samples of psi on ``grid`` at time ``time``."""

    grid: Grid1D
    samples: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen_complex(self.samples, self.grid.n))
        object.__setattr__(self, "time", float(self.time))

    def replace(self, samples=None, time=None) -> "ScalarField":
        return ScalarField(
            self.grid,
            self.samples if samples is None else samples,
            self.time if time is None else time,
        )

    def __mul__(self, scale):
        return self.replace(self.samples * scale)

    __rmul__ = __mul__

    def __add__(self, other: "ScalarField"):
        check_same_grid(self, other)
        return self.replace(self.samples + other.samples)


class DerivMethod(enum.Enum):
    SPECTRAL = "spectral"
    CENTRAL2 = "central2"


def check_same_grid(*fields, error=GridMismatch):
    first = fields[0].grid
    for f in fields[1:]:
        if f.grid != first:
            raise error(f"grid mismatch: {first} vs {f.grid}")


def commensurate_mode(grid: Grid1D, k: float) -> int:
    """Return the integer mode number m with k = m * 2pi/L, or raise."""
    ratio = k * grid.length / (2.0 * np.pi)
    m = round(ratio)
    if abs(ratio - m) > 1e-9:
        raise NonCommensurateWavenumber(
            f"k*L/2pi = {ratio!r} is not an integer (L = {grid.length})"
        )
    return int(m)


def make_plane_wave(
    grid: Grid1D, params: PhysParams, k: float, t: float = 0.0, amp: complex = 1.0
) -> ScalarField:
    """amp * exp(i(k x - omega t)) on a periodic grid; k must fit the box."""
    commensurate_mode(grid, k)
    samples = amp * np.exp(1j * (k * grid.x - params.omega * t))
    return ScalarField(grid, samples, t)


def make_standing_wave(
    grid: Grid1D, params: PhysParams, k: float, t: float = 0.0, amp: complex = 1.0
) -> ScalarField:
    """Sum of the +k and -k plane waves: 2 amp cos(kx) exp(-i omega t)."""
    commensurate_mode(grid, k)
    samples = 2.0 * amp * np.cos(k * grid.x) * np.exp(-1j * params.omega * t)
    return ScalarField(grid, samples, t)


def make_gaussian(
    grid: Grid1D,
    sigma: float,
    center: float | None = None,
    k0: float = 0.0,
    t: float = 0.0,
    normalized: bool = True,
) -> ScalarField:
    """Gaussian envelope with |psi|^2 of standard deviation ``sigma``.

    psi = (2 pi sigma^2)^(-1/4) exp(-(x-x0)^2/(4 sigma^2) + i k0 (x-x0)).
    """
    x0 = grid.length / 2 if center is None else center
    dx = grid.x - x0
    samples = np.exp(-(dx**2) / (4.0 * sigma**2) + 1j * k0 * dx)
    if normalized:
        samples = samples * (2.0 * np.pi * sigma**2) ** -0.25
    return ScalarField(grid, samples, t)


def _spectral(samples: np.ndarray, grid: Grid1D, order: int) -> np.ndarray:
    kk = grid.wavenumbers
    if order == 1:
        mult = 1j * kk
        # the Nyquist mode has no well-defined odd derivative
        mult[grid.n // 2] = 0.0
    else:
        mult = -(kk**2)
    return np.fft.ifft(mult * np.fft.fft(samples))


def _central2(samples: np.ndarray, grid: Grid1D, order: int) -> np.ndarray:
    up = np.roll(samples, -1)
    down = np.roll(samples, 1)
    h = grid.spacing
    if order == 1:
        return (up - down) / (2.0 * h)
    return (up - 2.0 * samples + down) / h**2


def derivative_samples(
    samples: np.ndarray, grid: Grid1D, order: int = 1, method=DerivMethod.SPECTRAL
) -> np.ndarray:
    """Derivative of raw periodic samples (real or complex)."""
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    method = DerivMethod(method)
    real_input = np.isrealobj(samples)
    if method is DerivMethod.SPECTRAL:
        out = _spectral(samples, grid, order)
    else:
        out = _central2(samples, grid, order)
    return out.real if real_input else out


def derivative(
    field: ScalarField, order: int = 1, method=DerivMethod.SPECTRAL
) -> ScalarField:
    """d psi/dx or d^2 psi/dx^2 on the same grid."""
    return field.replace(derivative_samples(field.samples, field.grid, order, method))


def inner_product(f: ScalarField, g: ScalarField) -> complex:
    """<f, g> = sum conj(f_j) g_j dx (exact trapezoid on a periodic grid)."""
    check_same_grid(f, g)
    return complex(np.vdot(f.samples, g.samples) * f.grid.spacing)


def norm(field: ScalarField) -> float:
    return math.sqrt(max(inner_product(field, field).real, 0.0))


def normalize(field: ScalarField) -> ScalarField:
    nrm = norm(field)
    if nrm < ZERO_NORM_FLOOR:
        raise ZeroField("cannot normalize a field with vanishing norm")
    return field.replace(field.samples / nrm)


def displacement(field: ScalarField, method=DerivMethod.CENTRAL2) -> ScalarField:
    """Hermitian displacement operator d = -i d/dx."""
    return field.replace(-1j * derivative(field, 1, method).samples)


def commutator_residual(test_field: ScalarField, margin: float = 0.1) -> float:
    """max_j |([x, d] - i) f|_j over points at least ``margin * L`` from the edges.

    Uses second-order central differences; multiplication by the
    non-periodic coordinate is only harmless where f is negligible near the
    wrap, hence the margin.
    """
    grid = test_field.grid
    if margin < 2.0 / grid.n:
        raise MarginTooSmall(f"margin {margin} < 2/n = {2.0 / grid.n}")
    x = grid.x
    f = test_field.samples
    x_d_f = x * displacement(test_field).samples
    d_x_f = displacement(test_field.replace(x * f)).samples
    resid = np.abs(x_d_f - d_x_f - 1j * f)
    lo, hi = margin * grid.length, (1.0 - margin) * grid.length
    interior = (x >= lo) & (x <= hi)
    if not interior.any():
        raise MarginTooSmall(f"margin {margin} leaves no interior points")
    return float(resid[interior].max())
