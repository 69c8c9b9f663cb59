import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from rselab.errors import GridMismatch, MarginTooSmall, NonCommensurateWavenumber, ZeroField
from rselab.fieldcore import (
    DerivMethod,
    Grid1D,
    PhysParams,
    ScalarField,
    commutator_residual,
    derivative,
    displacement,
    inner_product,
    make_gaussian,
    make_plane_wave,
    normalize,
)

TWO_PI = 2 * np.pi
seeds = st.integers(0, 2**32 - 1)


def band_limited(grid, seed, modes=10):
    rng = np.random.default_rng(seed)
    coeffs = np.zeros(grid.n, complex)
    idx = np.r_[0:modes, grid.n - modes + 1:grid.n]
    coeffs[idx] = rng.normal(size=idx.size) + 1j * rng.normal(size=idx.size)
    return ScalarField(grid, np.fft.ifft(coeffs) * grid.n)


class TestTypes:
    def test_effective_mass(self):
        p = PhysParams(c=2.0, hbar=0.5, omega=3.0)
        assert p.effective_mass() == pytest.approx(0.5 * 3.0 / (2 * 4.0))
        assert p.k == pytest.approx(1.5)
        assert p.diffusion == pytest.approx(p.hbar / (2 * p.effective_mass()))

    @pytest.mark.parametrize("kw", [{"c": 0}, {"hbar": -1}, {"omega": float("nan")}])
    def test_params_must_be_positive(self, kw):
        with pytest.raises(ValueError):
            PhysParams(**kw)

    @pytest.mark.parametrize("n", [4, 7, 9, 63])
    def test_grid_rejects_small_or_odd(self, n):
        with pytest.raises(ValueError):
            Grid1D(n, 1.0)

    @pytest.mark.parametrize("length", [0.1, 1.0, TWO_PI, 3.3])
    def test_grid_spacing_times_n_is_length(self, length):
        g = Grid1D(96, length)
        assert g.spacing * g.n == g.length

    def test_field_validation(self):
        g = Grid1D(8, 1.0)
        with pytest.raises(ValueError):
            ScalarField(g, np.ones(7))
        with pytest.raises(ValueError):
            ScalarField(g, np.r_[np.ones(7), np.nan])

    def test_field_is_immutable(self):
        f = ScalarField(Grid1D(8, 1.0), np.ones(8))
        with pytest.raises(ValueError):
            f.samples[0] = 2.0


class TestPlaneWave:
    def test_zero_mode(self):
        f = make_plane_wave(Grid1D(8, TWO_PI), PhysParams(), 0.0)
        assert np.array_equal(f.samples, np.ones(8))

    def test_monochromatic(self):
        g = Grid1D(256, TWO_PI)
        f = make_plane_wave(g, PhysParams(1, 1, 1), 1.0)
        np.testing.assert_allclose(f.samples, np.exp(1j * g.x), atol=1e-15)

    def test_time_phase(self):
        g = Grid1D(16, TWO_PI)
        p = PhysParams(omega=2.0)
        f = make_plane_wave(g, p, 2.0, t=0.3, amp=0.5)
        np.testing.assert_allclose(f.samples, 0.5 * np.exp(1j * (2 * g.x - 0.6)))

    def test_non_commensurate(self):
        with pytest.raises(NonCommensurateWavenumber):
            make_plane_wave(Grid1D(256, TWO_PI), PhysParams(), 1.5)


class TestDerivative:
    @pytest.mark.parametrize("method", list(DerivMethod))
    def test_constant(self, method):
        f = ScalarField(Grid1D(16, 3.0), np.full(16, 2.5 + 1j))
        assert np.max(np.abs(derivative(f, 1, method).samples)) < 1e-14

    def test_spectral_eigenfunction(self):
        g = Grid1D(64, TWO_PI)
        f = ScalarField(g, np.exp(2j * g.x))
        d2 = derivative(f, 2).samples
        assert np.max(np.abs(d2 + 4 * f.samples)) / 4 < 1e-12

    def test_central2_refinement(self):
        # analytic -sin(x); error h^2/12 * max|sin''''|, so halving h gives ~4
        errs = []
        for n in (64, 128):
            g = Grid1D(n, TWO_PI)
            d2 = derivative(ScalarField(g, np.sin(g.x)), 2, DerivMethod.CENTRAL2)
            errs.append(np.max(np.abs(d2.samples + np.sin(g.x))))
        assert errs[0] / errs[1] == pytest.approx(3.99903, abs=1e-4)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            derivative(ScalarField(Grid1D(8, 1.0), np.ones(8)), 3)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_first_twice_equals_second(self, seed):
        f = band_limited(Grid1D(64, 5.0), seed)
        twice = derivative(derivative(f, 1), 1).samples
        once = derivative(f, 2).samples
        assert np.linalg.norm(twice - once) <= 1e-10 * np.linalg.norm(once)


class TestInnerProduct:
    def test_constant(self):
        f = ScalarField(Grid1D(32, TWO_PI), np.ones(32))
        assert inner_product(f, f) == pytest.approx(TWO_PI, rel=1e-15)

    def test_fourier_orthogonality(self):
        g = Grid1D(32, TWO_PI)
        f = ScalarField(g, np.exp(1j * g.x))
        h = ScalarField(g, np.exp(2j * g.x))
        assert abs(inner_product(f, h)) < 1e-12

    def test_normalized_gaussian(self):
        sigma, center = 0.7, 5.0
        exact, _ = quad(lambda x: np.exp(-((x - center) ** 2) / (2 * sigma**2))
                        / math.sqrt(2 * np.pi * sigma**2), -np.inf, np.inf)
        f = make_gaussian(Grid1D(128, 10.0), sigma, center)
        assert inner_product(f, f).real == pytest.approx(exact, abs=1e-10)

    def test_grid_mismatch(self):
        a = ScalarField(Grid1D(8, 1.0), np.ones(8))
        b = ScalarField(Grid1D(8, 2.0), np.ones(8))
        with pytest.raises(GridMismatch):
            inner_product(a, b)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_conjugate_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        g = Grid1D(32, 2.0)
        f = ScalarField(g, rng.normal(size=32) + 1j * rng.normal(size=32))
        h = ScalarField(g, rng.normal(size=32) + 1j * rng.normal(size=32))
        assert inner_product(f, h) == inner_product(h, f).conjugate()

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_displacement_is_hermitian(self, seed):
        g = Grid1D(64, 3.0)
        f, h = band_limited(g, seed), band_limited(g, seed + 1)
        left = inner_product(f, displacement(h, DerivMethod.SPECTRAL))
        right = inner_product(displacement(f, DerivMethod.SPECTRAL), h)
        assert abs(left - right) <= 1e-10 * max(1.0, abs(left))


class TestNormalize:
    def test_constant(self):
        f = normalize(ScalarField(Grid1D(16, TWO_PI), np.full(16, 2.0)))
        np.testing.assert_allclose(f.samples, 1 / math.sqrt(TWO_PI), rtol=1e-15)

    def test_zero(self):
        with pytest.raises(ZeroField):
            normalize(ScalarField(Grid1D(8, 1.0), np.zeros(8)))

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_idempotent(self, seed):
        once = normalize(band_limited(Grid1D(32, 1.5), seed))
        twice = normalize(once)
        assert abs(inner_product(once, once) - 1) < 1e-12
        assert np.max(np.abs(twice.samples - once.samples)) <= 1e-12 * np.max(
            np.abs(once.samples))


class TestCommutator:
    def test_second_order(self):
        res = []
        for n in (128, 256):
            g = Grid1D(n, TWO_PI)
            res.append(commutator_residual(make_gaussian(g, TWO_PI / 12, normalized=False)))
        assert res[0] / res[1] == pytest.approx(4.0, abs=0.3)

    def test_matches_leading_error(self):
        # discrete identity: residual_j = |f_{j+1} - 2 f_j + f_{j-1}| / 2 = h^2 |f''| / 2 + O(h^4)
        sigma = TWO_PI / 12
        g = Grid1D(256, TWO_PI)
        f = make_gaussian(g, sigma, normalized=False)
        # |f''| peaks at the centre for exp(-x^2/4 sigma^2): 1/(2 sigma^2)
        leading = g.spacing**2 / 2 / (2 * sigma**2)
        assert commutator_residual(f) == pytest.approx(leading, rel=1e-2)

    def test_zero_field(self):
        assert commutator_residual(ScalarField(Grid1D(64, 1.0), np.zeros(64))) == 0.0

    def test_margin_too_small(self):
        f = ScalarField(Grid1D(64, 1.0), np.zeros(64))
        with pytest.raises(MarginTooSmall):
            commutator_residual(f, margin=0.0)
