import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rselab.errors import (
    GridMismatch,
    NonNullWavevector,
    NotNormalized,
    NotSinglePhase,
    ZeroField,
)
from rselab.evolvers import free_gaussian
from rselab.fieldcore import Grid1D, PhysParams, ScalarField, derivative_samples, make_gaussian
from rselab.gravwave import (
    ETA,
    GWState,
    PolTensor,
    basis_from_kets,
    basis_tensors,
    build_h,
    frobenius_inner,
    gauge_constraint_residual,
    gw_evolve,
    gw_madelung_and_expectations,
    gw_norm_and_inner,
    gw_normalize,
    gw_plane_state,
    metric,
    rotate_about_z,
    sample_h,
    tt_gauge_check,
)
from rselab.madelung import hj_residuals

PLUS, CROSS = basis_tensors()
seeds = st.integers(0, 2**32 - 1)
angles = st.floats(-2 * np.pi, 2 * np.pi)
P = PhysParams(c=1.0, hbar=0.6, omega=2.0)


def sym(rng, complex_=False):
    a = rng.normal(size=(4, 4))
    if complex_:
        a = a + 1j * rng.normal(size=(4, 4))
    return PolTensor(a + a.T)


def tt(a, b):
    return a * PLUS + b * CROSS


class TestFrobenius:
    def test_basis_norms(self):
        assert frobenius_inner(PLUS, PLUS) == 1.0
        assert frobenius_inner(CROSS, CROSS) == 1.0
        assert frobenius_inner(PLUS, CROSS) == 0.0

    def test_zero(self):
        rng = np.random.default_rng(0)
        assert frobenius_inner(PolTensor(np.zeros((4, 4))), sym(rng)) == 0.0

    def test_real_inputs_give_float(self):
        assert isinstance(frobenius_inner(PLUS, CROSS), float)

    def test_conjugate_linear_in_first_slot(self):
        circ = PLUS + 1j * CROSS
        assert frobenius_inner(circ, circ) == pytest.approx(2.0)
        assert frobenius_inner(circ, PLUS - 1j * CROSS) == pytest.approx(0.0)


class TestBasis:
    def test_entries(self):
        assert PLUS.m[1, 1] == 1 and PLUS.m[2, 2] == -1
        assert CROSS.m[1, 2] == 1 and CROSS.m[2, 1] == 1
        assert np.count_nonzero(PLUS.m) == 2 and np.count_nonzero(CROSS.m) == 2

    def test_outer_product_construction(self):
        plus, cross = basis_from_kets()
        assert np.array_equal(plus.m, PLUS.m)
        assert np.array_equal(cross.m, CROSS.m)

    def test_symmetry_enforced(self):
        a = np.zeros((4, 4))
        a[0, 1] = 1.0
        with pytest.raises(ValueError):
            PolTensor(a)

    def test_eta_signature(self):
        assert np.array_equal(np.diag(ETA), [-1, 1, 1, 1])
        assert np.array_equal(metric(PolTensor(np.zeros((4, 4)))), ETA)


class TestTTGauge:
    @settings(max_examples=30, deadline=None)
    @given(st.floats(-10, 10), st.floats(-10, 10))
    def test_tt_combinations(self, a, b):
        v = tt_gauge_check(tt(a, b))
        assert v.temporal == 0 and v.trace == 0 and v.longitudinal == 0

    def test_temporal(self):
        m = np.zeros((4, 4))
        m[0, 0] = 0.1
        assert tt_gauge_check(PolTensor(m)).temporal == pytest.approx(0.1)

    def test_trace(self):
        m = np.zeros((4, 4))
        m[1, 1] = m[2, 2] = 0.1
        assert tt_gauge_check(PolTensor(m)).trace == pytest.approx(0.2)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0.1, 10))
    def test_tt_implies_gauge(self, a, b, omega):
        k = [omega, 0, 0, omega]
        assert gauge_constraint_residual(tt(a, b), k) <= 1e-15 * max(1, abs(a), abs(b)) * omega

    @pytest.mark.parametrize("omega", [1.0, 2.5])
    def test_non_tt_hand_contraction(self, omega):
        # with k^mu = (omega,0,0,omega), k_mu = (-omega,0,0,omega) and
        # alpha^nu_1 = eta^{nu nu} alpha_{nu 1}: k_nu alpha^nu_1 = k_0 (-alpha_01)
        # = omega alpha_01; the trace term vanishes
        m = np.zeros((4, 4))
        m[0, 1] = m[1, 0] = 1.0
        assert gauge_constraint_residual(PolTensor(m), [omega, 0, 0, omega]) == pytest.approx(
            omega, rel=1e-12)

    def test_non_null(self):
        with pytest.raises(NonNullWavevector):
            gauge_constraint_residual(PLUS, [1.0, 0, 0, 0.5])


class TestRotation:
    def test_identity(self):
        rng = np.random.default_rng(1)
        x = sym(rng)
        assert rotate_about_z(x, 0.0).allclose(x, atol=0.0)

    def test_quarter_turn_of_plus(self):
        assert rotate_about_z(PLUS, np.pi / 4).allclose(CROSS, atol=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_half_turn_on_tt_and_diagonal(self, seed):
        rng = np.random.default_rng(seed)
        x = PolTensor(np.diag(rng.normal(size=4))) + tt(*rng.normal(size=2))
        assert rotate_about_z(x, np.pi).allclose(x, atol=1e-12 * np.max(np.abs(x.m)))

    @pytest.mark.parametrize("theta", [np.pi / 8, np.pi / 4, 1.0])
    @pytest.mark.parametrize("sign", [1, -1])
    def test_helicity(self, theta, sign):
        circ = PLUS + sign * 1j * CROSS
        rotated = rotate_about_z(circ, theta)
        assert rotated.allclose(circ * np.exp(-sign * 2j * theta), atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(seeds, angles)
    def test_isometry(self, seed, theta):
        rng = np.random.default_rng(seed)
        x, y = sym(rng), sym(rng)
        before = frobenius_inner(x, y)
        after = frobenius_inner(rotate_about_z(x, theta), rotate_about_z(y, theta))
        assert abs(after - before) <= 1e-13 * max(1.0, abs(before))


class TestBuildH:
    K = np.array([2.0, 0, 0, 2.0])

    def test_zero_phase(self):
        alpha = tt(0.3, -0.7)
        assert build_h(alpha, self.K, [0.4, 1.0, -2.0, 0.4]).allclose(2 * alpha, atol=0)

    def test_quarter_phase(self):
        # k.x = omega (z - t) = pi/2
        h = build_h(tt(0.3, -0.7), self.K, [0.0, 0, 0, np.pi / 4])
        assert np.max(np.abs(h.m)) <= 1e-16

    def test_rejects_complex_alpha(self):
        with pytest.raises(ValueError):
            build_h(PLUS + 1j * CROSS, self.K, [0, 0, 0, 0])

    def test_non_null(self):
        with pytest.raises(NonNullWavevector):
            build_h(PLUS, [1.0, 0, 0, 2.0], [0, 0, 0, 0])

    def test_sampled_wave_equation(self):
        # spectral d_z^2 against a three-point d_t^2; for cos(omega(z - t)) the
        # time stencil returns -omega^2 sinc^2(omega dt / 2) h exactly
        omega = 2.0
        grid = Grid1D(64, 2 * np.pi / omega)
        alpha = tt(0.7, 0.2)
        dt = 1e-3
        h = [sample_h(alpha, self.K, grid, t) for t in (0.3 - dt, 0.3, 0.3 + dt)]
        d2t = (h[2] - 2 * h[1] + h[0]) / dt**2
        d2z = np.stack([derivative_samples(h[1][:, m, n], grid, 2)
                        for m in range(4) for n in range(4)], axis=1).reshape(-1, 4, 4)
        scale = omega**2 * np.max(np.abs(h[1]))
        resid = np.max(np.abs(d2z - d2t)) / scale
        expected = 1 - (np.sin(omega * dt / 2) / (omega * dt / 2)) ** 2
        assert resid == pytest.approx(expected, rel=1e-4)


class TestGWEvolve:
    G = Grid1D(64, 2 * np.pi)

    def test_plane_global_phase(self):
        s = GWState(self.G, np.exp(2j * self.G.x), np.zeros(64), P)
        out = gw_evolve(s, 0.7)
        np.testing.assert_allclose(out.f_plus, s.f_plus * np.exp(-2j * 0.7), atol=1e-13)
        assert np.all(out.f_cross == 0)

    def test_zero_time(self):
        s = gw_plane_state(self.G, P)
        assert gw_evolve(s, 0.0) is s

    def test_gaussian_spreads_with_half_hbar_omega_mass(self):
        g = Grid1D(256, 40.0)
        env = make_gaussian(g, 1.0).samples
        s = gw_evolve(GWState(g, env, env, P), 1.0 / P.omega)
        assert P.effective_mass() == pytest.approx(P.hbar * P.omega / 2)
        oracle = free_gaussian(g, P, 1.0, 1.0 / P.omega).samples
        for f in (s.f_plus, s.f_cross):
            assert np.linalg.norm(f - oracle) / np.linalg.norm(oracle) <= 1e-8

    def test_requires_unit_c(self):
        with pytest.raises(ValueError):
            GWState(self.G, np.ones(64), np.ones(64), PhysParams(c=2.0))

    @settings(max_examples=25, deadline=None)
    @given(seeds, st.floats(-20, 20))
    def test_norm_conserved_and_swap_commutes(self, seed, t):
        rng = np.random.default_rng(seed)
        s = GWState(self.G, rng.normal(size=64) + 1j * rng.normal(size=64),
                    rng.normal(size=64) + 1j * rng.normal(size=64), P)
        n0 = gw_norm_and_inner(s, s).real
        out = gw_evolve(s, t)
        assert abs(gw_norm_and_inner(out, out).real - n0) <= 1e-13 * n0
        a = gw_evolve(s.swapped(), t)
        b = out.swapped()
        assert np.array_equal(a.f_plus, b.f_plus) and np.array_equal(a.f_cross, b.f_cross)


class TestNormInner:
    G = Grid1D(32, 3.0)

    def test_constant_state(self):
        c = np.full(32, 1 / np.sqrt(2 * self.G.length))
        s = GWState(self.G, c, c, P)
        assert gw_norm_and_inner(s, s) == pytest.approx(1.0, rel=1e-14)

    def test_plus_cross_orthogonal(self):
        one, zero = np.ones(32), np.zeros(32)
        a = GWState(self.G, one, zero, P)
        b = GWState(self.G, zero, one, P)
        assert gw_norm_and_inner(a, b) == 0

    def test_grid_mismatch(self):
        a = GWState(self.G, np.ones(32), np.ones(32), P)
        b = GWState(Grid1D(32, 4.0), np.ones(32), np.ones(32), P)
        with pytest.raises(GridMismatch):
            gw_norm_and_inner(a, b)

    def test_normalize(self):
        s = gw_normalize(GWState(self.G, 3 * np.ones(32), 1j * np.ones(32), P))
        assert gw_norm_and_inner(s, s).real == pytest.approx(1.0, rel=1e-14)
        with pytest.raises(ZeroField):
            gw_normalize(GWState(self.G, np.zeros(32), np.zeros(32), P))


class TestGWMadelung:
    G = Grid1D(64, 2 * np.pi / P.omega)
    DT = 1e-4 / P.omega

    def test_plane_wave(self):
        s = gw_plane_state(self.G, P)
        rep = gw_madelung_and_expectations(s, gw_evolve(s, self.DT))
        assert max(rep.hj_residual, rep.continuity_residual,
                   rep.hamiltonian_identity_residual, rep.poynting_residual) <= 1e-10
        assert np.nanmax(np.abs(rep.q_field)) <= 1e-12 * P.hbar * P.omega
        assert rep.energy_expectation == pytest.approx(P.hbar * P.omega, rel=1e-8)
        assert rep.momentum_expectation == pytest.approx(P.hbar * P.omega, rel=1e-8)

    def test_standing_wave(self):
        g = Grid1D(512, 8 * np.pi / P.omega)
        f = np.cos(P.omega * g.x)
        s = gw_normalize(GWState(g, f, f, P))
        rep = gw_madelung_and_expectations(s, gw_evolve(s, self.DT))
        lobe = np.abs(f) > 0.5
        q = rep.q_field[lobe]
        assert np.max(np.abs(q - P.hbar * P.omega)) / (P.hbar * P.omega) <= 1e-6
        assert abs(rep.momentum_expectation) <= 1e-10

    def test_not_single_phase(self):
        s = GWState(self.G, np.ones(64), np.zeros(64), P)
        with pytest.raises(NotSinglePhase):
            gw_madelung_and_expectations(s, gw_evolve(s, self.DT))

    def test_not_normalized(self):
        s = GWState(self.G, np.ones(64), np.ones(64), P)
        with pytest.raises(NotNormalized):
            gw_madelung_and_expectations(s, gw_evolve(s, self.DT))

    @pytest.mark.parametrize("kind", ["plane", "gaussian"])
    def test_matches_scalar_pipeline(self, kind):
        g = Grid1D(128, 8 * np.pi / P.omega)
        if kind == "plane":
            s = gw_plane_state(g, P)
        else:
            env = make_gaussian(g, g.length / 12).samples
            s = gw_normalize(GWState(g, env, env, P))
        later = gw_evolve(s, self.DT)
        rep = gw_madelung_and_expectations(s, later)
        # psi = sqrt(2) f carries the same profile with int |psi|^2 = 1
        scalar = hj_residuals(ScalarField(g, np.sqrt(2) * s.f_plus, s.time),
                              ScalarField(g, np.sqrt(2) * later.f_plus, later.time), P)
        np.testing.assert_allclose(rep.q_field, scalar.q_field, atol=1e-10 * P.hbar * P.omega)
        assert rep.hj_residual == pytest.approx(scalar.hj_residual, abs=1e-10)
        assert rep.energy_expectation == pytest.approx(scalar.energy_expectation, rel=1e-10)
        assert rep.momentum_expectation == pytest.approx(scalar.momentum_expectation,
                                                         rel=1e-10, abs=1e-12)
