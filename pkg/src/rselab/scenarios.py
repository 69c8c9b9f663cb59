"""Registered verification scenarios and the runner that turns them into reports."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import emfield, evolvers, fieldcore, gravwave, madelung
from .config import ScenarioConfig
from .errors import (
    ConfigError,
    IoError,
    NonNullWavevector,
    NotStationary,
    RSELabError,
    ScenarioError,
)
from .fieldcore import Grid1D, PhysParams, ScalarField
from .output import REPORT_SCHEMA_VERSION, emit_csv, emit_table, write_report


@dataclass
class Outcome:
    metrics: dict = field(default_factory=dict)
    expectations: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    dumps: list = field(default_factory=list)  # (filename, data, grid, mask)
    notes: list = field(default_factory=list)


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    keys: tuple
    checks: dict  # name -> default tolerance, or None for a pass/fail flag
    runner: Callable[[ScenarioConfig], Outcome]
    field_kinds: tuple = ()

    def validate(self, cfg: ScenarioConfig):
        for key in cfg.run.tolerances:
            if key not in self.checks or self.checks[key] is None:
                raise ConfigError(
                    f"{self.name!r} has no tolerance-controlled check {key!r}",
                    f"run.tolerances.{key}",
                )
        kind = cfg.field.kind
        if kind is not None and kind not in self.field_kinds:
            raise ConfigError(
                f"{self.name!r} accepts field kinds {self.field_kinds or '(none)'}",
                "field.kind",
            )


REGISTRY: dict[str, Scenario] = {}


def register(name, description, keys, checks, field_kinds=()):
    def wrap(fn):
        REGISTRY[name] = Scenario(name, description, tuple(keys), dict(checks), fn,
                                  tuple(field_kinds))
        return fn

    return wrap


def list_scenarios():
    """(name, description, config keys used), alphabetized by name."""
    return [(s.name, s.description, s.keys) for s in sorted(REGISTRY.values(),
                                                           key=lambda s: s.name)]


def _params(cfg) -> PhysParams:
    p = cfg.physics
    return PhysParams(p.c, p.hbar, p.omega)


def _grid(cfg, n, length) -> Grid1D:
    return Grid1D(cfg.grid.n or n, cfg.grid.length or length)


def _probe(cfg, params) -> float:
    return cfg.run.delta_t_probe or madelung.DEFAULT_PROBE / params.omega


def _build_field(cfg, grid, params, default_kind) -> ScalarField:
    kind = cfg.field.kind or default_kind
    k = cfg.field.k if cfg.field.k is not None else params.k
    amp = cfg.field.amplitude
    if kind == "plane":
        return fieldcore.make_plane_wave(grid, params, k, 0.0, amp)
    if kind == "standing":
        return fieldcore.make_standing_wave(grid, params, k, 0.0, amp)
    if kind == "gaussian":
        sigma = cfg.field.sigma or grid.length / 20
        return amp * fieldcore.make_gaussian(grid, sigma)
    raise ConfigError(f"kind {kind!r} is not a scalar field", "field.kind")


def _rel(value, target) -> float:
    return abs(value - target) / abs(target) if target else abs(value)


# ---------------------------------------------------------------- scalar side


@register(
    "complementarity",
    "Classical (wave/RSE/Helmholtz, Poynting) and quantum (HJ, <E>, <p>) checks on one field",
    ["grid.n", "grid.length", "physics", "field.kind", "field.k", "field.amplitude",
     "run.delta_t_probe", "run.rho_min"],
    {
        "chain_wave": 1e-10, "chain_rse": 1e-10, "chain_helmholtz": 1e-10,
        "hj": 1e-10, "hj_action_form": 1e-10, "continuity": 1e-10,
        "hamiltonian_identity": 1e-10, "quantum_potential_max": 1e-12,
        "poynting": 1e-10, "poynting_identity": 1e-9,
        "energy_error": 1e-8, "momentum_error": 1e-8,
    },
    field_kinds=("plane", "standing", "gaussian"),
)
def _complementarity(cfg):
    params = _params(cfg)
    # 8 wavelengths on 256 points keeps spectral round-off near 1e-14
    grid = _grid(cfg, 256, 8 * 2 * np.pi * params.c / params.omega)
    raw = _build_field(cfg, grid, params, "plane")
    psi = fieldcore.normalize(raw)
    dt = _probe(cfg, params)
    later = evolvers.rse_evolve(evolvers.RSEState(psi, params), dt).psi
    out = Outcome()
    kind = cfg.field.kind or "plane"
    if kind == "gaussian":
        out.notes.append("broadband field: RSE evolution here is an extrapolation "
                         "beyond the stationary monochromatic case")

    chain = evolvers.chain_consistency(psi, params)
    out.metrics.update(chain_wave=chain.wave, chain_rse=chain.rse,
                       chain_helmholtz=chain.helmholtz)

    hj = madelung.hj_residuals(psi, later, params, cfg.run.rho_min)
    q = hj.q_field[hj.mask]
    out.metrics.update(
        hj=hj.hj_residual, hj_action_form=hj.hj_residual_action_form,
        continuity=hj.continuity_residual,
        hamiltonian_identity=hj.hamiltonian_identity_residual,
        quantum_potential_max=float(np.max(np.abs(q))) / (params.hbar * params.omega),
    )
    out.metrics["poynting"] = madelung.poynting_divergence(psi, params, field_dt=later)
    out.metrics["poynting_identity"] = madelung.poynting_identity_residual(
        psi, params, rho_min=cfg.run.rho_min)

    ex = madelung.expectations(psi, later, params)
    k = cfg.field.k if cfg.field.k is not None else params.k
    p_target = params.hbar * k if kind == "plane" else 0.0
    out.metrics["energy_error"] = _rel(ex.energy, params.hbar * params.omega)
    out.metrics["momentum_error"] = abs(ex.momentum - p_target) / (params.hbar * abs(k))
    out.expectations.update(energy=ex.energy, momentum=ex.momentum,
                            energy_imag=ex.energy_imag, momentum_imag=ex.momentum_imag,
                            hbar_omega=params.hbar * params.omega,
                            hbar_k=params.hbar * k)
    m = madelung.decompose(psi, cfg.run.rho_min)
    out.dumps += [
        ("psi.csv", psi, None, None),
        ("quantum_potential.csv", hj.q_field, grid, hj.mask),
        ("current.csv", madelung.current_density(psi, params), grid, None),
        ("phase.csv", m.phi, grid, m.mask),
    ]
    return out


@register(
    "standing_wave_quantum_potential",
    "Standing wave 2cos(kx)e^{-iwt}: Q = hbar*omega on lobes balances the phase rotation",
    ["grid.n", "grid.length", "physics", "field.k", "run.delta_t_probe", "run.rho_min"],
    {
        "q_lobe_error": 1e-6, "hj": 1e-6, "continuity": 1e-10,
        "momentum_abs": 1e-10, "energy_error": 1e-8, "poynting": 1e-10,
        "current_max": 1e-12,
    },
    field_kinds=("standing",),
)
def _standing(cfg):
    params = _params(cfg)
    grid = _grid(cfg, 512, 2 * np.pi * params.c / params.omega)
    psi = fieldcore.normalize(_build_field(cfg, grid, params, "standing"))
    dt = _probe(cfg, params)
    later = evolvers.rse_evolve(evolvers.RSEState(psi, params), dt).psi
    m = madelung.decompose(psi, cfg.run.rho_min)
    q = madelung.quantum_potential(m, params)
    lobe = m.rho >= 0.01 * m.rho.max()
    hbar_omega = params.hbar * params.omega
    hj = madelung.hj_residuals(psi, later, params, cfg.run.rho_min)
    ex = madelung.expectations(psi, later, params)
    j = madelung.current_density(psi, params)
    j_unit = params.hbar * params.k / params.effective_mass() * float(m.rho.max())
    out = Outcome()
    out.metrics.update(
        q_lobe_error=float(np.max(np.abs(q[lobe] - hbar_omega))) / hbar_omega,
        hj=hj.hj_residual,
        continuity=hj.continuity_residual,
        momentum_abs=abs(ex.momentum) / (params.hbar * params.k),
        energy_error=_rel(ex.energy, hbar_omega),
        poynting=madelung.poynting_divergence(psi, params, field_dt=later),
        current_max=float(np.max(np.abs(j))) / j_unit,
        masked_points=int((~m.mask).sum()),
    )
    out.expectations.update(energy=ex.energy, momentum=ex.momentum,
                            q_lobe_mean=float(np.mean(q[lobe])), hbar_omega=hbar_omega)
    out.dumps += [
        ("psi.csv", psi, None, None),
        ("quantum_potential.csv", q, grid, m.mask),
        ("rho.csv", m.rho, grid, None),
    ]
    return out


@register(
    "rse_gaussian_oracle",
    "RSE propagator: unitarity, composition, dispersion and the spreading-Gaussian oracle",
    ["grid.n", "grid.length", "physics", "field.sigma", "run.steps"],
    {
        "norm_drift": 1e-12, "oracle_l2": 1e-8, "composition": 1e-12,
        "dispersion": 1e-10, "not_stationary_raised": None,
        "gaussian_not_helmholtz": None,
    },
    field_kinds=("gaussian",),
)
def _rse_oracle(cfg):
    params = _params(cfg)
    grid = _grid(cfg, 256, 40.0 * params.c / params.omega)
    sigma = cfg.field.sigma or 1.0 * params.c / params.omega
    steps = cfg.run.steps or 1000
    t_final = 1.0 / params.omega
    psi0 = fieldcore.make_gaussian(grid, sigma)
    state = evolvers.RSEState(psi0, params)
    n0 = fieldcore.norm(psi0)
    drift = 0.0
    stepped = state
    for _ in range(steps):
        stepped = evolvers.rse_evolve(stepped, t_final / steps)
        drift = max(drift, abs(fieldcore.norm(stepped.psi) - n0) / n0)
    direct = evolvers.rse_evolve(state, t_final)
    oracle = evolvers.free_gaussian(grid, params, sigma, t_final)
    l2 = np.linalg.norm(direct.psi.samples - oracle.samples) / np.linalg.norm(oracle.samples)
    composition = np.linalg.norm(stepped.psi.samples - direct.psi.samples) / np.linalg.norm(
        direct.psi.samples)

    # phase rotation rate of every grid mode over a short time
    tau = 0.1 / params.omega
    modes = np.eye(grid.n, dtype=complex)[1:grid.n // 2 + 1]
    disp_err = 0.0
    for m, row in enumerate(modes, start=1):
        f = ScalarField(grid, np.fft.ifft(row))
        g = evolvers.rse_evolve(evolvers.RSEState(f, params), tau).psi
        rate = -np.angle(np.vdot(f.samples, g.samples)) / tau
        omega_k = params.diffusion * (m * grid.fundamental) ** 2
        # compare modulo the 2pi/tau aliasing of the phase measurement
        wrapped = np.angle(np.exp(-1j * omega_k * tau)) / -tau
        disp_err = max(disp_err, abs(rate - wrapped) / omega_k)

    out = Outcome()
    out.notes.append("broadband Gaussian: evolution is an extrapolation beyond the "
                     "stationary monochromatic case")
    out.metrics.update(norm_drift=drift, oracle_l2=float(l2),
                       composition=float(composition), dispersion=float(disp_err))
    # an already-spreading packet: density changes at first order in the probe
    probe = evolvers.rse_evolve(direct, madelung.DEFAULT_PROBE / params.omega).psi
    try:
        madelung.poynting_divergence(direct.psi, params, field_dt=probe)
        raised = False
    except NotStationary:
        raised = True
    out.flags["not_stationary_raised"] = raised
    helm = evolvers.helmholtz_residual(psi0, params)
    out.metrics["gaussian_helmholtz_residual"] = helm
    out.flags["gaussian_not_helmholtz"] = helm > 0.1
    out.expectations["width_ratio_expected"] = math.sqrt(
        1 + (params.diffusion * t_final / sigma**2) ** 2)
    out.dumps += [("psi_t.csv", direct.psi, None, None), ("oracle_t.csv", oracle, None, None)]
    return out


# ---------------------------------------------------------------- gravity side


@register(
    "gw_graviton",
    "Single-phase GW state f+ = fx: Madelung/HJ residuals and (<E>, <p_z>) = (hbar w, hbar k)",
    ["grid.n", "grid.length", "physics.hbar", "physics.omega", "field.kind", "field.k",
     "field.sigma", "run.delta_t_probe"],
    {
        "hj": 1e-10, "continuity": 1e-10, "hamiltonian_identity": 1e-10,
        "quantum_potential_max": 1e-12, "poynting": 1e-10,
        "energy_error": 1e-8, "momentum_error": 1e-8, "norm_drift": 1e-13,
        "scalar_agreement": 1e-10,
    },
    field_kinds=("gw_plane", "gw_gaussian"),
)
def _gw_graviton(cfg):
    params = _params(cfg)
    if params.c != 1.0:
        raise ConfigError("gravitational-wave scenarios use c = 1", "physics.c")
    grid = _grid(cfg, 64, 2 * np.pi / params.omega)
    k = cfg.field.k if cfg.field.k is not None else params.omega
    kind = cfg.field.kind or "gw_plane"
    out = Outcome()
    if kind == "gw_plane":
        state = gravwave.gw_plane_state(grid, params, k)
    else:
        sigma = cfg.field.sigma or grid.length / 20
        env = fieldcore.make_gaussian(grid, sigma).samples
        state = gravwave.gw_normalize(gravwave.GWState(grid, env, env, params))
        out.notes.append("broadband GW envelope: extrapolation beyond the monochromatic case")
    dt = _probe(cfg, params)
    later = gravwave.gw_evolve(state, dt)
    rep = gravwave.gw_madelung_and_expectations(state, later)
    hbar_omega = params.hbar * params.omega

    # same profile through the scalar pipeline: psi = sqrt(2) f
    scalar = ScalarField(grid, np.sqrt(2.0) * state.f_plus, state.time)
    scalar_later = ScalarField(grid, np.sqrt(2.0) * later.f_plus, later.time)
    srep = madelung.hj_residuals(scalar, scalar_later, params)
    agree = float(np.nanmax(np.abs(rep.q_field - srep.q_field))) / hbar_omega
    evolved = gravwave.gw_evolve(state, 10.0 / params.omega)
    drift = abs(gravwave.gw_norm_and_inner(evolved, evolved).real - 1.0)
    out.metrics.update(
        hj=rep.hj_residual, continuity=rep.continuity_residual,
        hamiltonian_identity=rep.hamiltonian_identity_residual,
        quantum_potential_max=float(np.nanmax(np.abs(rep.q_field))) / hbar_omega,
        poynting=rep.poynting_residual,
        energy_error=_rel(rep.energy_expectation, hbar_omega),
        momentum_error=abs(rep.momentum_expectation - params.hbar * k) / (params.hbar * k),
        norm_drift=drift,
        scalar_agreement=max(agree, abs(rep.hj_residual - srep.hj_residual)),
    )
    out.expectations.update(energy=rep.energy_expectation,
                            momentum=rep.momentum_expectation,
                            hbar_omega=hbar_omega, hbar_k=params.hbar * k,
                            normalization_convention="int 2 R^2 dz = 1")
    out.dumps += [
        ("f_plus.csv", ScalarField(grid, state.f_plus), None, None),
        ("quantum_potential.csv", rep.q_field, grid, rep.mask),
    ]
    return out


@register(
    "gw_helicity",
    "Frobenius orthonormality, rotation isometry and the spin-2 helicity phase",
    ["run.seed"],
    {
        "orthonormality": 1e-15, "basis_kets": 1e-15, "isometry": 1e-13,
        "helicity": 1e-12, "quarter_turn": 1e-15, "half_turn": 1e-12,
    },
)
def _gw_helicity(cfg):
    plus, cross = gravwave.basis_tensors()
    basis = {"plus": plus, "cross": cross}
    ortho = 0.0
    for a, ta in basis.items():
        for b, tb in basis.items():
            ortho = max(ortho, abs(gravwave.frobenius_inner(ta, tb) - (a == b)))
    kp, kc = gravwave.basis_from_kets()
    kets = max(np.max(np.abs(kp.m - plus.m)), np.max(np.abs(kc.m - cross.m)))

    rng = np.random.default_rng(cfg.run.seed)
    iso = 0.0
    for _ in range(20):
        a, b = rng.normal(size=(2, 4, 4))
        x, y = gravwave.PolTensor(a + a.T), gravwave.PolTensor(b + b.T)
        theta = rng.uniform(0, 2 * np.pi)
        before = gravwave.frobenius_inner(x, y)
        after = gravwave.frobenius_inner(gravwave.rotate_about_z(x, theta),
                                         gravwave.rotate_about_z(y, theta))
        iso = max(iso, abs(after - before) / max(1.0, abs(before)))

    hel = 0.0
    for sign in (+1, -1):
        circ = plus + (sign * 1j) * cross
        for theta in (np.pi / 8, np.pi / 4, 1.0):
            rot = gravwave.rotate_about_z(circ, theta)
            expect = np.exp(-sign * 2j * theta) * circ.m
            hel = max(hel, float(np.max(np.abs(rot.m - expect))))
    quarter = float(np.max(np.abs(gravwave.rotate_about_z(plus, np.pi / 4).m - cross.m)))
    # helicity 0 and +/-2 parts return after a half turn; h_tx-like parts flip
    x = 0.8 * plus - 0.3 * cross + gravwave.PolTensor(np.diag([0.3, 0.1, 0.1, -0.2]))
    half = float(np.max(np.abs(gravwave.rotate_about_z(x, np.pi).m - x.m)))
    out = Outcome()
    out.metrics.update(orthonormality=ortho, basis_kets=float(kets), isometry=iso,
                       helicity=hel, quarter_turn=quarter, half_turn=half)
    return out


@register(
    "tt_gauge_suite",
    "TT gauge violations, the harmonic gauge constraint and plane-wave metric samples",
    ["physics.omega", "run.seed"],
    {
        "tt_violation": 1e-15, "tt_gauge_residual": 1e-15,
        "non_tt_contraction": 1e-12, "non_null_raised": None, "h_wave_residual": 1e-10,
    },
)
def _tt_gauge(cfg):
    omega = cfg.physics.omega
    k = np.array([omega, 0.0, 0.0, omega])
    plus, cross = gravwave.basis_tensors()
    rng = np.random.default_rng(cfg.run.seed)
    tt_violation = 0.0
    gauge = 0.0
    for a, b in rng.normal(size=(50, 2)):
        alpha = a * plus + b * cross
        tt_violation = max(tt_violation, gravwave.tt_gauge_check(alpha).max())
        gauge = max(gauge, gravwave.gauge_constraint_residual(alpha, k))
    bad = np.zeros((4, 4))
    bad[0, 1] = bad[1, 0] = 1.0
    hand = omega * abs(bad[0, 1])  # k^0 alpha_01 for mu = 1
    contraction = abs(gravwave.gauge_constraint_residual(gravwave.PolTensor(bad), k) - hand)
    try:
        gravwave.gauge_constraint_residual(plus, [1.0, 0.0, 0.0, 0.5])
        raised = False
    except NonNullWavevector:
        raised = True

    grid = Grid1D(64, 2 * np.pi / omega)
    params = PhysParams(1.0, cfg.physics.hbar, omega)
    alpha = 0.7 * plus + 0.2 * cross
    h = gravwave.sample_h(alpha, k, grid, t=0.3 / omega)
    worst = 0.0
    for mu in range(4):
        for nu in range(4):
            comp = h[:, mu, nu]
            if np.max(np.abs(comp)) == 0:
                continue
            f = ScalarField(grid, comp)
            worst = max(worst, evolvers.chain_consistency(f, params).wave)
    out = Outcome()
    out.metrics.update(tt_violation=tt_violation, tt_gauge_residual=gauge,
                       non_tt_contraction=contraction, h_wave_residual=worst)
    out.flags["non_null_raised"] = raised
    return out


# ---------------------------------------------------------------- appendix


@register(
    "appendix_densities",
    "Lagrangian, Hamiltonian and momentum densities, energy conservation, Jones vectors",
    ["grid.n", "physics.omega", "run.seed", "run.steps"],
    {
        "lagrangian_null": 1e-12, "hamiltonian_plane": 1e-12, "momentum_plane": 1e-12,
        "standing_lagrangian": 1e-12, "hamiltonian_nonnegative": None,
        "energy_drift": 1e-6, "jones_norm": 1e-12, "product_intensity": 1e-12,
    },
)
def _appendix(cfg):
    omega = cfg.physics.omega
    params = PhysParams(1.0, cfg.physics.hbar, omega)
    n = cfg.grid.n or 256
    grid = Grid1D(n, 2 * np.pi / omega)
    k = omega
    psi = fieldcore.make_plane_wave(grid, params, k)
    dot = psi * (-1j * omega)
    lag = emfield.lagrangian_density(psi, dot)
    ham = emfield.hamiltonian_density(psi, emfield.conjugate_momentum(dot))
    mom = emfield.momentum_density(psi, dot, params)
    sw = fieldcore.make_standing_wave(grid, params, k)
    sw_dot = sw * (-1j * omega)
    sw_lag = emfield.lagrangian_density(sw, sw_dot)
    expect = 4 * omega**2 * np.cos(k * grid.x) ** 2 - 4 * k**2 * np.sin(k * grid.x) ** 2

    rng = np.random.default_rng(cfg.run.seed)
    nonneg = True
    for _ in range(100):
        coeffs = rng.normal(size=(2, 8)) + 1j * rng.normal(size=(2, 8))
        modes = np.zeros((2, n), complex)
        modes[:, :8] = coeffs
        f = ScalarField(grid, np.fft.ifft(modes[0]) * n)
        g = ScalarField(grid, np.fft.ifft(modes[1]) * n)
        nonneg &= bool(np.all(emfield.hamiltonian_density(f, g) >= 0))

    # one-way packet under leapfrog, 10 periods
    L = grid.length
    packet = ScalarField(grid, np.exp(-((grid.x - L / 2) ** 2) / (2 * (L / 16) ** 2)))
    dt = 0.25 * grid.spacing
    steps = cfg.run.steps or int(round(10 * 2 * np.pi / omega / dt))
    ws = evolvers.traveling_wave_state(packet, dt)
    e0 = _leapfrog_hamiltonian(ws)
    e1 = _leapfrog_hamiltonian(evolvers.wave_evolve(ws, steps))

    jones = 0.0
    for v in (emfield.JonesVector(1, 0), emfield.JonesVector(3, 4j),
              emfield.JonesVector(0.2 - 1j, 0.5 + 0.1j)):
        jones = max(jones, abs(emfield.jones_normalize(v).intensity - 1.0))
    for theta, chi in rng.uniform(0, 2 * np.pi, size=(20, 2)):
        vec = emfield.pol_state_vector(emfield.PolState(0.3, theta, chi))
        jones = max(jones, abs(np.vdot(vec, vec).real - 1.0))
    prod = abs(emfield.product_state_intensity(7 * packet,
                                               emfield.PolState(0, np.pi / 4, np.pi / 2)) - 1)
    out = Outcome()
    out.metrics.update(
        lagrangian_null=float(np.max(np.abs(lag))) / omega**2,
        hamiltonian_plane=float(np.max(np.abs(ham - 2 * omega**2))) / omega**2,
        momentum_plane=float(np.max(np.abs(mom - omega * k))) / omega**2,
        standing_lagrangian=float(np.max(np.abs(sw_lag - expect))) / omega**2,
        energy_drift=abs(e1 - e0) / e0,
        jones_norm=jones,
        product_intensity=prod,
    )
    out.flags["hamiltonian_nonnegative"] = nonneg
    out.expectations.update(total_energy_start=e0, total_energy_end=e1)
    return out


def _leapfrog_hamiltonian(state: evolvers.WaveState) -> float:
    """int H dx at the current slice, psi_dot by central time differencing."""
    nxt = evolvers.wave_evolve(state, 1)
    dot = state.psi.replace((nxt.psi.samples - state.psi_prev.samples) / (2 * state.dt))
    return emfield.total_energy(state.psi, emfield.conjugate_momentum(dot))


@register(
    "convergence_commutator",
    "Second-order convergence of ([x, d] - i) f under grid halving, n = 64, 128, 256",
    ["grid.length", "field.sigma"],
    {"ratio_64_128": 0.3, "ratio_128_256": 0.3},
)
def _commutator(cfg):
    length = cfg.grid.length or 2 * np.pi
    sigma = cfg.field.sigma or length / 12
    ns = (64, 128, 256)
    resid = []
    for n in ns:
        grid = Grid1D(n, length)
        f = fieldcore.make_gaussian(grid, sigma, normalized=False)
        resid.append(fieldcore.commutator_residual(f, margin=0.1))
    ratios = [resid[0] / resid[1], resid[1] / resid[2]]
    out = Outcome()
    out.metrics.update(ratio_64_128=abs(ratios[0] - 4.0), ratio_128_256=abs(ratios[1] - 4.0))
    out.expectations.update({f"residual_n{n}": r for n, r in zip(ns, resid)})
    out.expectations.update(observed_ratio_64_128=ratios[0], observed_ratio_128_256=ratios[1])
    out.dumps.append(("convergence.csv",
                      {"n": list(ns), "spacing": [length / n for n in ns], "residual": resid},
                      None, None))
    return out


# ---------------------------------------------------------------- runner


def _write_dumps(dumps, csv_dir):
    csv_dir = Path(csv_dir)
    try:
        csv_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {csv_dir}: {exc}") from exc
    for name, data, grid, mask in dumps:
        if isinstance(data, dict):
            emit_table(data, csv_dir / name)
        else:
            emit_csv(data, csv_dir / name, grid=grid, mask=mask)


def run_scenario(cfg: ScenarioConfig, tolerance_scale: float = 1.0, write=True) -> dict:
    """Run one configured scenario and return its report as a dict.

    Writes the report and CSV dumps when the config names output paths.
    """
    scenario = REGISTRY[cfg.scenario]
    start = time.perf_counter()
    try:
        outcome = scenario.runner(cfg)
    except (ConfigError, IoError):
        raise
    except (RSELabError, ValueError, FloatingPointError) as exc:
        raise ScenarioError(cfg.scenario, exc) from exc
    wall = time.perf_counter() - start

    checks = {}
    for name, default in scenario.checks.items():
        if default is None:
            ok = bool(outcome.flags[name])
            checks[name] = {"value": ok, "tolerance": None, "passed": ok}
            continue
        value = float(outcome.metrics[name])
        tol = cfg.run.tolerances.get(name, default) * tolerance_scale
        ok = math.isfinite(value) and value <= tol
        checks[name] = {"value": value, "tolerance": tol, "passed": ok}

    metrics = {name: _clean(v) for name, v in outcome.metrics.items()}
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario": cfg.scenario,
        "config": cfg.to_dict(),
        "tolerance_scale": tolerance_scale,
        "metrics": metrics,
        "expectations": {k: _clean(v) for k, v in outcome.expectations.items()},
        "checks": checks,
        "notes": list(outcome.notes),
        "passed": all(c["passed"] for c in checks.values()),
        "wall_time": wall,
    }
    if write:
        if cfg.output.csv_dir:
            _write_dumps(outcome.dumps, cfg.output.csv_dir)
        if cfg.output.report_path:
            write_report(report, cfg.output.report_path)
    return report


def _clean(value):
    if isinstance(value, (str, bool)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    value = float(value)
    return value if math.isfinite(value) else None
