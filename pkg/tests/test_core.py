import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.linalg import expm

from stabkit.core import (
    EnergyTrace,
    SpectralWeight,
    assemble_generator,
    conservative_eigenbasis,
    correction_split,
    damped_from_obs,
    dissipation_residual,
    evolve,
    fit_decay,
    general_g_growth,
    hautus_residual,
    modal_gramian,
    observability_constant,
    observability_gramian,
    spectral_norm,
    spectral_radius_estimate,
)
from stabkit.errors import (
    BasisMismatch,
    DimensionMismatch,
    InsufficientSamples,
    NonPositiveEnergy,
    NotDissipative,
    NotSkewAdjoint,
    QuadratureUnresolved,
    SingularWeight,
    UnstableStep,
    ZeroDenominator,
    ZeroVector,
)

ROT = np.array([[0.0, 1.0], [-1.0, 0.0]])


def rotation(obs=(1.0, 0.0)):
    obs = np.atleast_2d(obs)
    return assemble_generator(ROT, damped_from_obs(obs, np.ones(2)), obs)


def oscillator(k=2.0, damping=0.5):
    # x'' + k^2 x with velocity feedback; energy 0.5 (k^2 x^2 + v^2)
    A = np.array([[0.0, 1.0], [-k * k, 0.0]])
    metric = np.array([k * k, 1.0])
    obs = np.array([[0.0, math.sqrt(damping)]])
    return assemble_generator(A, damped_from_obs(obs, metric), obs, metric)


class TestAssemble:
    def test_shapes_checked(self):
        with pytest.raises(DimensionMismatch):
            assemble_generator(np.zeros((2, 3)))
        with pytest.raises(DimensionMismatch):
            assemble_generator(ROT, obs=np.ones((1, 3)))

    def test_metric_must_be_positive(self):
        with pytest.raises((DimensionMismatch, ValueError)):
            assemble_generator(ROT, metric=np.array([1.0, 0.0]))

    def test_not_skew(self):
        with pytest.raises(NotSkewAdjoint):
            assemble_generator(np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_skew_in_metric(self):
        gen = oscillator()
        M = np.diag(gen.metric)
        assert np.allclose(M @ gen.skew + gen.skew.T @ M, 0)

    def test_antidamping_rejected(self):
        with pytest.raises(NotDissipative):
            assemble_generator(ROT, np.eye(2) * 0.1)

    def test_dissipative_must_match_obs(self):
        obs = np.array([[1.0, 0.0]])
        with pytest.raises(NotDissipative):
            assemble_generator(ROT, -2 * np.diag([1.0, 0.0]), obs)

    def test_defaults(self):
        gen = assemble_generator(ROT)
        assert gen.dim == 2
        assert np.all(gen.dissipative == 0)
        assert gen.obs.shape == (0, 2)
        assert gen.obs_norm() == 0.0

    def test_arrays_frozen(self):
        gen = rotation()
        with pytest.raises(ValueError):
            gen.skew[0, 0] = 1.0

    def test_energy_rowwise(self):
        gen = oscillator(k=3.0)
        Z = np.array([[1.0, 0.0], [0.0, 2.0]])
        assert np.allclose(gen.energy(Z), [4.5, 2.0])

    def test_obs_norm(self):
        gen = oscillator(k=2.0, damping=0.25)
        assert gen.obs_norm() == pytest.approx(0.5)


class TestEigenbasis:
    def test_metric_orthonormal(self):
        gen = oscillator(k=3.0)
        mu, V = conservative_eigenbasis(gen)
        assert np.allclose(np.sort(mu), [-3.0, 3.0])
        G = V.conj().T @ (gen.metric[:, None] * V)
        assert np.allclose(G, np.eye(2))
        assert np.allclose(gen.skew @ V, V * (1j * mu))

    def test_spectral_weight(self):
        w = SpectralWeight(np.array([-2j, 0.0, 3j]), order=-1.0, zero_mode_weight=0.5)
        assert np.allclose(w.weights(), [0.25, 0.5, 1.0 / 9.0])
        assert np.allclose(SpectralWeight(np.array([2j, 0.0]), 0.0).weights(), 1.0)

    def test_spectral_norm(self):
        w = SpectralWeight(np.array([1j, 2j]), order=1.0)
        assert spectral_norm([1.0, 1.0], w) == pytest.approx(math.sqrt(5.0))
        with pytest.raises(BasisMismatch):
            spectral_norm([1.0], w)

    def test_hautus(self):
        gen = rotation()
        mu, V = conservative_eigenbasis(gen)
        r = hautus_residual(gen, mu[0], V[:, 0])
        assert r == pytest.approx(abs(V[0, 0]) ** 2 / np.sum(np.abs(V[:, 0]) ** 2))
        with pytest.raises(ZeroVector):
            hautus_residual(gen, 1.0, np.zeros(2))

    def test_spectral_radius(self):
        A = np.diag([1.0, -5.0, 2.0])
        assert spectral_radius_estimate(A) == pytest.approx(5.0, rel=1e-6)


class TestEvolve:
    def test_scalar_damping_exact(self):
        obs = np.array([[1.0]])
        gen = assemble_generator(np.zeros((1, 1)), damped_from_obs(obs, np.ones(1)), obs)
        traj = evolve(gen, [1.0], 0.01, 1.0)
        assert traj.energies[-1] == pytest.approx(0.5 * math.exp(-2.0), rel=1e-12)
        assert dissipation_residual(traj) < 1e-12

    def test_matches_expm(self):
        gen = oscillator()
        traj = evolve(gen, [1.0, 0.0], 0.1, 3.0)
        ref = expm(gen.damped * 3.0) @ np.array([1.0, 0.0])
        assert np.allclose(traj.states[-1], ref, atol=1e-12)

    def test_energy_identity_and_monotone(self):
        gen = oscillator(k=3.0, damping=0.3)
        traj = evolve(gen, [0.3, -1.0], 0.05, 20.0)
        assert np.all(np.diff(traj.energies) <= 1e-15)
        assert dissipation_residual(traj) <= 1e-10 * traj.energies[0]
        assert np.allclose(traj.dissipation, traj.observed)

    def test_conservative_drift(self):
        gen = oscillator(k=7.0)
        traj = evolve(gen, [1.0, 2.0], 0.1, 50.0, "conservative")
        assert np.ptp(traj.energies) < 1e-12 * traj.energies[0]
        assert np.all(traj.dissipation == 0)

    def test_rk4_agrees(self):
        gen = oscillator()
        a = evolve(gen, [1.0, 0.0], 0.1, 5.0)
        b = evolve(gen, [1.0, 0.0], 0.1, 5.0, scheme="rk4")
        assert np.allclose(a.states, b.states, atol=1e-8)

    def test_uniform_grid(self):
        traj = evolve(oscillator(), [1.0, 0.0], 0.3, 1.0)
        assert traj.times[-1] == pytest.approx(1.0)
        assert np.allclose(np.diff(traj.times), traj.dt)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            evolve(oscillator(), [1.0, 0.0], -0.1, 1.0)
        with pytest.raises(ValueError):
            evolve(oscillator(), [1.0, 0.0], 0.1, 1.0, mode="sideways")
        with pytest.raises(DimensionMismatch):
            evolve(oscillator(), [1.0, 0.0, 0.0], 0.1, 1.0)

    def test_unstable_rk4_detected(self):
        gen = oscillator(k=50.0, damping=0.0)
        with pytest.raises(UnstableStep):
            evolve(gen, [1.0, 0.0], 0.5, 400.0, "conservative", scheme="rk4", drift_tol=1e-14)


class TestCorrectionSplit:
    def test_ratio_against_quadrature(self):
        gen = oscillator(k=2.0, damping=0.4)
        z0 = np.array([0.5, 1.0])
        T = 2.0
        ratio, bound = correction_split(gen, z0, T)

        def out(A, t):
            return float(np.real(gen.obs @ expm(A * t) @ z0)[0])

        num = quad(lambda t: (out(gen.damped, t) - out(gen.skew, t)) ** 2, 0, T, limit=200)[0]
        den = quad(lambda t: out(gen.damped, t) ** 2, 0, T, limit=200)[0]
        assert ratio == pytest.approx(math.sqrt(num / den), rel=1e-8)
        assert bound == pytest.approx(T * 0.4)
        assert ratio <= bound

    def test_zero_denominator(self):
        gen = rotation(obs=(0.0, 0.0))
        with pytest.warns(ZeroDenominator):
            ratio, _ = correction_split(gen, [1.0, 0.0], 1.0)
        assert ratio == 0.0


class TestFitDecay:
    t = np.linspace(0.0, 100.0, 10001)

    def test_exponential(self):
        r = fit_decay(EnergyTrace(self.t, np.exp(-0.7 * self.t)), "exponential")
        assert r.rate_or_exponent == pytest.approx(0.7)
        assert r.passed

    def test_polynomial_pass(self):
        r = fit_decay(EnergyTrace(self.t, 1.0 / (1 + self.t)), "polynomial", {"exponent": 1.0})
        assert r.sup_ratio == pytest.approx(1.0)
        assert r.fitted_exponent == pytest.approx(1.0, abs=1e-6)
        assert r.passed

    def test_polynomial_outrun(self):
        r = fit_decay(EnergyTrace(self.t, (1 + self.t) ** -0.5), "polynomial", {"exponent": 1.0})
        assert r.tail_slope == pytest.approx(0.5, abs=1e-6)
        assert not r.passed

    def test_general_g(self):
        E = 1.0 / (1 + self.t)
        r = fit_decay(EnergyTrace(self.t, E), "general-G", {"G": lambda x: x, "theta": 0.5})
        assert r.sup_ratio == pytest.approx(1.0)
        assert r.passed

    def test_general_g_growth_inverts(self):
        t = np.array([0.0, 1.0, 9.0])
        g = general_g_growth(t, lambda x: x ** 2, 0.5)
        assert np.allclose(g, np.sqrt(1 + t))

    def test_general_g_not_monotone(self):
        with pytest.raises(ValueError):
            general_g_growth(np.array([1.0]), lambda x: np.sin(10 * x), 0.5)

    def test_errors(self):
        with pytest.raises(NonPositiveEnergy):
            fit_decay(EnergyTrace(self.t, -np.ones_like(self.t)))
        with pytest.raises(InsufficientSamples):
            fit_decay(EnergyTrace(self.t[:20], np.ones(20)))
        with pytest.raises(ValueError):
            fit_decay(EnergyTrace(self.t, np.ones_like(self.t)), "stretched")

    def test_to_dict(self):
        d = fit_decay(EnergyTrace(self.t, np.exp(-self.t / 10))).to_dict()
        assert d["pass"] is True and "passed" not in d


class TestObservability:
    def test_rotation_modal(self):
        rep = observability_constant(rotation(), 2 * math.pi)
        assert rep.constant == pytest.approx(math.pi, rel=1e-12)

    def test_rotation_quadrature(self):
        rep = observability_constant(rotation(), 2 * math.pi, method="quadrature")
        assert rep.constant == pytest.approx(math.pi, rel=1e-6)
        assert rep.extras["refinement_change"] < 0.02

    def test_state_space_gramian(self):
        gen = oscillator(k=3.0, damping=1.0)
        T = 1.7
        G = observability_gramian(gen, T)
        # compare with the metric-scaled modal form
        mu, V = conservative_eigenbasis(gen)
        Gm = modal_gramian(mu, gen.obs @ V, T)
        assert np.allclose(V.conj().T @ G @ V, Gm, atol=1e-12)
        c = observability_constant(gen, T).constant
        S = np.diag(1 / np.sqrt(gen.metric))
        ref = np.linalg.eigvalsh(S @ G @ S)[0]
        assert c == pytest.approx(ref, rel=1e-9)

    def test_short_horizon_degenerates(self):
        gen = oscillator(k=3.0, damping=1.0)
        assert observability_constant(gen, 0.1).constant < observability_constant(gen, 2.0).constant

    def test_quadrature_refuses_coarse(self):
        gen = oscillator(k=40.0, damping=1.0)
        with pytest.raises(QuadratureUnresolved):
            observability_constant(gen, 2.0, method="quadrature", quad_dt=0.2)

    def test_weight_errors(self):
        gen = rotation()
        with pytest.raises(BasisMismatch):
            observability_constant(gen, 1.0, SpectralWeight(np.array([1j, 2j, 3j]), -1.0))
        with pytest.raises(SingularWeight):
            observability_constant(gen, 1.0, SpectralWeight(np.array([-1j, 1j]), -1.0,
                                                            zero_tol=2.0, zero_mode_weight=0.0))

    def test_mode_selection(self):
        gen = rotation()
        rep = observability_constant(gen, 2 * math.pi, modes=[0])
        assert rep.dims_tested == [1]
        assert rep.constant == pytest.approx(math.pi)
