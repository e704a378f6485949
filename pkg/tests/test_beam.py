import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from stabkit import beam
from stabkit.core import dissipation_residual
from stabkit.errors import BeamOverflow, HorizonTooShort


def raw_char(z):
    return z ** 3 + math.cosh(z) * (z ** 3 * math.cos(z) + math.sin(z)) - math.cos(z) * math.sinh(z)


@pytest.fixture(scope="module")
def spec():
    return beam.beam_eigenvalues(3, 60)


def test_low_roots_against_brentq(spec):
    for k in range(4):
        ref = brentq(raw_char, k * math.pi + 1e-6, (k + 1) * math.pi)
        assert spec.z_of(k) == pytest.approx(ref, rel=1e-12)


def test_scaled_and_raw_agree():
    for z in (0.7, 3.0, 12.0):
        scale = 0.5 * z ** 3 * math.exp(z)
        assert beam.beam_char(z, "raw") == pytest.approx(scale * beam.beam_char(z), rel=1e-9)
    with pytest.raises(BeamOverflow):
        beam.beam_char(800.0, "raw")
    assert math.isfinite(beam.beam_char(800.0))


def test_one_root_per_bracket(spec):
    assert list(spec.ks) == list(range(61))
    assert all(spec.unique_brackets.values())


def test_roots_are_roots(spec):
    assert max(abs(beam.beam_char(z)) for z in spec.zs) <= 1e-10


def test_residual_tends_to_one(spec):
    r = spec.residuals
    assert 0.8 <= r[20] <= 1.2
    assert np.all(np.diff(r[20:]) > 0)
    assert r[60] < 1


def test_bracket_failure():
    with pytest.raises(ValueError):
        beam.beam_eigenvalues(0, 5)


def test_mode_boundary_conditions(spec):
    for k in (0, 5, 40):
        m = beam.beam_mode(k, spec)
        assert m.bc_residual < 1e-10
        assert beam.mode_shape(m.z, m.coeffs[0], np.array([1.0]))[0] == pytest.approx(1.0)


def test_mode_norm_quadrature(spec):
    m = beam.beam_mode(2, spec)
    ref = quad(lambda x: beam.mode_shape(m.z, m.coeffs[0].real, np.array([x]))[0] ** 2, 0, 1,
               epsabs=1e-13)[0]
    assert m.int_u2 == pytest.approx(ref, rel=1e-9)
    assert m.eta == pytest.approx(1.0 / m.norm)


def test_c1_formulas_agree(spec):
    m = beam.beam_mode(3, spec)
    assert m.coeffs[0] == pytest.approx(beam.c1_from_determinant(m.z), rel=1e-8)


def test_eta_scaling(spec):
    # k^4 eta_k^2 settles to a constant
    vals = [k ** 4 * beam.beam_mode(k, spec).eta ** 2 for k in (20, 40, 60)]
    assert np.all(np.diff(vals) > 0)
    assert vals[-1] == pytest.approx(2 / math.pi ** 4, rel=0.05)


def test_generator_layout():
    gen = beam.beam_generator(8, 1.0)
    mu = np.imag(np.diag(gen.skew))
    assert gen.dim == 17
    assert np.all(np.diff(mu) > 0) and mu[8] == 0
    assert gen.obs[0, 8] == pytest.approx(beam.ZERO_MODE_ETA)


def test_observability_weighted_stable():
    c = [beam.beam_observability(N).constant for N in (8, 16)]
    assert c[0] > 0
    assert c[1] == pytest.approx(c[0], rel=0.05)


def test_observability_unweighted_degenerates():
    c = [beam.beam_observability(N, weight_order=0.0).constant for N in (8, 16)]
    assert c[1] < 0.2 * c[0]


def test_horizon_warning():
    with pytest.warns(HorizonTooShort):
        beam.beam_observability(8, 1.0)


def test_zero_observation():
    assert beam.beam_observability(8, zero_obs=True).constant == 0.0


def test_initial_state_unit_graph_norm():
    gen = beam.beam_generator(8, 1.0)
    z = beam.beam_initial_state(8, "mixed", gen=gen)
    g2 = np.sum(np.abs(z) ** 2) + np.sum(np.abs(gen.damped @ z) ** 2)
    assert g2 == pytest.approx(1.0)


def test_decay_short_run():
    rep, traj = beam.beam_decay_experiment(8, t_max=200.0)
    assert dissipation_residual(traj) <= 1e-8 * traj.energies[0]
    assert rep.passed
    assert rep.extras["zero_mode_energy_final"] < rep.extras["zero_mode_energy_initial"]
