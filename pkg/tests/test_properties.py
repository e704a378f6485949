"""Property-based checks of the structural invariants."""
import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from stabkit import schrodinger as S
from stabkit.core import (
    EnergyTrace,
    SpectralWeight,
    assemble_generator,
    damped_from_obs,
    dissipation_residual,
    evolve,
    fit_decay,
    observability_constant,
)

finite = st.floats(-2.0, 2.0, allow_nan=False)


@st.composite
def systems(draw):
    n = draw(st.integers(2, 5))
    X = draw(arrays(float, (n, n), elements=finite))
    Y = draw(arrays(float, (n, n), elements=finite))
    metric = draw(arrays(float, n, elements=st.floats(0.2, 5.0)))
    obs = draw(arrays(float, (draw(st.integers(1, 2)), n), elements=finite))
    K = (X - X.T) + 1j * (Y + Y.T)
    # M A skew-Hermitian with M diagonal
    skew = K / metric[:, None]
    z0 = draw(arrays(float, n, elements=finite))
    assume(np.sum(metric * z0 ** 2) > 1e-3)
    return assemble_generator(skew, damped_from_obs(obs, metric), obs, metric), z0


@settings(max_examples=40, deadline=None)
@given(systems())
def test_energy_law(sys_):
    gen, z0 = sys_
    traj = evolve(gen, z0, 0.05, 3.0)
    E = traj.energies
    assert np.all(np.diff(E) <= 1e-12 * E[0])
    assert dissipation_residual(traj) <= 1e-9 * E[0]


@settings(max_examples=30, deadline=None)
@given(systems())
def test_conservative_flow_keeps_energy(sys_):
    gen, z0 = sys_
    traj = evolve(gen, z0, 0.1, 5.0, "conservative")
    assert np.ptp(traj.energies) <= 1e-10 * traj.energies[0]


@settings(max_examples=30, deadline=None)
@given(systems(), st.floats(0.2, 4.0))
def test_observability_monotone_in_horizon(sys_, T):
    gen, _ = sys_
    a = observability_constant(gen, T).constant
    b = observability_constant(gen, 2 * T).constant
    assert b >= a - 1e-9 * max(1.0, a)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 3.0), st.floats(0.1, 10.0))
def test_exponential_rate_recovered(rate, amp):
    t = np.linspace(0, 50, 2001)
    r = fit_decay(EnergyTrace(t, amp * np.exp(-rate * t)), "exponential", {"t_min": 1.0})
    assert math.isclose(r.rate_or_exponent, rate, rel_tol=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 3.0))
def test_polynomial_exact_rate_passes(p):
    t = np.linspace(0, 200, 4001)
    r = fit_decay(EnergyTrace(t, (1 + t) ** -p), "polynomial", {"exponent": p})
    assert r.passed
    assert math.isclose(r.fitted_exponent, p, rel_tol=1e-6)


@settings(max_examples=30, deadline=None)
@given(arrays(float, 6, elements=st.floats(0.1, 50.0)), st.floats(-3, 1))
def test_weights_positive(mags, order):
    w = SpectralWeight(1j * mags, order).weights()
    assert np.all(w > 0) and np.all(np.isfinite(w))


@settings(max_examples=50, deadline=None)
@given(st.floats(-1e3, 1e3).filter(lambda m: min(abs(m), abs(m - 1)) > 1e-3))
def test_charpoly_vieta(mu):
    x1, x2, d = S.schro_charpoly(mu)
    assert math.isclose(d, mu * (mu - 1) * (mu * mu + 3 * mu + 4), rel_tol=1e-12)
    scale = max(1.0, abs(mu) ** 3)
    assert abs((x1 + x2) + (mu * mu - mu)) <= 1e-12 * scale
    assert abs(x1 * x2 - (mu - mu ** 3)) <= 1e-10 * scale


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 80))
def test_branch_consistency(k):
    m = (k * math.pi) ** 2
    for b, kk in ((1, k), (1, -k), (2, k)):
        mu = S.schro_branch_eigenvalue(kk, b).mu
        x1, x2, _ = S.schro_charpoly(mu)
        assert abs((x1 if b == 1 else x2) + m) <= 1e-8 * m
        assert min(abs(mu), abs(mu - 1), abs(mu + 1)) >= 1e-6


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.integers(10, 200))
def test_sine_gap_monotone(xi, K):
    assert S.sine_gap(xi, 2 * K) <= S.sine_gap(xi, K)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 0.99))
def test_convergents_reconstruct(xi):
    try:
        cf = S.continued_fraction(xi, 60)
    except Exception:
        return
    assert abs(float(cf.convergents()[-1]) - xi) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(100, 400), st.floats(-50, 50))
def test_w3_cauchy_within_tail(K, y):
    lam = 1.0 + 1j * y
    a, tail = S.w3_series(S.SQRT2M1, lam, K)
    b, _ = S.w3_series(S.SQRT2M1, lam, 4 * K)
    assert abs(a - b) <= tail


@settings(max_examples=20, deadline=None)
@given(arrays(float, 48, elements=finite))
def test_projector_idempotent(z):
    spec = S.schro_spectrum(16, S.SQRT2M1)
    _, p = S.subspace_project(z, "H2", spec)
    _, pp = S.subspace_project(p, "H2", spec)
    assert np.allclose(p, pp, atol=1e-10 * max(1.0, np.abs(z).max()))
