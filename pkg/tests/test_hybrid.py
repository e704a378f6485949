import numpy as np
import pytest

from stabkit import hybrid1d
from stabkit.core import conservative_eigenbasis, dissipation_residual, evolve
from stabkit.errors import GridTooCoarse, HorizonTooShort


def test_grid_guard():
    with pytest.raises(GridTooCoarse):
        hybrid1d.hybrid_assemble(4)
    with pytest.raises(ValueError):
        hybrid1d.hybrid_assemble(16, a=0.0)


def test_conservative_energy_exact():
    gen = hybrid1d.hybrid_assemble(32, b=0.0)
    traj = evolve(gen, hybrid1d.hybrid_initial_state(32, "bump"), 0.1, 20.0, "conservative")
    assert np.ptp(traj.energies) < 1e-12 * traj.energies[0]


def test_energy_identity():
    gen = hybrid1d.hybrid_assemble(32)
    traj = evolve(gen, hybrid1d.hybrid_initial_state(32), 0.05, 30.0)
    assert dissipation_residual(traj) <= 1e-10 * traj.energies[0]
    assert np.all(np.diff(traj.energies) <= 0)


def test_low_frequencies_converge():
    # conservative continuum frequencies solve a transcendental equation in mu;
    # the discrete ones should agree to O(h^2)
    def low(n):
        mu, _ = conservative_eigenbasis(hybrid1d.hybrid_assemble(n, b=0.0))
        return np.sort(mu[mu > 1e-9])[:3]

    e1 = np.abs(low(32) - low(256))
    e2 = np.abs(low(64) - low(256))
    assert np.all(e2 < 0.4 * e1)


def test_quarter_state():
    z = hybrid1d.hybrid_initial_state(64)
    # discrete displacement recovered by summing strains
    y = np.cumsum(z[:64]) / 64
    assert y[-1] == pytest.approx(1.0, abs=1e-3)


def test_convergence_order():
    order, _ = hybrid1d.convergence_order((32, 64, 128), t=5.0)
    assert 1.5 < order < 2.5


def test_observability_filtered_stable():
    a = hybrid1d.hybrid_observability(16)
    b = hybrid1d.hybrid_observability(32)
    assert a.constant > 0
    assert b.constant == pytest.approx(a.constant, rel=0.05)


def test_observability_warnings_and_zero():
    with pytest.warns(HorizonTooShort):
        hybrid1d.hybrid_observability(16, 2.0)
    assert hybrid1d.hybrid_observability(16, zero_obs=True).constant == 0.0


def test_undamped_run_flagged():
    rep, _ = hybrid1d.hybrid_decay_experiment(16, b=0.0, t_max=100.0)
    assert not rep.passed
