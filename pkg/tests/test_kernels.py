import math
import os
import subprocess
import sys

import numpy as np
import pytest

from stabkit import kernels
from stabkit.core import assemble_generator, damped_from_obs
from stabkit.core.evolve import step_operators

py = kernels.get_backend("python")
try:
    cy = kernels.get_backend("compiled")
except ImportError:
    cy = None

needs_compiled = pytest.mark.skipif(cy is None, reason="compiled extension not built")


@pytest.fixture
def system():
    rng = np.random.default_rng(3)
    n = 6
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    skew = X - X.conj().T
    obs = rng.standard_normal((2, n))
    gen = assemble_generator(skew, damped_from_obs(obs, np.ones(n)), obs)
    P, Q = step_operators(gen, 0.05)
    z0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return gen, P, Q, z0


def test_backend_name():
    assert kernels.BACKEND in ("compiled", "python")
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@needs_compiled
def test_propagate_agrees(system):
    gen, P, Q, z0 = system
    a = py.propagate(P, Q, gen.metric, gen.obs, z0, 200)
    b = cy.propagate(P, Q, gen.metric, gen.obs, z0, 200)
    for x, y in zip(a, b):
        assert np.allclose(x, y, rtol=1e-12, atol=1e-14)


@needs_compiled
def test_propagate_accepts_readonly(system):
    gen, P, Q, z0 = system
    P = P.copy()
    P.setflags(write=False)
    states = cy.propagate(P, Q, gen.metric, gen.obs, z0, 3)[0]
    assert states.shape == (4, gen.dim)


@needs_compiled
def test_gramian_agrees(system):
    gen, P, _, _ = system
    a = py.gramian_trapezoid(P, gen.obs.astype(complex), 100, 0.05)
    b = cy.gramian_trapezoid(P, gen.obs.astype(complex), 100, 0.05)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-13)


@needs_compiled
@pytest.mark.parametrize("z", [0.5, 2.0, 10.0, 200.0, 1e4])
def test_ftilde_agrees(z):
    assert cy.ftilde(z) == pytest.approx(py.ftilde(z), rel=1e-14, abs=1e-300)


@needs_compiled
def test_bisect_agrees():
    for k in range(1, 30):
        a, b = k * math.pi, (k + 1) * math.pi
        assert cy.bisect_ftilde(a, b) == py.bisect_ftilde(a, b)
    assert math.isnan(cy.bisect_ftilde(1.0, 1.1))


def test_energy_bookkeeping(system):
    gen, P, Q, z0 = system
    states, E, obs, inc = py.propagate(P, Q, gen.metric, gen.obs, z0, 50)
    assert np.allclose(E[:-1] - E[1:], inc, rtol=1e-10, atol=1e-13)


def test_pure_python_switch():
    code = "import stabkit.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, STABKIT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
