"""Pure-Python (numpy) versions of the hot loops.

Signatures and outputs match the compiled ``_kernels`` extension exactly; the
backend is picked in :mod:`stabkit.kernels`.
"""
import math

import numpy as np


def propagate(step, gram_step, metric, obs, z0, nsteps):
    """Iterate ``z <- step @ z`` and record energy, observation and dissipation.

    Returns
    -------
    states : (nsteps + 1, n) complex array
    energies : (nsteps + 1,) array, ``0.5 * sum(metric * |z|^2)``
    observed : (nsteps + 1,) array, ``||obs @ z||^2``
    increments : (nsteps,) array, ``Re(z^H Q z)`` at the start of each step,
        i.e. the energy dissipated over the step by the exact flow.
    """
    step = np.ascontiguousarray(step, dtype=complex)
    gram_step = np.ascontiguousarray(gram_step, dtype=complex)
    metric = np.ascontiguousarray(metric, dtype=float)
    obs = np.ascontiguousarray(obs, dtype=complex)
    n = step.shape[0]
    states = np.empty((nsteps + 1, n), dtype=complex)
    states[0] = z0
    z = states[0]
    for i in range(nsteps):
        z = step @ z
        states[i + 1] = z
    energies = 0.5 * (np.abs(states) ** 2 @ metric)
    if obs.shape[0]:
        observed = np.sum(np.abs(states @ obs.T) ** 2, axis=1)
    else:
        observed = np.zeros(nsteps + 1)
    head = states[:-1]
    increments = np.einsum("ti,ti->t", head.conj(), head @ gram_step.T).real
    return states, energies, observed, increments


def gramian_trapezoid(step, obs, nsteps, dt):
    """Composite trapezoid approximation of ``int_0^T Phi^H obs^H obs Phi dt``.

    ``Phi(t_n) = step^n`` with ``T = nsteps * dt``.
    """
    step = np.ascontiguousarray(step, dtype=complex)
    y = np.array(obs, dtype=complex)
    n = step.shape[0]
    gram = np.zeros((n, n), dtype=complex)
    for i in range(nsteps + 1):
        w = 0.5 * dt if i in (0, nsteps) else dt
        gram += w * (y.conj().T @ y)
        if i < nsteps:
            y = y @ step
    return gram


def ftilde(z):
    """Overflow-free beam characteristic function (divided by ``z^3 e^z / 2``)."""
    c = math.cos(z)
    s = math.sin(z)
    e = math.exp(-z)
    z3 = z * z * z
    return c + (s - c) / z3 + 2.0 * e + e * e * (c + c / z3 + s / z3)


def bisect_ftilde(a, b, maxiter=200):
    """Bisect ``ftilde`` on ``[a, b]`` down to adjacent floating point numbers.

    Returns ``nan`` when there is no sign change on the bracket.
    """
    fa = ftilde(a)
    fb = ftilde(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        return math.nan
    for _ in range(maxiter):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = ftilde(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)
