"""Thermoelastic plate-type system with exponential decay.

On ``(0, 1)`` with hinged ends,

    u_tt + u'''' + alpha theta_xx = 0,   theta_t + beta theta - alpha u_txx = 0.

The sine basis diagonalizes everything, so each mode ``k`` is a 3x3 system.
Modal coordinates use the orthonormal basis ``sqrt(2) sin(k pi x)``:
``x_k`` (displacement), ``y_k`` (velocity) and ``theta_k``, with energy
``0.5 * (k^4 pi^4 x^2 + y^2 + theta^2)``. Functions taking
:class:`ThermoModeIC` use plain ``sin(k pi x)`` coefficients instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    EnergyTrace,
    assemble_generator,
    damped_from_obs,
    evolve,
    fit_decay,
    observability_constant,
)


@dataclass(frozen=True)
class ThermoModeIC:
    """Initial sine coefficients of one mode."""

    k: int
    u0: float
    u1: float
    theta0: float
    alpha: float

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")


def observation_horizon(alpha):
    """``T = 2 / (sqrt(1 + alpha^2) pi)``: every mode completes whole periods."""
    return 2.0 / (math.sqrt(1.0 + alpha * alpha) * math.pi)


def thermo_mode_solution(ic, t):
    """Closed-form conservative solution ``(u_k(t), theta_k(t))`` of one mode."""
    a, k2 = ic.alpha, (ic.k * math.pi) ** 2
    s = math.sqrt(1.0 + a * a)
    t = np.asarray(t, dtype=float)
    w = k2 * s * t
    c1 = (-a * ic.theta0 + k2 * ic.u0) / (k2 * (1 + a * a))
    c2 = ic.u1 / (k2 * s)
    u = a * (ic.theta0 + a * k2 * ic.u0) / (k2 * (1 + a * a)) + c1 * np.cos(w) + c2 * np.sin(w)
    theta = (s * (ic.theta0 + a * k2 * ic.u0)
             + a * s * (a * ic.theta0 - k2 * ic.u0) * np.cos(w)
             - a * (1 + a * a) * ic.u1 * np.sin(w)) / (1 + a * a) ** 1.5
    return u, theta


def thermo_obs_matrix(alpha):
    """Matrix of the quadratic form in ``(k^2 u0, theta0)``.

    Returns
    -------
    M : (2, 2) ndarray
    det, trace, lambda_min : float
        From the closed forms; ``lambda_min`` by the 2x2 eigenvalue formula.
    """
    a = float(alpha)
    q = (1 + a * a) ** 2.5
    off = -a * (a * a - 2) * math.pi / q
    M = np.array([[3 * a * a * math.pi ** 3 / q, off], [off, (2 + a ** 4) / (math.pi * q)]])
    det = 2 * a * a * math.pi ** 2 / (1 + a * a) ** 3
    tr = (2 + a ** 4 + 3 * a * a * math.pi ** 4) / (math.pi * q)
    disc = math.sqrt(0.25 * (M[0, 0] - M[1, 1]) ** 2 + off * off)
    # det / lambda_max avoids cancellation in tr/2 - disc
    lam_min = det / (0.5 * tr + disc)
    return M, det, tr, lam_min


def theta_square_integral(ic):
    """``int_0^T theta_k(t)^2 dt`` at the special horizon, in closed form."""
    a = ic.alpha
    M = thermo_obs_matrix(a)[0]
    v = np.array([ic.k ** 2 * ic.u0, ic.theta0])
    return float(a * a * ic.u1 ** 2 / ((1 + a * a) ** 1.5 * math.pi) + v @ M @ v)


def route_a_bound(ic):
    """Lower bound for ``int_0^T theta_k^2`` built from ``lambda_min``."""
    a = ic.alpha
    lam = thermo_obs_matrix(a)[3]
    return (a * a * ic.u1 ** 2 / ((1 + a * a) ** 1.5 * math.pi)
            + lam * (ic.k ** 4 * ic.u0 ** 2 + ic.theta0 ** 2))


def route_a_constant(alpha):
    """k-uniform observability constant against ``k^4 pi^4 u0^2 + u1^2 + theta0^2``."""
    a = float(alpha)
    lam = thermo_obs_matrix(a)[3]
    return min(a * a / ((1 + a * a) ** 1.5 * math.pi), lam / math.pi ** 4)


def thermo_block(k, alpha, beta):
    """3x3 damped block and metric for mode ``k``."""
    m = (k * math.pi) ** 4
    c = alpha * (k * math.pi) ** 2
    A = np.array([[0.0, 1.0, 0.0], [-m, 0.0, c], [0.0, -c, -beta]])
    return A, np.array([m, 1.0, 1.0])


def thermo_generator(N, alpha, beta):
    """Block-diagonal truncation with modes ``1..N`` (state ``x_k, y_k, theta_k``).

    ``obs`` has one row per mode, ``sqrt(beta) * theta_k``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    n = 3 * N
    skew = np.zeros((n, n))
    metric = np.empty(n)
    obs = np.zeros((N, n))
    for k in range(1, N + 1):
        A, w = thermo_block(k, alpha, 0.0)
        i = 3 * (k - 1)
        skew[i:i + 3, i:i + 3] = A
        metric[i:i + 3] = w
        obs[k - 1, i + 2] = math.sqrt(beta)
    return assemble_generator(skew, damped_from_obs(obs, metric), obs, metric,
                              labels={"example": "thermo", "N": N, "alpha": alpha, "beta": beta})


def thermo_observability(N, alpha, T=None):
    """Route (a) and Gramian route observability constants.

    The Gramian uses ``obs = theta`` (unit gain) and the energy norm.
    ``extras`` carries ``route_a`` and ``route_b``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    T = observation_horizon(alpha) if T is None else T
    rep = observability_constant(thermo_generator(N, alpha, 1.0), T)
    rep.extras.update({"route_a": route_a_constant(alpha), "route_b": rep.constant,
                       "alpha": alpha, "N": N})
    return rep


def block_rate(N, alpha, beta):
    """``-2 max_k Re(eig)`` over the damped blocks: the asymptotic energy rate."""
    worst = -math.inf
    for k in range(1, N + 1):
        A, _ = thermo_block(k, alpha, beta)
        worst = max(worst, float(np.max(np.linalg.eigvals(A).real)))
    return -2.0 * worst


def thermo_initial_state(N, z0_spec="mixed"):
    """Unit-energy initial data. ``"mixed"`` loads every mode, ``"low"`` only ``k = 1``."""
    z = np.zeros(3 * N)
    if z0_spec == "mixed":
        for k in range(1, N + 1):
            i = 3 * (k - 1)
            z[i] = 1.0 / ((k * math.pi) ** 2 * k)
            z[i + 1] = -0.5 / k
            z[i + 2] = 0.5 / k
    elif z0_spec == "low":
        z[:3] = [1.0 / math.pi ** 2, 0.0, 1.0]
    else:
        z = np.asarray(z0_spec, dtype=float).copy()
        if z.size != 3 * N:
            raise ValueError(f"z0 has length {z.size}, expected {3 * N}")
    metric = np.concatenate([thermo_block(k, 1.0, 0.0)[1] for k in range(1, N + 1)])
    return z / math.sqrt(0.5 * np.sum(metric * z * z))


def thermo_decay_experiment(N=32, alpha=1.0, beta=1.0, z0_spec="mixed", t_max=60.0, *, dt=0.05,
                            t_min=5.0):
    """Exponential fit of a damped run, with the block eigenvalue rate as oracle.

    Returns ``(report, trajectory)``; ``extras`` holds ``oracle_rate`` and
    ``max_step_ratio = max_t E(t + 1) / E(t)`` over ``t >= t_min``.
    """
    gen = thermo_generator(N, alpha, beta)
    traj = evolve(gen, thermo_initial_state(N, z0_spec), dt, t_max, "damped")
    E = traj.energies
    floor = 1e-13 * E[0]
    keep = E > floor
    trace = EnergyTrace(traj.times[keep], E[keep])
    rep = fit_decay(trace, "exponential", {"t_min": t_min})
    lag = int(round(1.0 / traj.dt))
    idx = np.nonzero((traj.times >= t_min) & keep)[0]
    idx = idx[idx + lag < E.size]
    ratios = E[idx + lag] / E[idx]
    rep.extras.update({
        "oracle_rate": block_rate(N, alpha, beta),
        "max_step_ratio": float(np.max(ratios)) if ratios.size else float("nan"),
        "N": N, "alpha": alpha, "beta": beta, "dt": traj.dt,
    })
    return rep, traj
