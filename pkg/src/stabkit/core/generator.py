"""Finite-dimensional closed-loop generators and weighted modal norms."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    BasisMismatch,
    DimensionMismatch,
    NotDissipative,
    NotSkewAdjoint,
    ZeroVector,
)


def _frozen(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GeneratorPair:
    """Conservative generator plus dissipative perturbation.

    The state space carries the diagonal energy inner product
    ``<z, w> = sum(metric * z * conj(w))``. ``obs`` holds the rows of the
    observation map, so the damped energy obeys ``E' = -||obs @ z||^2``.
    Build instances with :func:`assemble_generator`, which validates them.
    """

    skew: np.ndarray
    dissipative: np.ndarray
    obs: np.ndarray
    metric: np.ndarray
    labels: dict = field(default_factory=dict, compare=False)

    @property
    def dim(self):
        return self.skew.shape[0]

    @property
    def damped(self):
        return self.skew + self.dissipative

    def generator(self, mode="damped"):
        if mode == "damped":
            return self.damped
        if mode == "conservative":
            return self.skew
        raise ValueError(f"mode must be 'damped' or 'conservative', got {mode!r}")

    def energy(self, z):
        """``0.5 * ||z||^2`` in the metric; works row-wise on 2-D input."""
        z = np.asarray(z)
        return 0.5 * (np.abs(z) ** 2 @ self.metric)

    def norm(self, z):
        return float(np.sqrt(2.0 * self.energy(z)))

    def observe(self, z):
        return np.asarray(z) @ self.obs.T

    def obs_norm(self):
        """Operator norm of ``obs`` from the metric space to the output space."""
        if self.obs.shape[0] == 0:
            return 0.0
        return float(np.linalg.norm(self.obs / np.sqrt(self.metric), 2))

    def without_damping(self):
        return GeneratorPair(self.skew, np.zeros_like(self.dissipative), self.obs,
                             self.metric, dict(self.labels))


def assemble_generator(skew, dissipative=None, obs=None, metric=None, *, tol=1e-10, labels=None):
    """Validate and freeze a :class:`GeneratorPair`.

    Raises
    ------
    DimensionMismatch
        Non-square or inconsistent shapes, or a non-positive metric.
    NotSkewAdjoint
        ``M skew + skew^H M`` exceeds ``tol`` relative to ``||M skew||``.
    NotDissipative
        The symmetric part of ``dissipative`` has a positive direction, or it
        does not equal ``-obs^H obs`` (the energy law would be violated).
    """
    skew = np.atleast_2d(np.asarray(skew, dtype=complex))
    if skew.ndim != 2 or skew.shape[0] != skew.shape[1]:
        raise DimensionMismatch(f"skew must be square, got shape {skew.shape}")
    n = skew.shape[0]
    if dissipative is None:
        dissipative = np.zeros((n, n), dtype=complex)
    dissipative = np.atleast_2d(np.asarray(dissipative, dtype=complex))
    if dissipative.shape != (n, n):
        raise DimensionMismatch(f"dissipative has shape {dissipative.shape}, expected {(n, n)}")
    if obs is None:
        obs = np.zeros((0, n), dtype=complex)
    obs = np.asarray(obs, dtype=complex)
    if obs.size == 0:
        obs = np.zeros((0, n), dtype=complex)
    obs = np.atleast_2d(obs)
    if obs.shape[1] != n:
        raise DimensionMismatch(f"observation rows have length {obs.shape[1]}, expected {n}")
    metric = np.ones(n) if metric is None else np.asarray(metric, dtype=float).ravel()
    if metric.shape != (n,):
        raise DimensionMismatch(f"metric has length {metric.size}, expected {n}")
    if not np.all(np.isfinite(metric)) or np.any(metric <= 0):
        raise DimensionMismatch("metric weights must be strictly positive")

    Ms = metric[:, None] * skew
    sym = Ms + Ms.conj().T
    scale = np.linalg.norm(Ms)
    if np.linalg.norm(sym) > tol * max(scale, np.finfo(float).tiny):
        raise NotSkewAdjoint(
            f"||M A + A^H M|| / ||M A|| = {np.linalg.norm(sym) / max(scale, 1e-300):.3e} > {tol:g}")

    Md = metric[:, None] * dissipative
    dsym = 0.5 * (Md + Md.conj().T)
    gram = obs.conj().T @ obs
    dscale = max(np.linalg.norm(Md), np.linalg.norm(gram), np.finfo(float).tiny)
    if n and np.linalg.eigvalsh(dsym).max() > tol * dscale:
        raise NotDissipative("Re<A_r z, z> is positive for some z")
    if np.linalg.norm(dsym + gram) > tol * dscale:
        raise NotDissipative("Re<A_r z, z> differs from -||obs z||^2")

    return GeneratorPair(_frozen(skew), _frozen(dissipative), _frozen(obs), _frozen(metric),
                         dict(labels or {}))


def damped_from_obs(obs, metric):
    """``-M^{-1} obs^H obs``: the dissipative part consistent with ``obs``."""
    obs = np.atleast_2d(np.asarray(obs, dtype=complex))
    return -(obs.conj().T @ obs) / np.asarray(metric, dtype=float)[:, None]


def conservative_eigenbasis(gen):
    """Frequencies and metric-orthonormal eigenvectors of the conservative part.

    ``skew @ V[:, j] == 1j * mu[j] * V[:, j]`` with ``V^H M V = I``, ``mu``
    ascending. Phases are fixed so the first observation channel of each
    eigenvector is real and nonnegative; unobserved eigenvectors get their
    largest energy component real and positive instead.
    """
    sq = np.sqrt(gen.metric)
    S = sq[:, None] * gen.skew / sq[None, :]
    H = -1j * S
    H = 0.5 * (H + H.conj().T)
    mu, psi = np.linalg.eigh(H)
    V = psi / sq[:, None]
    if gen.obs.shape[0]:
        y = gen.obs[0] @ V
    else:
        y = np.zeros(V.shape[1], dtype=complex)
    tiny = 1e-12 * max(1.0, float(np.max(np.abs(y))) if y.size else 1.0)
    for j in range(V.shape[1]):
        if abs(y[j]) > tiny:
            V[:, j] *= abs(y[j]) / y[j]
        else:
            i = int(np.argmax(np.abs(psi[:, j])))
            V[:, j] *= abs(V[i, j]) / V[i, j]
    return mu, V


def modal_coefficients(gen, z, V=None):
    """Coordinates of ``z`` in the metric-orthonormal eigenbasis."""
    if V is None:
        _, V = conservative_eigenbasis(gen)
    return V.conj().T @ (gen.metric * np.asarray(z, dtype=complex))


@dataclass(frozen=True)
class SpectralWeight:
    """Modal weights ``|mu|^(2 * order)`` defining the ``D(A_c^order)`` norm.

    Eigenvalues with ``|mu|`` below ``zero_tol * max(1, max|mu|)`` count as
    kernel modes and get ``zero_mode_weight`` when ``order != 0``.
    """

    eigvals: np.ndarray
    order: float = 0.0
    zero_mode_weight: float = 1.0
    zero_tol: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "eigvals", _frozen(np.asarray(self.eigvals, dtype=complex).ravel()))

    @classmethod
    def for_generator(cls, gen, order=0.0, zero_mode_weight=1.0):
        mu, _ = conservative_eigenbasis(gen)
        return cls(1j * mu, order, zero_mode_weight)

    def zero_modes(self):
        mag = np.abs(self.eigvals)
        cut = self.zero_tol * max(1.0, float(mag.max()) if mag.size else 1.0)
        return mag <= cut

    def weights(self):
        if self.order == 0:
            return np.ones(self.eigvals.size)
        mag = np.abs(self.eigvals)
        zero = self.zero_modes()
        w = np.empty(mag.size)
        w[~zero] = mag[~zero] ** (2.0 * self.order)
        w[zero] = self.zero_mode_weight
        return w

    def restrict(self, index):
        return SpectralWeight(self.eigvals[index], self.order, self.zero_mode_weight, self.zero_tol)


def spectral_norm(coeffs, weight):
    """``sqrt(sum |c_k|^2 w_k)`` for coefficients in the eigenbasis of ``weight``."""
    c = np.asarray(coeffs, dtype=complex).ravel()
    if c.size != weight.eigvals.size:
        raise BasisMismatch(f"{c.size} coefficients for {weight.eigvals.size} eigenvalues")
    return float(np.sqrt(np.sum(np.abs(c) ** 2 * weight.weights())))


def hautus_residual(gen, omega, z):
    """``(||(i omega - A_c) z||^2 + ||obs z||^2) / ||z||^2`` in the metric."""
    z = np.asarray(z, dtype=complex)
    nz = np.sum(gen.metric * np.abs(z) ** 2)
    if not nz > 0:
        raise ZeroVector("Hautus residual needs a nonzero vector")
    r = 1j * omega * z - gen.skew @ z
    num = np.sum(gen.metric * np.abs(r) ** 2) + np.sum(np.abs(gen.obs @ z) ** 2)
    return float(num / nz)


def spectral_radius_estimate(A, iters=200, seed=0):
    """Power-iteration estimate of ``||A||_2`` (an upper bound on the spectral radius)."""
    A = np.asarray(A, dtype=complex)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(A.shape[0]) + 1j * rng.standard_normal(A.shape[0])
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iters):
        y = A.conj().T @ (A @ x)
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        new = np.sqrt(ny)
        x = y / ny
        if abs(new - est) <= 1e-10 * new:
            est = new
            break
        est = new
    return float(est)
