"""Observability Gramians and weighted observability constants."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .. import kernels
from ..errors import BasisMismatch, QuadratureUnresolved, SingularWeight
from .evolve import _van_loan
from .generator import SpectralWeight, conservative_eigenbasis


@dataclass(frozen=True)
class ObservabilityReport:
    """Weighted observability constant of a conservative flow.

    ``constant`` is the largest ``c`` with
    ``int_0^T ||obs z(t)||^2 dt >= c ||z(0)||_w^2`` on the tested modes, where
    ``||.||_w`` is the ``D(A_c^weight_order)`` norm.
    """

    horizon: float
    constant: float
    dims_tested: list
    weight_order: float
    zero_mode_weight: float = 1.0
    method: str = "modal"
    gram_min: float = 0.0
    gram_max: float = 0.0
    extras: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _kernel_matrix(mu, T):
    d = mu[None, :] - mu[:, None]
    x = 0.5 * d * T
    return T * np.exp(1j * x) * np.sinc(x / np.pi)


def _align_weight(weight, mu):
    lam = 1j * mu
    if weight.eigvals.size != mu.size:
        raise BasisMismatch(f"weight has {weight.eigvals.size} eigenvalues, spectrum has {mu.size}")
    tol = 1e-8 * max(1.0, float(np.max(np.abs(mu))) if mu.size else 1.0)
    if np.allclose(weight.eigvals, lam, rtol=0, atol=tol):
        return weight.weights()
    order = np.argsort(np.imag(weight.eigvals), kind="stable")
    if np.allclose(weight.eigvals[order], lam, rtol=0, atol=tol):
        w = np.empty(mu.size)
        w[:] = weight.weights()[order]
        return w
    raise BasisMismatch("weight eigenvalues do not match the conservative spectrum")


def modal_gramian(mu, B, T):
    """Exact Gramian in the eigenbasis: ``(B^H B) * K`` with ``K_jk = int e^{i(mu_k-mu_j)t}``."""
    B = np.atleast_2d(B)
    G = (B.conj().T @ B) * _kernel_matrix(np.asarray(mu, dtype=float), T)
    return 0.5 * (G + G.conj().T)


def _quadrature_gramian(mu, B, T, dt):
    n = max(1, int(round(T / dt)))
    step = np.diag(np.exp(1j * mu * (T / n)))
    G = kernels.gramian_trapezoid(step, B, n, T / n)
    return 0.5 * (G + G.conj().T)


def observability_gramian(gen, T):
    """State-space Gramian ``int_0^T Phi^H obs^H obs Phi`` of the conservative flow."""
    _, Q = _van_loan(gen.skew, gen.obs.conj().T @ gen.obs, T)
    return Q


def _weighted_min(G, w):
    if np.any(~np.isfinite(w)) or np.any(w <= 0):
        raise SingularWeight("spectral weights must be finite and positive")
    s = 1.0 / np.sqrt(w)
    H = s[:, None] * G * s[None, :]
    return float(np.linalg.eigvalsh(0.5 * (H + H.conj().T))[0])


def observability_constant(gen, T, weight=None, quad_dt=None, *, modes=None, method="modal",
                           refine_tol=0.02):
    """Observability constant ``c(T)`` of ``gen`` in a spectral-weight norm.

    Parameters
    ----------
    gen : GeneratorPair
        Only the conservative part and ``obs`` are used.
    T : float
        Horizon.
    weight : SpectralWeight, optional
        Norm on the initial data. Defaults to the energy norm (order 0).
    quad_dt : float, optional
        Trapezoid step for ``method="quadrature"`` (default ``T / 4000``).
    modes : array_like, optional
        Indices into the ascending conservative spectrum spanning the
        subspace of admissible initial data. Defaults to all modes.
    method : {"modal", "quadrature"}
        ``"modal"`` integrates the oscillatory kernel in closed form;
        ``"quadrature"`` uses the composite trapezoid rule and refuses the
        result if halving the step moves it by more than ``refine_tol``.

    Raises
    ------
    SingularWeight, BasisMismatch, QuadratureUnresolved
    """
    mu, V = conservative_eigenbasis(gen)
    if weight is None:
        weight = SpectralWeight(1j * mu, 0.0)
    w = _align_weight(weight, mu)
    idx = np.arange(mu.size) if modes is None else np.asarray(modes, dtype=int)
    if idx.size == 0:
        raise BasisMismatch("empty mode selection")
    mu_s, w_s = mu[idx], w[idx]
    if gen.obs.shape[0] == 0:
        B = np.zeros((1, idx.size), dtype=complex)
    else:
        B = gen.obs @ V[:, idx]
    extras = {}
    if method == "modal":
        G = modal_gramian(mu_s, B, T)
    elif method == "quadrature":
        dt = quad_dt or T / 4000.0
        G = _quadrature_gramian(mu_s, B, T, dt)
        G_half = _quadrature_gramian(mu_s, B, T, dt / 2)
        c1, c2 = _weighted_min(G, w_s), _weighted_min(G_half, w_s)
        change = abs(c1 - c2) / max(abs(c2), np.finfo(float).tiny)
        extras["refinement_change"] = float(change)
        if abs(c2) > 1e-14 * np.max(np.abs(G_half)) and change > refine_tol:
            raise QuadratureUnresolved(f"c(T) moved {change:.1%} when halving dt={dt:g}")
        G = G_half
        extras["quad_dt"] = dt / 2
    else:
        raise ValueError(f"unknown method {method!r}")
    c = _weighted_min(G, w_s)
    ev = np.linalg.eigvalsh(G)
    # the Gramian is PSD; negative values are rounding
    c = max(c, 0.0)
    return ObservabilityReport(float(T), c, [int(idx.size)], float(weight.order),
                               float(weight.zero_mode_weight), method, float(ev[0]),
                               float(ev[-1]), extras)
