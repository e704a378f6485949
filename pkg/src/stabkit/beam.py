"""Euler-Bernoulli beam with a dynamic boundary feedback channel.

The beam ``u_tt + u'''' = 0`` on ``(0, 1)`` is clamped at ``x = 0``, has
``u''(1) = 0`` and ``u'''(1) = eta``, and the channel obeys
``eta' + beta eta - u_t(1) = 0``. The conservative generator is diagonalized
exactly: its nonzero frequencies are ``mu = z^2`` with ``z`` a positive root
of the characteristic function, plus a simple zero eigenvalue with
eigenvector ``(-u0, 0, 1)``, ``u0(x) = x^2/2 - x^3/6``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from . import kernels
from .core import (
    SpectralWeight,
    assemble_generator,
    damped_from_obs,
    evolve,
    fit_decay,
    observability_constant,
    parallel_map,
)
from .errors import BeamOverflow, BracketFailure, DegenerateDeterminant, HorizonTooShort

K0_DEFAULT = 3
SCAN_STEPS = 1000
SIMPSON_PANELS = 4096
ZERO_MODE_ETA = math.sqrt(3.0) / 2.0


def beam_char(z, form="scaled"):
    """Beam characteristic function at ``z = sqrt(mu)``.

    Parameters
    ----------
    z : float
        Nonnegative square root of the frequency.
    form : {"raw", "scaled"}
        ``"raw"`` is ``z^3 + cosh z (z^3 cos z + sin z) - cos z sinh z``;
        it is accurate for ``z`` up to about 27. ``"scaled"`` divides it by
        ``z^3 e^z / 2`` and never overflows.

    Raises
    ------
    BeamOverflow
        Raw form requested where ``cosh z`` overflows.
    """
    z = float(z)
    if z < 0:
        raise ValueError("z must be nonnegative")
    if form == "raw":
        if z > 709.0:
            raise BeamOverflow(f"cosh({z}) overflows; use form='scaled'")
        return z ** 3 + math.cosh(z) * (z ** 3 * math.cos(z) + math.sin(z)) - math.cos(z) * math.sinh(z)
    if form == "scaled":
        if z == 0:
            return math.inf
        return kernels.ftilde(z)
    raise ValueError(f"form must be 'raw' or 'scaled', got {form!r}")


def sign_changes(a, b, steps=SCAN_STEPS):
    """Subintervals of ``[a, b]`` on which the scaled function changes sign."""
    grid = np.linspace(a, b, steps + 1)
    vals = np.array([kernels.ftilde(x) for x in grid])
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
    return [(float(grid[i]), float(grid[i + 1])) for i in idx]


@dataclass(frozen=True)
class BeamMode:
    """One eigenpair of the conservative beam generator.

    ``k`` is the bracket index (``sqrt|mu|`` lies in ``[k pi, (k+1) pi]``)
    and is ``None`` for the zero mode; ``sign`` distinguishes conjugate
    pairs. ``coeffs`` are the sin, sinh, cos, cosh coefficients of ``u``
    scaled so that ``eta = 1``; ``eta`` is the channel component of the unit
    eigenvector and ``norm`` the energy norm of the ``eta = 1`` vector.
    """

    k: int | None
    sign: int
    mu: float
    z: float
    coeffs: tuple
    eta: float
    norm: float
    int_u2: float = float("nan")
    bc_residual: float = 0.0

    @property
    def asymptotic_residual(self):
        if self.k is None or self.k == 0:
            return float("nan")
        return (self.z - math.pi / 2 - self.k * math.pi) * (self.k * math.pi) ** 3


@dataclass(frozen=True)
class BeamSpectrum:
    """Positive roots ``z_k`` with the derived two-sided spectrum.

    ``mus`` is sorted and contains ``-mu_k``, ``0`` and ``mu_k``.
    """

    ks: np.ndarray
    zs: np.ndarray
    k0: int
    unique_brackets: dict = field(default_factory=dict)

    @property
    def mus(self):
        mu = self.zs ** 2
        return np.concatenate([-mu[::-1], [0.0], mu])

    @property
    def gap(self):
        """``min(pi/2, smallest spacing of the low set J)``."""
        mus = self.mus
        low = mus[np.abs(mus) < self.mu_k0 + 1e-12]
        g = np.min(np.diff(low)) if low.size > 1 else math.inf
        return float(min(math.pi / 2, g))

    @property
    def mu_k0(self):
        hit = np.nonzero(self.ks == self.k0)[0]
        return float(self.zs[hit[0]] ** 2) if hit.size else float(self.zs[-1] ** 2)

    @property
    def residuals(self):
        k = self.ks.astype(float)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = (self.zs - math.pi / 2 - k * math.pi) * (k * math.pi) ** 3
        return np.where(self.ks > 0, r, np.nan)

    def z_of(self, k):
        hit = np.nonzero(self.ks == k)[0]
        if not hit.size:
            raise KeyError(f"bracket {k} not in spectrum")
        return float(self.zs[hit[0]])


def beam_eigenvalues(k_min, k_max, *, k0=K0_DEFAULT, check_brackets=True):
    """Positive roots for brackets ``0..k_max``.

    Roots below ``k_min * pi`` come from a sign-change scan; bracket ``k``
    for ``k_min <= k <= k_max`` is solved by bisection on
    ``[k pi, (k+1) pi]`` down to adjacent doubles.

    Raises
    ------
    BracketFailure
        No sign change on a bracket at or above ``k_min``.
    """
    if k_min < 1:
        raise ValueError("k_min must be at least 1")
    zs = []
    for a, b in sign_changes(1e-3, k_min * math.pi, SCAN_STEPS * k_min):
        zs.append(kernels.bisect_ftilde(a, b))
    for k in range(k_min, k_max + 1):
        z = kernels.bisect_ftilde(k * math.pi, (k + 1) * math.pi)
        if math.isnan(z):
            raise BracketFailure(f"no sign change of the characteristic function on bracket {k}")
        zs.append(z)
    zs = np.array(sorted(zs))
    ks = np.floor(zs / math.pi).astype(int)
    if np.any(np.diff(ks) != 1) or (ks.size and ks[0] != 0):
        raise BracketFailure(f"brackets are not one-root-each: {ks.tolist()}")
    unique = {}
    if check_brackets:
        for k in range(k0, k_max + 1):
            unique[k] = len(sign_changes(k * math.pi, (k + 1) * math.pi)) == 1
    return BeamSpectrum(ks, zs, k0, unique)


def _modal_pieces(z, x):
    """Overflow-free building blocks of the mode shape at points ``x``."""
    c, s, e = math.cos(z), math.sin(z), math.exp(-z)
    den = 1.0 + 2.0 * c * e + e * e
    a = (s - c - e) / den
    r = 2.0 * a * e  # beta - 1
    ep = np.exp(z * (x - 1.0))
    em = np.exp(-z * (x + 1.0))
    return r, a * (ep + em), a * (ep - em)


def mode_shape(z, c1, x, deriv=0):
    """``u^(deriv)(x)`` for the ``eta = 1`` eigenfunction with root ``z``."""
    x = np.asarray(x, dtype=float)
    r, bch, bsh = _modal_pieces(z, x)
    zx = z * x
    ph = deriv * math.pi / 2
    trig = np.sin(zx + ph) - np.cos(zx + ph) - r * np.cos(zx + ph)
    hyp = bch if deriv % 2 == 0 else bsh
    return c1 * z ** deriv * (trig + (-1.0) ** deriv * np.exp(-zx) + hyp)


def c1_from_determinant(z):
    """``c1`` from the explicit inverse of the 4x4 boundary system."""
    c, e = math.cos(z), math.exp(-z)
    sech = 2.0 * e / (1.0 + e * e)
    return -(c * sech + 1.0) / (2.0 * z ** 3 * (sech + c))


def beam_mode(k, spectrum, sign=1):
    """Eigenpair for bracket ``k`` (or the zero mode when ``k is None``).

    Raises
    ------
    DegenerateDeterminant
        ``1 + cos z cosh z`` vanishes at the root, which is inconsistent.
    """
    if k is None:
        return BeamMode(None, 1, 0.0, 0.0, (0j, 0j, 0j, 0j), ZERO_MODE_ETA, 2.0 / math.sqrt(3.0),
                        float("nan"), 0.0)
    z = spectrum.z_of(k)
    c, e = math.cos(z), math.exp(-z)
    sech = 2.0 * e / (1.0 + e * e)
    det_scaled = sech + c
    if abs(det_scaled) < 1e-14:
        raise DegenerateDeterminant(f"det M vanishes at z={z}")
    # u(1) = 1 fixes c1; far better conditioned than the determinant form
    c1 = 1.0 / float(mode_shape(z, 1.0, 1.0))
    r = 2.0 * (math.sin(z) - c - e) / (1.0 / e + 2.0 * c + e) if z < 700 else 0.0
    beta_k = 1.0 + r
    coeffs = (complex(c1), complex(-c1), complex(-beta_k * c1), complex(beta_k * c1))
    x = np.linspace(0.0, 1.0, SIMPSON_PANELS + 1)
    u = mode_shape(z, c1, x)
    int_u2 = float(simpson(u * u, x=x))
    norm2 = 2.0 * z ** 4 * int_u2
    bc = max(
        abs(mode_shape(z, c1, 0.0)),
        abs(mode_shape(z, c1, 0.0, 1)) / z,
        abs(mode_shape(z, c1, 1.0, 2)) / z ** 2,
        abs(mode_shape(z, c1, 1.0, 3) - 1.0) / z ** 3,
        abs(mode_shape(z, c1, 1.0) - 1.0),
    )
    return BeamMode(int(k), int(sign), sign * z * z, z, coeffs, 1.0 / math.sqrt(norm2),
                    math.sqrt(norm2), int_u2, float(bc))


def beam_spectrum(N, k0=K0_DEFAULT):
    """Spectrum holding the ``N`` lowest positive frequencies."""
    if N < 1:
        raise ValueError("N must be at least 1")
    k_min = min(k0, N)
    return beam_eigenvalues(k_min, N - 1, k0=k0, check_brackets=False)


def beam_modes(N, spectrum=None):
    """Zero mode plus the ``N`` lowest positive modes, ordered by bracket."""
    spectrum = spectrum or beam_spectrum(N)
    pos = parallel_map(lambda k: beam_mode(k, spectrum), range(N))
    return [beam_mode(None, spectrum)] + pos


def beam_generator(N, beta):
    """Modal truncation with ``N`` positive modes (dimension ``2N + 1``).

    Coordinates are coefficients on the unit eigenvectors ordered by
    frequency: ``-mu_N .. -mu_1, 0, mu_1 .. mu_N``. The metric is the
    identity, the observation row is ``sqrt(beta) * eta`` per mode, and the
    damping is ``-obs^H obs``.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    modes = beam_modes(N)
    pos = modes[1:]
    mus = np.array([-m.mu for m in pos[::-1]] + [0.0] + [m.mu for m in pos])
    etas = np.array([m.eta for m in pos[::-1]] + [modes[0].eta] + [m.eta for m in pos])
    obs = math.sqrt(beta) * etas[None, :]
    metric = np.ones(mus.size)
    gen = assemble_generator(np.diag(1j * mus), damped_from_obs(obs, metric), obs, metric,
                             labels={"example": "beam", "N": N, "beta": beta})
    return gen


def beam_observability(N, T=8.0, *, weight_order=-1.0, zero_mode_weight=1.0, beta=1.0,
                       zero_obs=False):
    """Gramian observability constant of the beam truncation.

    Warns ``HorizonTooShort`` when ``T <= 2 pi / gap``.
    """
    spec = beam_spectrum(N)
    if T <= 2 * math.pi / spec.gap:
        warnings.warn(f"T={T} does not exceed 2*pi/gap={2 * math.pi / spec.gap:.4g}",
                      HorizonTooShort, stacklevel=2)
    gen = beam_generator(N, 0.0 if zero_obs else beta)
    weight = SpectralWeight.for_generator(gen, weight_order, zero_mode_weight)
    rep = observability_constant(gen, T, weight)
    rep.extras.update({"gap": spec.gap, "ingham_horizon": 2 * math.pi / spec.gap, "N": N})
    return rep


def beam_initial_state(N, z0_spec="mixed", beta=1.0, gen=None):
    """Initial modal coefficients with unit graph norm ``||z||^2 + ||A_d z||^2``.

    ``"mixed"`` puts ``(1 + n)^-4`` on the ``n``-th mode pair (``n >= 1``)
    with alternating phase and ``1/2`` on the zero mode; ``"zero"`` is the
    zero mode alone. An explicit array is normalized as given.
    """
    gen = gen or beam_generator(N, beta)
    n = gen.dim
    if isinstance(z0_spec, str):
        z = np.zeros(n, dtype=complex)
        if z0_spec == "mixed":
            for j in range(1, N + 1):
                a = (1.0 + j) ** -4 * (1j if j % 2 else 1.0)
                z[N + j] = a
                z[N - j] = np.conj(a)
            z[N] = 0.5
        elif z0_spec == "zero":
            z[N] = 1.0
        else:
            raise ValueError(f"unknown z0 spec {z0_spec!r}")
    else:
        z = np.asarray(z0_spec, dtype=complex).copy()
    g2 = np.sum(np.abs(z) ** 2) + np.sum(np.abs(gen.damped @ z) ** 2)
    return z / math.sqrt(g2)


def beam_decay_experiment(N=32, beta=1.0, z0_spec="mixed", t_max=200.0, *, dt=0.05, t_min=5.0,
                          threshold=10.0):
    """Damped run fitted against ``E(t) (1 + t) <= C ||U0||^2_graph``.

    Returns the polynomial :class:`DecayReport` together with the
    trajectory. The zero-mode energy is reported separately in ``extras``.
    """
    gen = beam_generator(N, beta)
    z0 = beam_initial_state(N, z0_spec, beta, gen)
    traj = evolve(gen, z0, dt, t_max, "damped")
    rep = fit_decay(traj, "polynomial",
                    {"exponent": 1.0, "scale": 1.0, "t_min": t_min, "threshold": threshold})
    zero = 0.5 * np.abs(traj.states[:, N]) ** 2
    rep.extras.update({
        "N": N,
        "beta": beta,
        "dt": traj.dt,
        "zero_mode_energy_initial": float(zero[0]),
        "zero_mode_energy_final": float(zero[-1]),
        "energy_final": float(traj.energies[-1]),
    })
    return rep, traj
