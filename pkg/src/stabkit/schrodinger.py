"""Wave equation coupled to a Schrodinger equation with point damping.

On ``(0, 1)`` with Dirichlet ends,

    u_tt - u_xx + w = 0,   w_t - i w_xx + w(xi) delta_xi - u_t = 0.

Modal coordinates use ``sqrt(2) sin(k pi x)``: block ``k`` holds
``(u_k, v_k, w_k)`` with energy ``0.5 * (k^2 pi^2 |u|^2 + |v|^2 + |w|^2)``.
The only inter-mode coupling is the rank-one damping ``-s s^T`` on the
``w`` channel, ``s_k = sqrt(2) sin(k pi xi)``.

Without damping each block has three frequencies, the real roots of

    mu^3 + m mu^2 - (1 + m) mu - m^2 = 0,   m = k^2 pi^2,

one near each of ``k pi``, ``-k pi`` (branch 1, wave-like) and ``-m``
(branch 2, Schrodinger-like).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import polygamma

from .core import (
    SpectralWeight,
    assemble_generator,
    damped_from_obs,
    evolve,
    fit_decay,
    modal_gramian,
    parallel_map,
)
from .core.observability import ObservabilityReport, _weighted_min
from .errors import (
    BasisIncomplete,
    BranchAmbiguity,
    ExcludedMu,
    RationalDetected,
    SeedDivergence,
    SingularSystem,
    XiNotInS,
)

SQRT2M1 = math.sqrt(2.0) - 1.0
MAX_DEPTH = 60
BRANCH_TOL = 1e-8
SCALE_EXP = {1: 1, 2: 4}


# characteristic polynomial and branches

def schro_charpoly(mu):
    """Roots ``X1 <= X2`` (real case) of ``X^2 + (mu^2 - mu) X + mu - mu^3`` and ``Delta``.

    ``Delta = mu (mu - 1) (mu^2 + 3 mu + 4)``; for ``0 < mu < 1`` it is
    negative and the roots are complex conjugates. Uses the cancellation-free
    quadratic formula.

    Raises
    ------
    ExcludedMu
        ``mu`` is 0 or 1, where the two roots coincide.
    """
    mu = float(mu)
    if mu == 0.0 or mu == 1.0:
        raise ExcludedMu(f"mu={mu} is excluded")
    b = mu * mu - mu
    c = mu - mu ** 3
    delta = mu * (mu - 1.0) * (mu * mu + 3.0 * mu + 4.0)
    if delta >= 0:
        sq = math.sqrt(delta)
        q = -0.5 * (b + math.copysign(sq, b))
        r1, r2 = q, c / q
        return min(r1, r2), max(r1, r2), delta
    sq = 1j * math.sqrt(-delta)
    return 0.5 * (-b - sq), 0.5 * (-b + sq), delta


def _cubic(mu, m):
    return ((mu + m) * mu - (1.0 + m)) * mu - m * m


def _cubic_prime(mu, m):
    return (3.0 * mu + 2.0 * m) * mu - (1.0 + m)


def _safeguarded_newton(m, seed, maxiter=100):
    """Newton on the cubic from ``seed``, kept inside an expanding sign bracket."""
    step = max(1.0, abs(seed)) * 1e-3
    a, b = seed - step, seed + step
    fa, fb = _cubic(a, m), _cubic(b, m)
    for _ in range(60):
        if fa * fb <= 0:
            break
        step *= 2.0
        a, b = seed - step, seed + step
        fa, fb = _cubic(a, m), _cubic(b, m)
    else:
        raise SeedDivergence(f"no sign change around seed {seed}")
    x = seed
    for _ in range(maxiter):
        fx = _cubic(x, m)
        if fx == 0:
            return x
        if (fx < 0) == (fa < 0):
            a, fa = x, fx
        else:
            b, fb = x, fx
        d = _cubic_prime(x, m)
        x_new = x - fx / d if d != 0 else 0.5 * (a + b)
        if not min(a, b) < x_new < max(a, b):
            x_new = 0.5 * (a + b)
        if abs(x_new - x) <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            return x_new
        x = x_new
    return x


def cubic_roots(k):
    """The three frequencies of block ``k``, ascending."""
    m = (k * math.pi) ** 2
    seeds = (-m, -abs(k) * math.pi, abs(k) * math.pi)
    roots = [_safeguarded_newton(m, s) for s in seeds]
    if len({round(r, 9) for r in roots}) < 3:
        roots = sorted(np.roots([1.0, m, -(1.0 + m), -m * m]).real)
        roots = [_safeguarded_newton(m, r) for r in roots]
    return sorted(roots)


def classify_branch(mu, k):
    """1 if ``X1(mu) = -k^2 pi^2``, 2 if ``X2(mu)`` does, 0 if neither.

    Raises
    ------
    BranchAmbiguity
        Both roots match.
    """
    m = (k * math.pi) ** 2
    x1, x2, _ = schro_charpoly(mu)
    hit1 = abs(x1 + m) <= BRANCH_TOL * m
    hit2 = abs(x2 + m) <= BRANCH_TOL * m
    if hit1 and hit2:
        raise BranchAmbiguity(f"both roots match at mu={mu}, k={k}")
    return 1 if hit1 else 2 if hit2 else 0


@dataclass(frozen=True)
class SchroEigen:
    """Eigenpair of the conservative generator.

    ``k`` is signed for branch 1 (its sign is the sign of ``mu``) and
    positive for branch 2. ``w_at_xi`` is
    ``(mu^2 - k^2 pi^2) sin(k pi xi) / |k|^scale_exp`` and ``norm`` the
    energy norm of ``(sin, i mu sin, (mu^2 - k^2 pi^2) sin) / |k|^scale_exp``.
    ``vector`` is the unit eigenvector on block ``|k|`` with a real
    nonnegative observation.
    """

    k: int
    branch: int
    mu: float
    w_at_xi: float = float("nan")
    scale_exp: int = 1
    norm: float = float("nan")
    gap_w: float = float("nan")
    vector: tuple = field(default=(), repr=False)
    residual: float = 0.0

    @property
    def block(self):
        return abs(self.k)

    @property
    def asymptotic_residual(self):
        kk = abs(self.k)
        if self.branch == 1:
            return (self.mu - math.copysign(kk * math.pi, self.mu)) * 2 * math.pi ** 2 * kk ** 2
        return abs(self.mu + (kk * math.pi) ** 2) * kk ** 2


def schro_branch_eigenvalue(k, branch):
    """Frequency ``mu_{k, branch}``.

    For branch 1, ``k`` may be negative (the root near ``-|k| pi``).
    """
    if k == 0:
        raise ValueError("k must be nonzero")
    if branch == 2 and k < 0:
        raise ValueError("branch 2 is indexed by k >= 1")
    kk = abs(k)
    m = (kk * math.pi) ** 2
    hits = [(mu, classify_branch(mu, kk)) for mu in cubic_roots(kk)]
    if branch == 1:
        cand = [mu for mu, b in hits if b == 1 and (mu > 0) == (k > 0)]
    elif branch == 2:
        cand = [mu for mu, b in hits if b == 2]
    else:
        raise ValueError("branch must be 1 or 2")
    if len(cand) != 1:
        raise BranchAmbiguity(f"found {len(cand)} roots for k={k}, branch={branch}")
    mu = cand[0]
    return SchroEigen(k, branch, mu, scale_exp=SCALE_EXP[branch],
                      residual=abs(_cubic(mu, m)) / (m * m))


def gap_factor(mu, kk, branch):
    """``mu^2 - k^2 pi^2``, through ``mu / (mu + m)`` on branch 1 to avoid cancellation."""
    m = (kk * math.pi) ** 2
    if branch == 1:
        return mu / (mu + m)
    return mu * mu - m


def sin_k_xi(k, xi):
    """``sin(k pi xi)`` with the argument reduced mod 2 first."""
    k = np.asarray(k, dtype=float)
    return np.sin(math.pi * np.mod(k * xi, 2.0))


def schro_mode(k, branch, xi):
    """Eigenpair with eigenvector data at damping point ``xi``."""
    e = schro_branch_eigenvalue(k, branch)
    kk = abs(k)
    m = (kk * math.pi) ** 2
    g = gap_factor(e.mu, kk, branch)
    alpha = SCALE_EXP[branch]
    sk = float(sin_k_xi(kk, xi))
    norm2 = 0.5 * (m + e.mu ** 2 + g * g)
    vec = np.array([1.0, 1j * e.mu, g]) / math.sqrt(2.0 * norm2)
    obs = math.sqrt(2.0) * sk * g
    if obs < 0:
        vec = -vec
    return SchroEigen(k, branch, e.mu, g * sk / kk ** alpha, alpha,
                      math.sqrt(norm2) / kk ** alpha, g, tuple(vec), e.residual)


# continued fractions and the set S

@dataclass(frozen=True)
class ContinuedFraction:
    """Expansion ``[0; a1, a2, ...]`` of ``xi`` to the depth the input supports.

    ``depth`` is the number of partial quotients after ``a0`` that are
    certain given the input precision; ``bounded_to_depth`` compares their
    maximum with ``bound``.
    """

    xi: float
    quotients: list
    bounded_to_depth: bool
    max_quotient: int
    bound: int
    requested_depth: int

    @property
    def depth(self):
        return len(self.quotients) - 1

    def convergents(self):
        p0, q0, p1, q1 = 1, 0, self.quotients[0], 1
        out = [Fraction(p1, q1)]
        for a in self.quotients[1:]:
            p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
            out.append(Fraction(p1, q1))
        return out


def _cf_of_rational(x, depth):
    out = []
    for _ in range(depth + 1):
        a = x.numerator // x.denominator
        out.append(int(a))
        x = x - a
        if x == 0:
            break
        x = 1 / x
    return out


def _exact_value(xi):
    """Exact rational value of the input and its uncertainty radius."""
    if isinstance(xi, Fraction):
        return xi, Fraction(0)
    if isinstance(xi, str):
        import sympy

        return Fraction(str(sympy.sympify(xi).evalf(160))), Fraction(1, 10 ** 150)
    x = float(xi)
    return Fraction(x), Fraction(abs(x)) * Fraction(1, 2 ** 51)


def continued_fraction(xi, depth=30, *, bound=50):
    """Continued-fraction expansion of ``xi`` in ``(0, 1)``.

    Parameters
    ----------
    xi : float, str or Fraction
        A float is trusted to a few ulps, so only roughly the first 20
        quotients of a number like ``sqrt(2) - 1`` are certain. A string
        such as ``"sqrt(2) - 1"`` is evaluated symbolically to 160 digits.
        A ``Fraction`` is exact, hence always rational.
    depth : int
        Number of quotients requested after ``a0`` (at most 60).
    bound : int
        Threshold for ``bounded_to_depth``.

    Raises
    ------
    RationalDetected
        ``xi`` equals, within its precision, a rational with a small
        denominator (the expansion terminates).
    """
    if depth > MAX_DEPTH:
        raise ValueError(f"depth is capped at {MAX_DEPTH}")
    x, rad = _exact_value(xi)
    if not 0 < x < 1:
        raise ValueError("xi must lie in (0, 1)")
    qmax = 10 ** 5 if rad == 0 else max(2, int(float(rad) ** (-1.0 / 3.0)))
    approx = x.limit_denominator(qmax)
    if abs(x - approx) <= rad:
        raise RationalDetected(f"xi is the rational {approx}")
    lo = _cf_of_rational(x - rad, depth)
    hi = _cf_of_rational(x + rad, depth)
    common = []
    for a, b in zip(lo, hi):
        if a != b:
            break
        common.append(a)
    # the last agreeing quotient can still be cut short by the interval edge
    mid = _cf_of_rational(x, depth)[:len(common)]
    mq = max(mid[1:], default=0)
    return ContinuedFraction(float(x), mid, mq <= bound, mq, bound, depth)


def in_S(xi, depth=30, bound=50):
    """``True`` when ``xi`` is irrational with quotients bounded to the certain depth."""
    try:
        return continued_fraction(xi, depth, bound=bound).bounded_to_depth
    except RationalDetected:
        return False


def sine_gap(xi, K):
    """``min_{1 <= k <= K} k |sin(k pi xi)|``."""
    k = np.arange(1, int(K) + 1)
    return float(np.min(k * np.abs(sin_k_xi(k, xi))))


# transfer function

def _tail_sum(K):
    """``sum_{k > K} 1 / k^2``."""
    return float(polygamma(1, K + 1))


def w3_series(xi, lam, K=1000):
    """Partial sum of ``w3(xi, lam) = -2 sum sin^2(k pi xi) / (k^2 pi^2 - i lam)``.

    Returns ``(value, tail)`` where ``tail`` bounds the neglected terms:
    ``2 sum_{k>K} 1/(k^2 pi^2)`` when ``Im lam >= 0``, twice that when
    ``K^2 pi^2 >= 2 |Im lam|``, and ``inf`` otherwise (K too small).
    """
    lam = complex(lam)
    if not lam.real > 0:
        raise ValueError("Re(lambda) must be positive")
    if K < 100:
        raise ValueError("K must be at least 100")
    k = np.arange(1, K + 1)
    s2 = sin_k_xi(k, xi) ** 2
    val = complex(-2.0 * np.sum(s2 / ((k * math.pi) ** 2 - 1j * lam)))
    base = 2.0 * _tail_sum(K) / math.pi ** 2
    if lam.imag >= 0:
        tail = base
    elif (K * math.pi) ** 2 >= 2 * abs(lam.imag):
        tail = 2 * base
    else:
        tail = math.inf
    return val, tail


def w3_comparison_sum(y):
    """``sum_k 1 / ((k^2 + y^2) pi^2)`` in closed form; at most 1/6."""
    y = abs(float(y))
    if y < 1e-8:
        return 1.0 / 6.0
    return (math.pi * y / math.tanh(math.pi * y) - 1.0) / (2.0 * y * y * math.pi ** 2)


@dataclass(frozen=True)
class TransferResult:
    """Truncated resolvent solve with a point source at ``xi``."""

    value: complex
    w2: np.ndarray
    w3: np.ndarray
    w4: np.ndarray
    u2: np.ndarray
    s: np.ndarray = field(repr=False)

    @property
    def w3_value(self):
        return complex(np.sum(self.w3 * self.s))

    @property
    def w4_value(self):
        return complex(np.sum(self.w4 * self.s))


def transfer_value(xi, lam, N=400):
    """``w2(xi, lam)`` from the modal solve with ``N`` sine modes.

    Per mode, ``(lam^2 + m) u_k + w_k = 0`` and
    ``(lam + i m) w_k - lam u_k = -i s_k``; ``w3`` drops the ``u`` coupling
    and ``w4 = w2 - w3``.

    Raises
    ------
    SingularSystem
        A modal pivot vanishes.
    """
    lam = complex(lam)
    k = np.arange(1, N + 1)
    m = (k * math.pi) ** 2
    s = math.sqrt(2.0) * sin_k_xi(k, xi)
    a = m + lam * lam
    piv = lam + 1j * m
    if np.any(np.abs(a) < 1e-300) or np.any(np.abs(piv) < 1e-300):
        raise SingularSystem("modal resolvent pivot vanished")
    den = piv + lam / a
    if np.any(np.abs(den) < 1e-14 * np.abs(piv)):
        raise SingularSystem("modal resolvent pivot vanished")
    w2 = -1j * s / den
    u2 = -w2 / a
    w3 = -1j * s / piv
    w4 = w2 - w3
    return TransferResult(complex(np.sum(w2 * s)), w2, w3, w4, u2, s)


def transfer_scan(xi, beta=1.0, y_max=100.0, n_points=2001, N=400):
    """Max of ``|w2(xi, beta + i y)|`` over ``y`` on a uniform grid.

    Returns ``(max_abs, y_at_max, values)``.
    """
    ys = np.linspace(-y_max, y_max, n_points)
    vals = np.array(parallel_map(lambda y: transfer_value(xi, beta + 1j * y, N).value, ys))
    i = int(np.argmax(np.abs(vals)))
    return float(np.abs(vals[i])), float(ys[i]), vals


# Hautus witness

def hautus_witness(n, xi):
    """``||(i mu - A_c) phi||^2 + |w(xi)|^2`` for the unit branch-1 eigenvector.

    The first term vanishes exactly, leaving
    ``2 sin^2(n pi xi) g^2 / (2 ||phi||^2)`` with ``g = mu^2 - n^2 pi^2``.
    """
    e = schro_mode(n, 1, xi)
    v = np.asarray(e.vector)
    return float(2.0 * float(sin_k_xi(abs(n), xi)) ** 2 * abs(v[2]) ** 2)


# generator and spectrum

def schro_generator(N, xi, *, damped=True):
    """Block truncation with ``N`` sine modes (dimension ``3N``).

    ``damped=False`` drops the rank-one damping but keeps ``obs``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    n = 3 * N
    skew = np.zeros((n, n), dtype=complex)
    metric = np.empty(n)
    s = np.zeros(n)
    for k in range(1, N + 1):
        i = 3 * (k - 1)
        m = (k * math.pi) ** 2
        skew[i, i + 1] = 1.0
        skew[i + 1, i] = -m
        skew[i + 1, i + 2] = -1.0
        skew[i + 2, i + 1] = 1.0
        skew[i + 2, i + 2] = -1j * m
        metric[i:i + 3] = (m, 1.0, 1.0)
        s[i + 2] = math.sqrt(2.0) * float(sin_k_xi(k, xi))
    obs = s[None, :]
    gen = assemble_generator(skew, damped_from_obs(obs, metric), obs, metric,
                             labels={"example": "schrodinger", "N": N, "xi": xi})
    return gen if damped else gen.without_damping()


@dataclass(frozen=True)
class SchroSpectrum:
    """All ``3N`` analytic eigenpairs of the truncation, sorted by ``mu``."""

    N: int
    xi: float
    modes: list
    k0: int = 1

    @property
    def mus(self):
        return np.array([e.mu for e in self.modes])

    def sigma(self, which):
        """Indices of sigma_0 (below ``k0``), sigma_1 or sigma_2."""
        if which == 0:
            return [i for i, e in enumerate(self.modes) if abs(e.k) < self.k0]
        return [i for i, e in enumerate(self.modes) if e.branch == which and abs(e.k) >= self.k0]

    def subspace(self, name):
        if name == "H1":
            return sorted(self.sigma(0) + self.sigma(1))
        if name == "H2":
            return sorted(self.sigma(0) + self.sigma(2))
        if name == "full":
            return list(range(len(self.modes)))
        raise ValueError(f"unknown subspace {name!r}")

    def basis(self):
        """Columns are unit eigenvectors in generator coordinates."""
        V = np.zeros((3 * self.N, len(self.modes)), dtype=complex)
        for j, e in enumerate(self.modes):
            i = 3 * (e.block - 1)
            V[i:i + 3, j] = e.vector
        return V

    def observations(self):
        """``w(xi)`` of each unit eigenvector."""
        out = np.empty(len(self.modes))
        for j, e in enumerate(self.modes):
            out[j] = math.sqrt(2.0) * float(sin_k_xi(e.block, self.xi)) * e.vector[2].real
        return out

    def cross_branch_gap(self):
        a = np.sort([e.mu for e in self.modes if e.branch == 1])
        b = np.sort([e.mu for e in self.modes if e.branch == 2])
        idx = np.searchsorted(a, b).clip(1, a.size - 1)
        return float(np.min(np.minimum(np.abs(a[idx] - b), np.abs(a[idx - 1] - b))))


def schro_spectrum(N, xi, k0=1):
    """Analytic eigenpairs for blocks ``1..N``; sigma_0 is every block below ``k0``."""
    def block(k):
        return [schro_mode(k, 1, xi), schro_mode(-k, 1, xi), schro_mode(k, 2, xi)]

    modes = [e for blk in parallel_map(block, range(1, N + 1)) for e in blk]
    modes.sort(key=lambda e: e.mu)
    return SchroSpectrum(N, float(xi), modes, k0)


def subspace_project(z, branch_set, spectrum):
    """Metric-orthogonal projection of ``z`` onto selected eigenvectors.

    ``branch_set`` is ``"H1"``, ``"H2"``, ``"full"`` or a list of mode
    indices. Returns ``(coefficients, projected_state)``.

    Raises
    ------
    BasisIncomplete
        The spectrum does not span the state space of ``z``.
    """
    z = np.asarray(z, dtype=complex).ravel()
    if len(spectrum.modes) != z.size or z.size != 3 * spectrum.N:
        raise BasisIncomplete(f"{len(spectrum.modes)} eigenvectors for a state of size {z.size}")
    idx = spectrum.subspace(branch_set) if isinstance(branch_set, str) else list(branch_set)
    V = spectrum.basis()[:, idx]
    metric = _schro_metric(spectrum.N)
    c = V.conj().T @ (metric * z)
    return c, V @ c


def _schro_metric(N):
    m = (np.arange(1, N + 1) * math.pi) ** 2
    return np.column_stack([m, np.ones(N), np.ones(N)]).ravel()


# observability and decay

DEFAULT_ORDER = {"H1": -3.0, "H2": -0.5, "full": 0.0}


def _check_xi(xi):
    ok = in_S(xi)
    if not ok:
        warnings.warn(f"xi={xi} is not badly approximable to the tested depth", XiNotInS,
                      stacklevel=3)
    return ok


def ingham_gap(mus):
    mus = np.sort(np.asarray(mus))
    return float(np.min(np.diff(mus))) if mus.size > 1 else math.inf


def schro_observability(N, xi=SQRT2M1, subspace="H1", T=4.0, *, weight_order=None, k0=1):
    """Gramian constant over a branch subspace against its spectral weight.

    Default weights: order -3 on H1, -1/2 on H2, 0 on the full space.
    ``extras`` records the in-subspace gap and whether ``xi`` passed the
    continued-fraction test.
    """
    xi_ok = _check_xi(xi)
    order = DEFAULT_ORDER[subspace] if weight_order is None else weight_order
    spec = schro_spectrum(N, xi, k0)
    idx = spec.subspace(subspace)
    mus = spec.mus[idx]
    B = spec.observations()[idx][None, :]
    weight = SpectralWeight(1j * mus, order)
    w = weight.weights()
    G = modal_gramian(mus, B, T)
    c = max(_weighted_min(G, w), 0.0)
    ev = np.linalg.eigvalsh(G)
    gap = ingham_gap(mus)
    extras = {"subspace": subspace, "N": N, "xi": float(xi), "xi_in_S": xi_ok, "gap": gap}
    if subspace != "full":
        extras["ingham_horizon"] = 2 * math.pi / gap
    return ObservabilityReport(float(T), c, [len(idx)], float(order), 1.0, "modal",
                               float(ev[0]), float(ev[-1]), extras)


def schro_initial_state(N, xi, subspace="H1", spectrum=None, gen=None):
    """Unit graph-norm data on a subspace.

    H1 and H2 get coefficient ``|k|^-3`` on every eigenvector of the
    subspace. ``"full"`` loads the branch-1 modes with ``|k| > N/2``, the
    weakly observed high-frequency part that no energy-norm estimate can
    control.
    """
    spectrum = spectrum or schro_spectrum(N, xi)
    gen = gen or schro_generator(N, xi)
    if subspace == "full":
        idx = [j for j, e in enumerate(spectrum.modes) if e.branch == 1 and 2 * e.block > N]
    else:
        idx = spectrum.subspace(subspace)
    V = spectrum.basis()
    c = np.zeros(len(spectrum.modes), dtype=complex)
    for j in idx:
        c[j] = abs(spectrum.modes[j].k) ** -3.0
    z = V @ c
    Az = gen.damped @ z
    g2 = float(np.sum(gen.metric * (np.abs(z) ** 2 + np.abs(Az) ** 2)))
    return z / math.sqrt(g2)


EXPONENT = {"H1": 1.0 / 3.0, "H2": 2.0}


def schro_decay_experiment(N=32, xi=SQRT2M1, subspace="H2", t_max=500.0, *, dt=0.05,
                           t_min=5.0, threshold=10.0, k0=1):
    """Damped run from subspace data with branch leakage bookkeeping.

    H1 data is tested against ``(1 + t)^(-1/3)`` and H2 data against
    ``(1 + t)^(-2)``, both scaled by the graph norm (which is 1). The full
    space gets an exponential fit. ``extras["leakage"]`` is the largest
    energy found outside the starting subspace, relative to ``E(0)``.
    """
    _check_xi(xi)
    spec = schro_spectrum(N, xi, k0)
    gen = schro_generator(N, xi)
    z0 = schro_initial_state(N, xi, subspace, spec, gen)
    traj = evolve(gen, z0, dt, t_max, "damped")
    if subspace == "full":
        rep = fit_decay(traj, "exponential", {"t_min": t_min})
        leak = 0.0
    else:
        rep = fit_decay(traj, "polynomial", {"exponent": EXPONENT[subspace], "scale": 1.0,
                                             "t_min": t_min, "threshold": threshold})
        other = "H2" if subspace == "H1" else "H1"
        comp = [j for j in spec.subspace(other) if j not in set(spec.subspace(subspace))]
        V = spec.basis()[:, comp]
        c = (traj.states * gen.metric) @ V.conj()
        leak = float(np.max(0.5 * np.sum(np.abs(c) ** 2, axis=1)) / traj.energies[0])
    rep.extras.update({"N": N, "xi": float(xi), "subspace": subspace, "dt": traj.dt,
                       "leakage": leak, "energy_initial": float(traj.energies[0])})
    return rep, traj
