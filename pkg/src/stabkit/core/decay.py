"""Fitting decay models to sampled energy curves."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..errors import InsufficientSamples, NonPositiveEnergy

MODELS = ("exponential", "polynomial", "general-G")

_DEFAULTS = {
    "t_min": 5.0,
    "min_samples": 50,
    "n_fit": 200,
    "threshold": 10.0,
    "min_rate": 1e-3,
    "tail_fraction": 0.25,
    "tail_tol": 0.1,
}


@dataclass(frozen=True)
class DecayReport:
    """Outcome of :func:`fit_decay`.

    ``rate_or_exponent`` is the fitted energy rate ``omega`` for the
    exponential model and the tested exponent otherwise. ``sup_ratio`` is
    ``sup E(t) * growth(t) / scale`` over the window, where ``growth`` is
    ``exp(omega t)``, ``(1 + t)^p`` or the inverse of the general-G bound.
    ``fitted_exponent`` is the least-squares slope of ``-log E`` against
    ``log(1 + t)`` and ``tail_slope`` the same slope for
    ``log(E * growth)`` over the last part of the window; a clearly positive
    tail slope means the bound is being outrun.
    """

    model: str
    rate_or_exponent: float
    sup_ratio: float
    window: tuple
    passed: bool
    threshold: float
    fitted_exponent: float = float("nan")
    tail_slope: float = float("nan")
    n_samples: int = 0
    scale: float = 1.0
    extras: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        d["window"] = list(self.window)
        return d


def _log_indices(t, lo_idx, n_fit):
    """Indices of ``t[lo_idx:]`` closest to a geometric grid in ``1 + t``."""
    tt = t[lo_idx:]
    grid = np.geomspace(1.0 + tt[0], 1.0 + tt[-1], n_fit) - 1.0
    idx = np.searchsorted(tt, grid).clip(0, tt.size - 1)
    left = (idx - 1).clip(0)
    pick = np.where(np.abs(tt[left] - grid) < np.abs(tt[idx] - grid), left, idx)
    return lo_idx + np.unique(pick)


def _slope(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    return float(np.linalg.lstsq(A, y, rcond=None)[0][0])


def general_g_growth(t, G, theta, G_inv=None, x_max=1.0):
    """``1 / [G^{-1}(1/(1+t))]^{theta/(1-theta)}`` on an array of times.

    ``G`` must be continuous and increasing on ``(0, x_max]`` with
    ``G(x_max) >= 1``; ``G_inv`` is found by root bracketing if omitted.
    """
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    grid = np.geomspace(1e-12, x_max, 400)
    g = np.array([G(x) for x in grid])
    if np.any(np.diff(g) <= 0) or g[0] < 0:
        raise ValueError("G must be positive and increasing on (0, x_max]")
    if G_inv is None:
        if G(x_max) < 1.0:
            raise ValueError("G(x_max) must be at least 1 to invert on (0, 1]")

        def G_inv(y):
            return brentq(lambda x: G(x) - y, 0.0, x_max, xtol=1e-15, rtol=1e-14)

    vals = np.array([G_inv(1.0 / (1.0 + s)) for s in np.asarray(t, dtype=float)])
    return vals ** (-theta / (1.0 - theta))


def fit_decay(trace, model="exponential", params=None):
    """Fit ``model`` to an energy trace.

    Parameters
    ----------
    trace : EnergyTrace or Trajectory
        Anything with ``times`` and ``energies``.
    model : {"exponential", "polynomial", "general-G"}
    params : dict, optional
        ``t_min`` (transient cutoff, default 5), ``t_max``, ``min_samples``
        (50), ``n_fit`` (log-spaced regression points, 200), ``threshold``
        (pass bound on ``sup_ratio``, default 10), ``scale`` (energy
        normalization, default ``E(0)``). Exponential: ``min_rate``.
        Polynomial: ``exponent``. General-G: ``G``, ``theta``, optional
        ``G_inv`` and ``x_max``. Both bounded models also use ``tail_tol``
        and ``tail_fraction`` for the growth test.

    Returns
    -------
    DecayReport

    Examples
    --------
    >>> import numpy as np
    >>> from stabkit.core import EnergyTrace, fit_decay
    >>> t = np.linspace(0, 10, 1001)
    >>> r = fit_decay(EnergyTrace(t, np.exp(-3 * t)), "exponential")
    >>> round(r.rate_or_exponent, 6)
    3.0
    """
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    p = dict(_DEFAULTS)
    p.update(params or {})
    t = np.asarray(trace.times, dtype=float)
    E = np.asarray(trace.energies, dtype=float)
    if np.any(E < 0) or not np.all(np.isfinite(E)):
        raise NonPositiveEnergy("energy samples must be finite and nonnegative")
    t_hi = p.get("t_max", t[-1])
    mask = (t >= p["t_min"]) & (t <= t_hi)
    n_win = int(mask.sum())
    if n_win < p["min_samples"]:
        raise InsufficientSamples(
            f"{n_win} samples in [{p['t_min']}, {t_hi}], need {p['min_samples']}")
    lo = int(np.argmax(mask))
    hi = lo + n_win
    tw, Ew = t[lo:hi], E[lo:hi]
    if np.any(Ew <= 0):
        raise NonPositiveEnergy("energy reached zero inside the fit window")
    scale = float(p.get("scale") or E[0])
    if not scale > 0:
        raise NonPositiveEnergy("energy scale must be positive")
    idx = _log_indices(t[:hi], lo, p["n_fit"])
    fitted = -_slope(np.log1p(t[idx]), np.log(E[idx]))
    window = (float(tw[0]), float(tw[-1]))

    if model == "exponential":
        omega = -_slope(tw, np.log(Ew))
        sup = float(np.max(Ew * np.exp(omega * (tw - tw[0]))) / Ew[0]) if omega > 0 else np.inf
        return DecayReport(model, omega, sup, window, bool(omega > p["min_rate"]), p["min_rate"],
                           fitted, float("nan"), n_win, scale)

    if model == "polynomial":
        rate = float(p["exponent"])
        growth = (1.0 + tw) ** rate
        extras = {}
    else:
        theta = float(p["theta"])
        rate = theta / (1.0 - theta)
        growth = general_g_growth(tw, p["G"], theta, p.get("G_inv"), p.get("x_max", 1.0))
        extras = {"theta": theta}
    ratio = Ew * growth / scale
    sup = float(np.max(ratio))
    n_tail = max(2, int(round(p["tail_fraction"] * tw.size)))
    tail = float(_slope(np.log1p(tw[-n_tail:]), np.log(ratio[-n_tail:])))
    passed = bool(np.isfinite(sup) and sup <= p["threshold"] and tail <= p["tail_tol"])
    return DecayReport(model, rate, sup, window, passed, float(p["threshold"]), fitted, tail,
                       n_win, scale, extras)
