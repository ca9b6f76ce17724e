"""Self-discharge of an idle, fully charged battery (no charger, kappa = 0).

The excited amplitude is ``exp(-a t/2) [cosh(xi t/2) + (a/xi) sinh(xi t/2)]``
with ``a = lam - i*delta`` and ``xi**2 = a**2 - 2 gamma lam``.  The
hyperbolic functions are expanded into decaying exponentials before
evaluation so that ``lam * t`` in the thousands does not overflow.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .observables import ergotropy_from_population

CONFLUENT_TOL = 1e-10
HORIZON = 100.0  # in units of 1/gamma
N_SAMPLES = 20001


@dataclass(frozen=True)
class SelfDischargeParams:
    gamma: float
    lam: float
    delta: float = 0.0

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError("gamma must be positive")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError("lambda must be positive")
        if not math.isfinite(self.delta):
            raise ValueError("delta must be finite")

    @classmethod
    def from_ratio(cls, R: float, gamma: float = 1.0, delta: float = 0.0) -> "SelfDischargeParams":
        if not R > 0:
            raise ValueError("R must be positive")
        return cls(gamma, gamma / R, delta)

    @property
    def a(self) -> complex:
        return complex(self.lam, -self.delta)

    @property
    def xi(self) -> complex:
        """Principal root of ``(lam - i delta)**2 - 2 gamma lam``."""
        return cmath.sqrt(self.a ** 2 - 2 * self.gamma * self.lam)

    @property
    def memory_ratio(self) -> float:
        return self.gamma / self.lam


def _scaled_hyperbolics(a: complex, xi: complex, t):
    """``exp(-a t/2) cosh(xi t/2)`` and ``exp(-a t/2) sinh(xi t/2) / xi``."""
    t = np.asarray(t, dtype=float)
    slow = np.exp((xi - a) * t / 2)
    fast = np.exp((-xi - a) * t / 2)
    cosh_part = 0.5 * (slow + fast)
    x = xi * t
    small = np.abs(x) < 1.0
    # sinh(y)/xi with y = xi t/2: expm1 avoids cancellation for small xi t
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        big_form = (slow - fast) / (2 * xi) if xi != 0 else np.zeros_like(slow)
        xs = np.where(small, x, 0.0)
        ratio = np.where(xs != 0, np.expm1(xs) / np.where(xs != 0, xs, 1.0), 1.0)
        small_form = fast * ratio * t / 2
    sinh_part = np.where(small, small_form, big_form)
    return cosh_part, sinh_part


def amplitude_sd(p: SelfDischargeParams, t):
    """``|nu_sd(t)|`` for general detuning; accepts scalars or arrays."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be non-negative")
    a, xi = p.a, p.xi
    if abs(xi) < CONFLUENT_TOL * p.lam:
        val = np.exp(-a * np.asarray(t, dtype=float) / 2) * (1 + a * np.asarray(t, dtype=float) / 2)
    else:
        c, s = _scaled_hyperbolics(a, xi, t)
        val = c + a * s
    out = np.abs(val)
    return float(out) if np.ndim(out) == 0 else out


def amplitude_sd_resonant(R: float, gamma: float, t):
    """``|nu_sd(t)|`` at zero detuning in terms of ``R = gamma / lam``.

    Three branches: overdamped ``R < 1/2`` (real root), the critical
    point, and oscillatory ``R > 1/2`` where cosh/sinh become cos/sin.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    c = gamma * t / (2 * R)
    d = 1 - 2 * R
    if abs(d) < CONFLUENT_TOL:
        val = np.exp(-c) * (1 + c)
    elif d > 0:
        s = math.sqrt(d)
        slow = np.exp(-c * (1 - s))
        fast = np.exp(-c * (1 + s))
        x = 2 * c * s
        with np.errstate(invalid="ignore", divide="ignore"):
            sinh_small = fast * c * np.where(x > 0, np.expm1(np.minimum(x, 1.0)) / np.where(x > 0, x, 1.0), 1.0)
        sinh_big = 0.5 * (slow - fast) / s
        val = 0.5 * (slow + fast) + np.where(x < 1.0, sinh_small, sinh_big)
    else:
        s = math.sqrt(-d)
        val = np.exp(-c) * (np.cos(c * s) + np.sin(c * s) / s)
    out = np.abs(val)
    return float(out) if np.ndim(out) == 0 else out


def ergotropy_sd(p: SelfDischargeParams, t, omega0: float = 1.0, initial_population: float = 1.0):
    """Battery ergotropy during self-discharge.

    ``initial_population`` hands over the excited population reached by a
    charging run (reservoir restarted in vacuum); 1 is the ideal start.
    """
    if not 0 <= initial_population <= 1:
        raise ValueError("initial_population must lie in [0, 1]")
    pop = initial_population * np.asarray(amplitude_sd(p, t)) ** 2
    out = ergotropy_from_population(pop, omega0)
    return float(out) if np.ndim(out) == 0 else out


def discharge_time(p: SelfDischargeParams, eps: float, horizon: float | None = None,
                   n_samples: int = N_SAMPLES) -> float:
    """Last time the ergotropy is still at least ``eps * W_max``.

    Non-Markovian revivals can push the ergotropy back above the
    threshold, so the last crossing before ``horizon`` (default
    ``100/gamma``) is returned, not the first.  Returns ``math.inf`` if
    the ergotropy is still above threshold at the horizon.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if horizon is None:
        horizon = HORIZON / p.gamma
    # W >= eps W_max  <=>  |nu|^2 >= (1 + eps)/2, a smooth condition
    level = 0.5 * (1 + eps)
    g = lambda t: amplitude_sd(p, t) ** 2 - level

    ts = np.linspace(0.0, horizon, n_samples)
    above = np.asarray(amplitude_sd(p, ts)) ** 2 >= level
    if above[-1]:
        return math.inf
    last = np.flatnonzero(above)[-1]
    lo, hi = ts[last], ts[last + 1]
    if g(lo) == 0:
        return float(lo)
    return float(brentq(g, lo, hi, xtol=1e-12, rtol=1e-9))
