"""Energy, ergotropy, work/energy ratio and power.

Battery observables follow from the diagonal reduced state
``rho_B = |nu|^2 |e><e| + (1 - |nu|^2) |g><g|``; :func:`general_ergotropy`
handles arbitrary finite-dimensional states through the passive state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

NORM_SLACK = 1e-9
RATIO_FLOOR = 1e-12


@dataclass(frozen=True)
class ObservableRecord:
    time: float
    energy_B: float
    energy_A: float
    ergotropy_B: float
    ratio: Optional[float] = None
    power: Optional[float] = None


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystems sorted for passivization.

    ``energies`` ascend (columns of ``energy_vectors``); ``populations``
    descend (columns of ``population_vectors``).
    """

    energies: np.ndarray
    energy_vectors: np.ndarray
    populations: np.ndarray
    population_vectors: np.ndarray


@dataclass
class Trajectory:
    """Amplitudes on a time grid plus the derived battery observables."""

    times: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    omega0: float = 1.0
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def energy_B(self) -> np.ndarray:
        return self.omega0 * np.abs(self.nu) ** 2

    @property
    def energy_A(self) -> np.ndarray:
        return self.omega0 * np.abs(self.mu) ** 2

    @property
    def ergotropy_B(self) -> np.ndarray:
        return ergotropy_from_population(np.abs(self.nu) ** 2, self.omega0)

    @property
    def ratio(self) -> np.ndarray:
        """Ergotropy over energy change since t=0; NaN where the change vanishes."""
        dE = self.energy_B - self.energy_B[0]
        out = np.full(dE.shape, np.nan)
        ok = np.abs(dE) > RATIO_FLOOR
        out[ok] = self.ergotropy_B[ok] / dE[ok]
        return out

    @property
    def power(self) -> np.ndarray:
        if "power" not in self._cache:
            self._cache["power"] = instantaneous_power(self)
        return self._cache["power"]

    def records(self) -> list[ObservableRecord]:
        ratio = self.ratio
        power = self.power if len(self.times) >= 3 else np.full(len(self.times), np.nan)
        return [
            ObservableRecord(
                time=float(t), energy_B=float(eb), energy_A=float(ea), ergotropy_B=float(w),
                ratio=None if math.isnan(r) else float(r),
                power=None if math.isnan(pw) else float(pw),
            )
            for t, eb, ea, w, r, pw in zip(self.times, self.energy_B, self.energy_A,
                                           self.ergotropy_B, ratio, power)
        ]


def _check_amplitude(x: complex) -> float:
    pop = abs(x) ** 2
    if pop > 1 + NORM_SLACK:
        raise ValueError(f"|amplitude| exceeds 1 (|x|^2 = {pop!r})")
    return pop


def heaviside(x: float) -> float:
    if x > 0:
        return 1.0
    if x < 0:
        return 0.0
    return 0.5


def battery_energy(nu: complex, omega0: float = 1.0) -> float:
    """Battery energy above its ground state; pass ``mu`` for the charger."""
    return omega0 * _check_amplitude(nu)


charger_energy = battery_energy


def battery_ergotropy(nu: complex, omega0: float = 1.0) -> float:
    pop = _check_amplitude(nu)
    return heaviside(pop - 0.5) * omega0 * (2 * pop - 1)


def ergotropy_from_population(pop, omega0: float = 1.0):
    """Vectorized two-level ergotropy ``omega0 * max(0, 2 pop - 1)``."""
    return omega0 * np.maximum(0.0, 2 * np.asarray(pop) - 1)


def _validate_pair(rho, H, tol=1e-10):
    rho = np.asarray(rho, dtype=complex)
    H = np.asarray(H, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("rho must be a square matrix")
    if H.shape != rho.shape:
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs H {H.shape}")
    if not np.allclose(H, H.conj().T, atol=tol, rtol=0):
        raise ValueError("H must be Hermitian")
    if not np.allclose(rho, rho.conj().T, atol=tol, rtol=0):
        raise ValueError("rho must be Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"rho must have unit trace, got {np.trace(rho).real!r}")
    return rho, H


def spectral_decomposition(rho, H) -> SpectralDecomposition:
    rho, H = _validate_pair(rho, H)
    e, U = np.linalg.eigh(H)
    order = np.argsort(e, kind="stable")
    r, V = np.linalg.eigh(rho)
    if r.min() < -1e-10:
        raise ValueError(f"rho is not positive semidefinite (min eigenvalue {r.min():.3e})")
    rorder = np.argsort(-r, kind="stable")
    r = np.clip(r[rorder], 0.0, None)
    return SpectralDecomposition(e[order], U[:, order], r, V[:, rorder])


def passive_state(rho, H) -> np.ndarray:
    """Passive state: populations of ``rho`` in decreasing order placed on levels of increasing energy."""
    d = spectral_decomposition(rho, H)
    U = d.energy_vectors
    return (U * d.populations) @ U.conj().T


def general_ergotropy(rho, H) -> float:
    """Maximum work extractable from ``rho`` by a unitary, w.r.t. Hamiltonian ``H``."""
    rho, H = _validate_pair(rho, H)
    d = spectral_decomposition(rho, H)
    energy = float(np.real(np.trace(rho @ H)))
    passive_energy = float(np.dot(d.populations, d.energies))
    return max(0.0, energy - passive_energy)


def work_energy_ratio(W: float, deltaE: float) -> Optional[float]:
    """``W / deltaE``; ``None`` when the energy change is (numerically) zero."""
    if W < 0:
        raise ValueError("W must be non-negative")
    if abs(deltaE) <= RATIO_FLOOR:
        return None
    return W / deltaE


def _segment_derivative(w: np.ndarray, h: float) -> np.ndarray:
    n = len(w)
    if n == 1:
        return np.array([np.nan])
    if n == 2:
        d = (w[1] - w[0]) / h
        return np.array([d, d])
    out = np.empty(n)
    out[1:-1] = (w[2:] - w[:-2]) / (2 * h)
    out[0] = (-3 * w[0] + 4 * w[1] - w[2]) / (2 * h)
    out[-1] = (3 * w[-1] - 4 * w[-2] + w[-3]) / (2 * h)
    return out


def instantaneous_power(traj: Trajectory, rtol: float = 1e-6) -> np.ndarray:
    """dW/dt by second-order finite differences.

    The ergotropy has a kink wherever the battery population crosses 1/2;
    the grid is split there and each smooth piece is differentiated on
    its own with one-sided stencils at its ends.
    """
    t = np.asarray(traj.times, dtype=float)
    if len(t) < 3:
        raise ValueError("need at least 3 points to differentiate")
    h = t[1] - t[0]
    if not np.allclose(np.diff(t), h, rtol=rtol, atol=0):
        raise ValueError("time grid must be uniform")

    w = traj.ergotropy_B
    side = np.abs(traj.nu) ** 2 > 0.5
    cuts = np.flatnonzero(side[1:] != side[:-1]) + 1
    bounds = [0, *cuts.tolist(), len(t)]

    out = np.empty(len(t))
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        out[lo:hi] = _segment_derivative(w[lo:hi], h)
    # an isolated point between two kinks: borrow its neighbours' one-sided slopes
    lone = np.flatnonzero(np.isnan(out))
    for i in lone:
        left = (w[i] - w[i - 1]) / h if i > 0 else np.nan
        right = (w[i + 1] - w[i]) / h if i + 1 < len(w) else np.nan
        out[i] = np.nanmean([left, right])
    return out


def average_power(W_t: float, W_t0: float, t: float, t0: float) -> float:
    if not t > t0:
        raise ValueError("need t > t0")
    return (W_t - W_t0) / (t - t0)


def charging_time(kappa: float) -> float:
    """Ideal lossless charging time ``pi / (2 kappa)``."""
    if kappa <= 0:
        return math.inf
    return math.pi / (2 * kappa)


def closed_system_probability(kappa: float, t: float) -> float:
    """Excitation transfer probability ``sin^2(kappa t)`` without reservoirs."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return math.sin(kappa * t) ** 2
