"""Physical parameters, regime labels and the Lorentzian reservoir.

Units: hbar = 1, energies in multiples of ``omega0``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

# decade thresholds for the advisory regime labels
LOW_RATIO = 0.1
HIGH_RATIO = 10.0


@dataclass(frozen=True)
class SystemParams:
    """Constants of one charger/battery simulation.

    Attributes
    ----------
    omega0 : float
        Qubit transition frequency (shared by charger and battery).
    kappa : float
        Charger-battery exchange coupling.
    gamma : float
        Effective qubit-reservoir coupling.
    lam : float
        Width of the Lorentzian spectral density.
    delta : float
        Detuning between ``omega0`` and the reservoir central frequency.
    """

    omega0: float = 1.0
    kappa: float = 1.0
    gamma: float = 0.0
    lam: float = 1.0
    delta: float = 0.0

    @property
    def memory_ratio(self) -> float:
        return self.gamma / self.lam

    @property
    def a(self) -> complex:
        """Complex decay constant ``lam - i*delta`` of the kernel."""
        return complex(self.lam, -self.delta)

    @classmethod
    def from_ratio(cls, *, gamma: float, R: float, omega0: float = 1.0,
                   kappa: float = 1.0, delta: float = 0.0) -> "SystemParams":
        """Build parameters from ``gamma`` and the memory ratio ``R = gamma/lam``."""
        if not (math.isfinite(R) and R > 0):
            raise ValueError("R must be positive")
        return validate_params(cls(omega0=omega0, kappa=kappa, gamma=gamma,
                                   lam=gamma / R, delta=delta))


@dataclass(frozen=True)
class InitialAmplitudes:
    """Initial amplitudes of |e,g> (charger excited) and |g,e> (battery excited)."""

    mu0: complex = 1.0
    nu0: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mu0", complex(self.mu0))
        object.__setattr__(self, "nu0", complex(self.nu0))
        norm = abs(self.mu0) ** 2 + abs(self.nu0) ** 2
        if not math.isfinite(norm) or abs(norm - 1.0) > 1e-12:
            raise ValueError(f"initial amplitudes must be normalized, got |mu0|^2+|nu0|^2={norm!r}")


@dataclass(frozen=True)
class RegimeReport:
    memory_ratio: float
    damping_ratio: float
    markovianity_label: str
    damping_label: str


def validate_params(p: SystemParams) -> SystemParams:
    """Return ``p`` unchanged, or raise ``ValueError`` naming the bad field."""
    for name in ("omega0", "kappa", "gamma", "lam", "delta"):
        if not math.isfinite(getattr(p, name)):
            raise ValueError(f"{_label(name)} must be finite")
    if p.omega0 <= 0:
        raise ValueError("omega0 must be positive")
    if p.lam <= 0:
        raise ValueError("lambda must be positive")
    if p.gamma < 0:
        raise ValueError("gamma must be non-negative")
    if p.kappa < 0:
        raise ValueError("kappa must be non-negative")
    if not math.isfinite(p.memory_ratio):
        raise ValueError("lambda too small: gamma/lambda is not finite")
    return p


def _label(name: str) -> str:
    return "lambda" if name == "lam" else name


def _three_way(ratio: float, low: str, mid: str, high: str) -> str:
    if ratio < LOW_RATIO:
        return low
    if ratio >= HIGH_RATIO:
        return high
    return mid


def classify_regime(p: SystemParams) -> RegimeReport:
    """Label the memory (gamma/lambda) and damping (gamma/kappa) regimes.

    The labels are advisory; nothing in the solvers depends on them.
    """
    R = p.gamma / p.lam
    if p.kappa == 0:
        damping = math.inf
        damping_label = "uncoupled"
    else:
        damping = p.gamma / p.kappa
        damping_label = _three_way(damping, "underdamped", "intermediate", "overdamped")
    return RegimeReport(
        memory_ratio=R,
        damping_ratio=damping,
        markovianity_label=_three_way(R, "markovian-like", "intermediate", "non-markovian-like"),
        damping_label=damping_label,
    )


def memory_kernel(p: SystemParams, tau: float) -> complex:
    """Reservoir correlation function ``gamma*lam/2 * exp((-lam + i*delta) tau)``."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    return 0.5 * p.gamma * p.lam * cmath.exp(complex(-p.lam, p.delta) * tau)


def kernel_laplace(p: SystemParams, s: complex) -> complex:
    """Laplace image of :func:`memory_kernel`, ``gamma*lam / (2 (s + lam - i*delta))``."""
    den = s + p.a
    if den == 0:
        raise ValueError(f"s = {s!r} is the kernel pole -lambda + i*delta")
    return 0.5 * p.gamma * p.lam / den


def spectral_density(p: SystemParams, omega: float) -> float:
    """Lorentzian spectral density centred at ``omega0 - delta``."""
    x = p.omega0 - omega - p.delta
    return p.gamma * p.lam ** 2 / (2 * math.pi * (x * x + p.lam ** 2))
