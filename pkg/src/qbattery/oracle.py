"""Fixed-step RK4 reference integrator for the memory equations.

For an exponential kernel the convolutions
``xA(t) = int_0^t k(t - t') mu(t') dt'`` (and ``xB`` for nu) obey local
ODEs, so the integro-differential system becomes four linear ODEs::

    mu' = -i kappa nu - xA          xA' = (-lam + i delta) xA + gamma lam / 2 mu
    nu' = -i kappa mu - xB          xB' = (-lam + i delta) xB + gamma lam / 2 nu

This path never touches the Laplace machinery and serves as its oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import InitialAmplitudes, SystemParams, validate_params

DEFAULT_STEP = 1e-4
STABILITY_BOUND = 0.1


@dataclass(frozen=True)
class AugmentedState:
    mu: complex
    nu: complex
    xA: complex = 0j
    xB: complex = 0j

    def as_array(self) -> np.ndarray:
        return np.array([self.mu, self.nu, self.xA, self.xB], dtype=complex)

    @classmethod
    def from_array(cls, y) -> "AugmentedState":
        return cls(*(complex(v) for v in y))


@dataclass
class OracleResult:
    """Uniform-grid trajectory; ``states[:, 0]`` is mu, ``[:, 1]`` nu, then xA, xB."""

    times: np.ndarray
    states: np.ndarray
    step: float
    max_norm_drift: float

    @property
    def mu(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def nu(self) -> np.ndarray:
        return self.states[:, 1]

    def __getitem__(self, i) -> AugmentedState:
        return AugmentedState.from_array(self.states[i])

    def __len__(self):
        return len(self.times)


def derivative(s: AugmentedState, p: SystemParams) -> AugmentedState:
    y = _rhs(s.as_array(), p)
    return AugmentedState.from_array(y)


def _rhs(y: np.ndarray, p: SystemParams) -> np.ndarray:
    mu, nu, xa, xb = y[0], y[1], y[2], y[3]
    decay = complex(-p.lam, p.delta)
    g = 0.5 * p.gamma * p.lam
    ik = 1j * p.kappa
    return np.array([-ik * nu - xa, -ik * mu - xb, decay * xa + g * mu, decay * xb + g * nu])


def rk4_step(f, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def max_rate(p: SystemParams) -> float:
    return max(p.kappa, p.gamma, p.lam, abs(p.delta))


def check_step(p: SystemParams, step: float) -> None:
    if not step > 0:
        raise ValueError("step must be positive")
    rate = max_rate(p)
    # inclusive bound, with a rounding allowance so that e.g. 1e-4 * 1000 passes
    if step * rate > STABILITY_BOUND * (1 + 1e-12):
        raise ValueError(
            f"step {step:g} too large: need step <= {STABILITY_BOUND / rate:.6g} "
            f"(step * max(kappa, gamma, lambda, |delta|) <= {STABILITY_BOUND})"
        )


def integrate(p: SystemParams, init: InitialAmplitudes, t_end: float,
              step: float = DEFAULT_STEP) -> OracleResult:
    """Integrate from 0 to ``t_end`` with classical RK4 at fixed ``step``.

    The last step is shortened if ``t_end`` is not a multiple of ``step``.
    The system is linear and autonomous, so one RK4 step acts as a fixed
    4x4 matrix; it is built once by stepping the unit vectors and then
    applied repeatedly, which is the same arithmetic as stepping the state.
    """
    validate_params(p)
    check_step(p, step)
    if t_end < 0:
        raise ValueError("t_end must be non-negative")

    n_full = int(np.floor(t_end / step + 1e-9))
    times = step * np.arange(n_full + 1)
    if t_end - times[-1] > 1e-12 * max(1.0, t_end):
        times = np.append(times, t_end)

    f = lambda y: _rhs(y, p)
    eye = np.eye(4, dtype=complex)
    step_map = np.column_stack([rk4_step(f, eye[:, j], step) for j in range(4)])

    y = AugmentedState(init.mu0, init.nu0).as_array()
    states = np.empty((len(times), 4), dtype=complex)
    states[0] = y
    for i in range(1, n_full + 1):
        y = step_map @ y
        states[i] = y
    if len(times) > n_full + 1:
        h_last = times[-1] - times[-2]
        last_map = np.column_stack([rk4_step(f, eye[:, j], h_last) for j in range(4)])
        states[-1] = last_map @ y

    norm = np.abs(states[:, 0]) ** 2 + np.abs(states[:, 1]) ** 2
    drift = float(np.max(norm - norm[0]))
    return OracleResult(times=times, states=states, step=step, max_norm_drift=drift)


def integrate_on_grid(p: SystemParams, init: InitialAmplitudes, grid,
                      step: float = DEFAULT_STEP) -> tuple[np.ndarray, np.ndarray]:
    """Oracle mu, nu sampled exactly on a uniform output ``grid`` starting at 0.

    The step is shrunk so that every grid point is a step boundary.
    """
    grid = np.asarray(grid, dtype=float)
    if grid[0] != 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must start at 0 and be strictly increasing")
    if len(grid) == 1:
        return np.array([init.mu0]), np.array([init.nu0])
    dt = grid[1] - grid[0]
    if not np.allclose(np.diff(grid), dt, rtol=1e-9, atol=0):
        raise ValueError("grid must be uniform")
    sub = int(np.ceil(dt / step - 1e-9))
    res = integrate(p, init, grid[-1], dt / sub)
    idx = np.rint(grid / res.step).astype(int)
    idx = np.minimum(idx, len(res.times) - 1)
    return res.mu[idx], res.nu[idx]
