"""Exact amplitudes from the rational Laplace images of mu and nu.

With the Lorentzian kernel ``k(s) = g/(s + a)``, ``g = gamma*lam/2``,
``a = lam - i*delta``, the sum ``z = mu + nu`` and difference
``w = mu - nu`` decouple::

    z(s) = z0 (s + a) / Q+(s),    w(s) = w0 (s + a) / Q-(s),
    Q(s) = s(s + a) + g +/- i*kappa*(s + a).

The quartic denominator of mu(s) and nu(s) is ``Q+ Q-``, so every pole
comes from a quadratic and no general quartic solver is needed.  The
residues of z and w only involve the two roots of their own quadratic,
which keeps them well conditioned when roots of Q+ and Q- approach each
other (small kappa).
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .params import InitialAmplitudes, SystemParams, validate_params

DEGENERACY_TOL = 1e-8
CANCEL_TOL = 1e-13
GROWTH_TOL = 1e-9


@dataclass(frozen=True)
class PoleResidueForm:
    """Partial-fraction form of mu(s) and nu(s).

    ``residues_mu[j][k]`` multiplies ``t**k / k! * exp(poles[j] * t)``;
    ``len(residues_mu[j]) == multiplicities[j]``.
    """

    poles: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    residues_mu: tuple[tuple[complex, ...], ...]
    residues_nu: tuple[tuple[complex, ...], ...]


@dataclass(frozen=True)
class AmplitudePair:
    mu: complex
    nu: complex
    time: float


def quadratic_roots(b: complex, c: complex) -> tuple[complex, complex]:
    """Roots of ``s**2 + b*s + c`` without cancellation.

    The larger-magnitude root is formed first; the second follows from
    the product of roots.
    """
    sq = cmath.sqrt(b * b - 4 * c)
    if (b.conjugate() * sq).real < 0:
        sq = -sq
    q = -0.5 * (b + sq)
    if q == 0:
        return 0j, 0j
    return q, c / q


def _quadratic_terms(b: complex, c: complex, a: complex, scale: float, roots=None):
    """Poles and coefficients of ``(s + a) / (s**2 + b s + c)``.

    Returns a list of ``(pole, coeffs)``; a root shared with the
    numerator is cancelled.  ``roots`` may supply exactly known roots.
    """
    p1, p2 = roots if roots is not None else quadratic_roots(b, c)
    sep = abs(p1 - p2)
    size = max(abs(p1), abs(p2), scale)
    near_double = sep < DEGENERACY_TOL * size
    cancels = [abs(p + a) <= CANCEL_TOL * max(abs(p), abs(a)) for p in (p1, p2)]

    if near_double:
        if any(cancels):
            raise ArithmeticError(
                "numerator root coincides with a near-double pole; residues are "
                f"ill-conditioned (pole separation / scale = {sep / size:.3e})"
            )
        pm = 0.5 * (p1 + p2)
        return [(pm, (1.0 + 0j, pm + a))]

    terms = []
    for p, other, cancelled in ((p1, p2, cancels[0]), (p2, p1, cancels[1])):
        if cancelled:
            continue
        terms.append((p, ((p + a) / (p - other),)))
    return terms


def build_transfer(p: SystemParams, init: InitialAmplitudes) -> PoleResidueForm:
    """Poles and residues of mu(s) and nu(s) for the given parameters."""
    validate_params(p)
    a = p.a
    g = 0.5 * p.gamma * p.lam
    ik = 1j * p.kappa
    scale = p.lam

    z0 = init.mu0 + init.nu0
    w0 = init.mu0 - init.nu0
    # without reservoirs Q(s) = (s + a)(s +/- i kappa) factors exactly
    exact = g == 0
    plus = _quadratic_terms(a + ik, g + ik * a, a, scale, (-a, -ik) if exact else None)
    minus = _quadratic_terms(a - ik, g - ik * a, a, scale, (-a, ik) if exact else None)

    poles: list[complex] = []
    res_mu: list[list[complex]] = []
    res_nu: list[list[complex]] = []

    def add(pole, coeffs, cmu, cnu):
        # Q+ and Q- coincide exactly only when kappa == 0
        for j, q in enumerate(poles):
            if q == pole and len(res_mu[j]) == len(coeffs):
                res_mu[j] = [x + cmu * c for x, c in zip(res_mu[j], coeffs)]
                res_nu[j] = [x + cnu * c for x, c in zip(res_nu[j], coeffs)]
                return
        poles.append(pole)
        res_mu.append([cmu * c for c in coeffs])
        res_nu.append([cnu * c for c in coeffs])

    if p.kappa == 0:
        minus = plus
    for pole, coeffs in plus:
        add(pole, coeffs, 0.5 * z0, 0.5 * z0)
    for pole, coeffs in minus:
        add(pole, coeffs, 0.5 * w0, -0.5 * w0)

    for q in poles:
        if q.real > GROWTH_TOL:
            raise ArithmeticError(f"growing mode found (pole {q!r}); parameters are unphysical")

    return PoleResidueForm(
        poles=tuple(poles),
        multiplicities=tuple(len(r) for r in res_mu),
        residues_mu=tuple(tuple(r) for r in res_mu),
        residues_nu=tuple(tuple(r) for r in res_nu),
    )


def _series(poles, residues, t):
    out = np.zeros(np.shape(t), dtype=complex)
    for q, coeffs in zip(poles, residues):
        e = np.exp(q * t)
        poly = coeffs[0]
        if len(coeffs) > 1:
            poly = poly + coeffs[1] * t
        out = out + poly * e
    return out


def evaluate(f: PoleResidueForm, t) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized mu(t), nu(t) on an array of times."""
    t = np.asarray(t, dtype=float)
    return _series(f.poles, f.residues_mu, t), _series(f.poles, f.residues_nu, t)


def evaluate_amplitudes(f: PoleResidueForm, t: float) -> AmplitudePair:
    if t < 0:
        raise ValueError("t must be non-negative")
    mu, nu = evaluate(f, float(t))
    return AmplitudePair(complex(mu), complex(nu), float(t))


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-D sequence")
    if grid[0] < 0:
        raise ValueError("grid must be non-negative")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    return grid


def amplitude_arrays(p: SystemParams, init: InitialAmplitudes, grid) -> tuple[np.ndarray, np.ndarray]:
    """Same as :func:`amplitude_trajectory` but returns two complex arrays."""
    grid = _check_grid(grid)
    return evaluate(build_transfer(p, init), grid)


def amplitude_trajectory(p: SystemParams, init: InitialAmplitudes, grid) -> list[AmplitudePair]:
    grid = _check_grid(grid)
    mu, nu = evaluate(build_transfer(p, init), grid)
    return [AmplitudePair(complex(m), complex(n), float(t)) for m, n, t in zip(mu, nu, grid)]


def transfer_polynomials(p: SystemParams, init: InitialAmplitudes):
    """Numerators and common denominator of mu(s), nu(s) after clearing ``(s + a)**2``.

    Returns ``(num_mu, num_nu, den)`` as :class:`numpy.polynomial.Polynomial`.
    Used to cross-check the factored residues against ``N(p)/P'(p)``.
    """
    P = np.polynomial.Polynomial
    a = p.a
    g = 0.5 * p.gamma * p.lam
    ik = 1j * p.kappa
    sa = P([a, 1])
    base = P([0, 1]) * sa + g
    den = (base + ik * sa) * (base - ik * sa)
    num_mu = base * sa * init.mu0 - ik * sa * sa * init.nu0
    num_nu = base * sa * init.nu0 - ik * sa * sa * init.mu0
    return num_mu, num_nu, den
