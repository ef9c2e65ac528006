"""Independent reference routes used by the tests.

Everything here deliberately avoids the package's own quadrature/shooting
machinery: transcendental root equations for the quartic-profile string,
inverse iteration for generalized eigenproblems, and mpmath zeta sums.
A test that compares pipeline output against these is a genuine cross-check,
not a reprint of the implementation.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy.optimize import brentq


def borg_nn_energies(alpha: float, count: int) -> np.ndarray:
    """Neumann eigenvalues of the quartic-profile string, E = k^2 with
    tan k = alpha^2 k / (alpha^2 + (1+alpha) k^2), one root per (n pi, n pi + pi/2)."""

    def f(k: float) -> float:
        return math.tan(k) - alpha * alpha * k / (alpha * alpha + (1.0 + alpha) * k * k)

    roots = []
    for n in range(1, count + 1):
        lo = n * math.pi + 1e-12
        hi = n * math.pi + 0.5 * math.pi - 1e-9
        roots.append(brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16))
    return np.asarray(roots) ** 2


def borg_pp_energies(alpha: float, count: int) -> np.ndarray:
    """Periodic eigenvalues with multiplicity: two roots per window
    (2 pi n - pi, 2 pi n + pi) of
    alpha^2 sin k + k (2(1+alpha) - (1 + (1+alpha)^2) cos k) = 0."""
    c = 1.0 + (1.0 + alpha) ** 2

    def g(k: float) -> float:
        return alpha * alpha * math.sin(k) + k * (2.0 * (1.0 + alpha) - c * math.cos(k))

    roots: list[float] = []
    n = 1
    while len(roots) < count:
        center = 2.0 * math.pi * n
        roots.append(brentq(g, center - math.pi + 1e-12, center - 1e-12,
                            xtol=1e-14, rtol=8.9e-16))
        roots.append(brentq(g, center + 1e-12, center + math.pi - 1e-12,
                            xtol=1e-14, rtol=8.9e-16))
        n += 1
    return np.asarray(roots[:count]) ** 2


def expansion_from_samples(gammas, values) -> tuple[float, float, float]:
    """Recover (e1, e2, e3) from E0(gamma) samples by solving the cubic
    Vandermonde system E0 = e1 g + e2 g^2 + e3 g^3 at three shifts."""
    g = np.asarray(gammas, dtype=float)
    v = np.vander(g, 4, increasing=True)[:, 1:]
    return tuple(np.linalg.solve(v, np.asarray(values, dtype=float)))


def inverse_iteration_eig(stiffness: np.ndarray, mass: np.ndarray,
                          approx: float, iterations: int = 30) -> float:
    """Refine one generalized eigenvalue of diag(stiffness) c = lambda M c by
    shifted inverse iteration with Rayleigh-quotient updates."""
    a = np.diag(np.asarray(stiffness, dtype=float))
    m = np.asarray(mass, dtype=float)
    rng = np.random.default_rng(7)
    v = rng.standard_normal(len(a))
    lam = float(approx)
    shift = lam + 1e-6 * (abs(lam) + 1.0)
    for _ in range(iterations):
        try:
            v = np.linalg.solve(a - shift * m, m @ v)
        except np.linalg.LinAlgError:
            shift *= 1.0 + 1e-9
            continue
        v /= np.linalg.norm(v)
        lam = float(v @ a @ v) / float(v @ m @ v)
        shift = lam
    return lam


def zeta_tail(power: int, from_n: int) -> float:
    """Sum_{n > from_n} n^{-power} at mpmath precision, rounded to float."""
    with mpmath.workdps(40):
        total = mpmath.zeta(power) - mpmath.fsum(mpmath.mpf(n) ** -power
                                                 for n in range(1, from_n + 1))
        return float(total)
