"""Asymptotic tail fits turning finite spectra into sum-rule estimates.

1D spectra follow E_n ~ c1 n^2 + c2 + sum_p c_{p+2}/n^{2p}; the model is
fitted on a top window of the computed levels and the remainder series
sum_{n>N} model(n)^{-p} is summed by fourth-order Euler-Maclaurin with an
explicit remainder bound. Periodic spectra are fitted per level pair
(multiplicity 2): the pair mean follows the same even model while the
individual branches pick up an odd n^1 term that would not.

2D (Bessel) spectra use the counting function instead: N(E) fitted as
w1 E + w2 sqrt(E) + w3 on the staircase, tail = integral of dN/E^p above
the cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .quadrature import integrate_1d
from .spectra import Spectrum

__all__ = [
    "TailFit",
    "fit_tail_1d",
    "tail_sum",
    "weyl_tail_2d",
    "numeric_sum_rule",
    "NumericSumRule",
]


@dataclass(frozen=True)
class TailFit:
    """Coefficients [c1, c2, c3, ...] of c1 n^2 + c2 + c3/n^2 + c4/n^4 + ...

    ``window`` is the (1-based, inclusive) index range used for the fit and
    ``per_level`` records the periodic convention: indices count degenerate
    pairs once and the tail weighs each model level twice.
    """

    coefficients: np.ndarray
    inverse_terms: int
    window: tuple[int, int]
    rms_residual: float
    per_level: bool = False

    def model(self, n):
        n = np.asarray(n, dtype=float)
        val = self.coefficients[0] * n**2 + self.coefficients[1]
        for j in range(1, self.inverse_terms + 1):
            val = val + self.coefficients[1 + j] * n ** (-2 * j)
        return val


def _fit_levels(s: Spectrum):
    """(level values, per_level flag) in the fitting index convention."""
    if s.method == "monodromy":
        if s.count % 2:
            raise ParameterError("periodic spectra need an even level count")
        e = s.eigenvalues
        return 0.5 * (e[0::2] + e[1::2]), True
    return s.eigenvalues, False


def fit_tail_1d(s: Spectrum, P: int = 2, window: tuple[int, int] | None = None) -> TailFit:
    """Least-squares fit of the asymptotic model on a top index window."""
    levels, per_level = _fit_levels(s)
    N = len(levels)
    if window is None:
        window = (max(1, int(0.75 * N) + 1), N)
    lo, hi = window
    if not (1 <= lo < hi <= N):
        raise ParameterError(f"fit window {window} outside spectrum 1..{N}")
    if hi - lo + 1 < P + 4:
        raise ParameterError("fit window smaller than coefficient count + 2")
    n = np.arange(lo, hi + 1, dtype=float)
    y = levels[lo - 1 : hi]
    base = [n**2, np.ones_like(n)]
    extras = [n ** (-2 * j) for j in range(1, P + 1)]
    # forward selection: the inverse-power columns are nearly collinear with
    # {n^2, 1} on a narrow window, so an unconditional fit trades them off
    # against each other at the noise floor and the coefficients explode;
    # keep a term only while it pulls the residual down by at least 2x
    coef_sel = None
    rms_sel = math.inf
    for k in range(P + 1):
        A = np.column_stack(base + extras[:k])
        scale = np.linalg.norm(A, axis=0)
        coef, *_ = np.linalg.lstsq(A / scale, y, rcond=None)
        coef = coef / scale
        rms = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
        if k and rms >= 0.5 * rms_sel:
            break
        coef_sel, rms_sel = coef, rms
    full = np.zeros(P + 2)
    full[: len(coef_sel)] = coef_sel
    if full[0] <= 0:
        raise ParameterError("fitted leading coefficient is not positive")
    return TailFit(full, P, (lo, hi), rms_sel, per_level)


def _model_derivs(f: TailFit, t: float):
    """F, F', F'', F''' of the fitted model at a scalar argument."""
    c = f.coefficients
    F = c[0] * t * t + c[1]
    F1 = 2.0 * c[0] * t
    F2 = 2.0 * c[0]
    F3 = 0.0
    for j in range(1, f.inverse_terms + 1):
        q = 2 * j
        cj = c[1 + j]
        F += cj * t**-q
        F1 -= q * cj * t ** (-q - 1)
        F2 += q * (q + 1) * cj * t ** (-q - 2)
        F3 -= q * (q + 1) * (q + 2) * cj * t ** (-q - 3)
    return F, F1, F2, F3


def _g_derivs(f: TailFit, p: int, t: float):
    """g = F^-p and its first and third derivatives at a scalar argument."""
    F, F1, F2, F3 = _model_derivs(f, t)
    g = F**-p
    g1 = -p * F ** (-p - 1) * F1
    g3 = (
        -p * (p + 1) * (p + 2) * F ** (-p - 3) * F1**3
        + 3 * p * (p + 1) * F ** (-p - 2) * F1 * F2
        - p * F ** (-p - 1) * F3
    )
    return g, g1, g3


def tail_sum(f: TailFit, p: int, from_n: int) -> float:
    """sum_{n > from_n} model(n)^{-p} by Euler-Maclaurin acceleration."""
    if p not in (1, 2):
        raise ParameterError("p must be 1 or 2")
    a = from_n + 1
    probe = f.model(np.arange(a, a + 16))
    if f.coefficients[0] <= 0 or np.any(probe <= 0):
        raise ParameterError("model is not positive beyond the partial sum")

    c = f.coefficients
    P = f.inverse_terms

    def integrand(u):
        # t = 1/u; model(t) * t^-2 expressed in u stays smooth at u = 0
        bracket = c[0] + c[1] * u**2
        for j in range(1, P + 1):
            bracket = bracket + c[1 + j] * u ** (2 * j + 2)
        return u ** (2 * p - 2) * bracket ** (-float(p))

    integral = integrate_1d(integrand, 0.0, 1.0 / a, tol=1e-16).value
    g, g1, g3 = _g_derivs(f, p, float(a))
    value = integral + 0.5 * g - g1 / 12.0 + g3 / 720.0
    # remainder ~ g^(5)(a)/30240, estimated from a second difference of g'''
    g3m = _g_derivs(f, p, float(a - 1))[2]
    g3p = _g_derivs(f, p, float(a + 1))[2]
    remainder = abs(g3p - 2.0 * g3 + g3m) / 30240.0
    if remainder > 1e-12 * abs(value) + 1e-300:
        raise ParameterError(
            f"Euler-Maclaurin remainder {remainder:.2e} too large at n={a}"
        )
    return float(value)


def weyl_tail_2d(s: Spectrum, p: int = 2, cutoff: float | None = None) -> float:
    """Counting-function tail for 2D spectra above the cutoff.

    Fits N(E) ~ w1 E + w2 sqrt(E) + w3 through the staircase midpoints on
    the top three quarters of the computed range, then integrates the
    fitted level density against E^-p. Only p = 2 converges here.
    """
    if p != 2:
        raise ParameterError("2D Weyl tails are implemented for p = 2")
    e = s.eigenvalues
    if cutoff is None:
        cutoff = float(e[-1])
    counts = np.arange(1, len(e) + 1, dtype=float) - 0.5
    mask = e >= 0.25 * cutoff
    if mask.sum() < 8:
        raise ParameterError("too few levels near the cutoff for a Weyl fit")
    A = np.column_stack([e[mask], np.sqrt(e[mask]), np.ones(int(mask.sum()))])
    scale = np.linalg.norm(A, axis=0)
    w, *_ = np.linalg.lstsq(A / scale, counts[mask], rcond=None)
    w = w / scale
    if w[0] <= 0:
        raise ParameterError("fitted Weyl slope is not positive")
    return float(w[0] / cutoff + w[1] / (3.0 * cutoff**1.5))


@dataclass(frozen=True)
class NumericSumRule:
    """Partial sum plus modeled tail, itemized."""

    order: int
    partial_sum: float
    tail: float
    value: float
    error_estimate: float


def numeric_sum_rule(s: Spectrum, p: int, fit: TailFit | None = None) -> NumericSumRule:
    """Z_p estimate: direct sum over the spectrum plus the fitted tail."""
    if p not in (1, 2):
        raise ParameterError("p must be 1 or 2")
    if s.method == "rayleigh-ritz":
        # basis-truncated levels degrade toward the basis edge instead of
        # following the asymptotic model; sum them directly instead
        raise ParameterError("rayleigh-ritz spectra have no extrapolatable tail")
    partial = math.fsum(float(e) ** -p for e in s.eigenvalues)

    if s.method == "bessel":
        cutoff = float(s.eigenvalues[-1])
        e = s.eigenvalues
        counts = np.arange(1, len(e) + 1, dtype=float) - 0.5
        mask = e >= 0.25 * cutoff
        A = np.column_stack([e[mask], np.sqrt(e[mask]), np.ones(int(mask.sum()))])
        scale = np.linalg.norm(A, axis=0)
        w, *_ = np.linalg.lstsq(A / scale, counts[mask], rcond=None)
        w = w / scale
        rms = float(np.sqrt(np.mean((A @ w - counts[mask]) ** 2)))
        tail = weyl_tail_2d(s, p, cutoff)
        err = 2.0 * rms / cutoff**p + 1e-16 * abs(partial)
        return NumericSumRule(p, partial, tail, partial + tail, err)

    if fit is None:
        fit = fit_tail_1d(s)
    levels, per_level = _fit_levels(s)
    if per_level != fit.per_level:
        raise ParameterError("tail fit and spectrum use different index conventions")
    weight = 2.0 if per_level else 1.0
    tail = weight * tail_sum(fit, p, len(levels))

    # tail uncertainty, measured: refit on the upper half of the window and
    # take the shift as the systematic scale of the extrapolation
    lo, hi = fit.window
    mid = (lo + hi + 1) // 2
    if hi - mid + 1 >= fit.inverse_terms + 4:
        refit = fit_tail_1d(s, fit.inverse_terms, (mid, hi))
        tail_alt = weight * tail_sum(refit, p, len(levels))
        tail_err = abs(tail_alt - tail) + 1e-14 * abs(tail)
    else:
        tail_err = p * abs(tail) * fit.rms_residual / float(fit.model(len(levels) + 1))
    err = (
        tail_err
        + 1e-16 * abs(partial)
        + np.nansum(p * s.accuracy / s.eigenvalues ** (p + 1))
    )
    return NumericSumRule(p, partial, tail, partial + tail, float(err))
