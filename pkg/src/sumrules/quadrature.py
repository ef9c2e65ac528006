"""Adaptive panel quadrature with an embedded Gauss-Kronrod 7/15 rule.

Integrands are vectorized callables: they receive 1-D float64 arrays and must
return arrays of the same shape. All reductions use compensated summation over
panels sorted by position, so results are bit-for-bit reproducible for
identical inputs.

The 2-D integrator works on axis-aligned rectangles with quadtree refinement.
For kernels with a kink along the diagonal x = y it can split a square domain
into the two triangles on either side of the diagonal, mapping each to the
unit square (the corner map u -> (u, u*v) with Jacobian u), which keeps every
evaluation point strictly on one side of the kink.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import AccuracyError, DomainError, ParameterError

__all__ = ["QuadratureResult", "integrate_1d", "integrate_2d"]

# 7/15 embedded pair, positive abscissae. The Gauss-7 nodes are the odd
# entries; tests pin them against numpy.polynomial.legendre.leggauss and the
# full rule against monomials up to degree 22.
_XGK_HALF = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
)
_WGK_HALF = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
)
_WGK_CENTER = 0.209482141084727828012999174891714
_WG_HALF = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
)
_WG_CENTER = 0.417959183673469387755102040816327

_XGK = np.array([-x for x in _XGK_HALF] + [0.0] + [x for x in reversed(_XGK_HALF)])
_WGK = np.array(list(_WGK_HALF) + [_WGK_CENTER] + list(reversed(_WGK_HALF)))
_G7_IDX = np.array([1, 3, 5, 7, 9, 11, 13])
_WG = np.array(list(_WG_HALF) + [_WG_CENTER] + list(reversed(_WG_HALF)))

_MAX_GENERATIONS = 64


@dataclass(frozen=True)
class QuadratureResult:
    """Value of an integral together with its accuracy bookkeeping.

    Attributes
    ----------
    value : float
        Best estimate of the integral.
    error_estimate : float
        Sum of per-panel embedded-rule error estimates. Heuristic but
        conservative for smooth integrands.
    panels_used : int
        Number of panels (1-D) or rectangles (2-D) in the final subdivision.
    """

    value: float
    error_estimate: float
    panels_used: int


def _eval_panels_1d(f, lo: np.ndarray, hi: np.ndarray):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * _XGK[None, :]
    fv = np.asarray(f(x.ravel()), dtype=float)
    if fv.shape != x.ravel().shape:
        raise ParameterError(
            f"integrand returned shape {fv.shape}, expected {x.ravel().shape}"
        )
    if not np.all(np.isfinite(fv)):
        bad = x.ravel()[~np.isfinite(fv)][0]
        raise DomainError(f"integrand returned a non-finite value near x = {bad!r}")
    fv = fv.reshape(x.shape)
    k15 = (fv * _WGK).sum(axis=1) * half
    g7 = (fv[:, _G7_IDX] * _WG).sum(axis=1) * half
    return k15, np.abs(k15 - g7)


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-12,
    split_points: Sequence[float] = (),
    max_panels: int = 4096,
) -> QuadratureResult:
    """Integrate a vectorized function over [a, b] to absolute tolerance.

    Parameters
    ----------
    f : callable
        Vectorized integrand; receives a 1-D float64 array.
    a, b : float
        Integration limits; b < a flips the sign of the result.
    tol : float
        Absolute tolerance target for the summed error estimate.
    split_points : sequence of float
        Interior points placed on panel boundaries before any refinement.
        Use these for known kinks or oscillation periods.
    max_panels : int
        Refinement budget.

    Returns
    -------
    QuadratureResult

    Raises
    ------
    AccuracyError
        If the budget is exhausted with an error estimate above 10 * tol.
    DomainError
        If the integrand produces NaN or infinity.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ParameterError("integration limits must be finite")
    if tol <= 0.0:
        raise ParameterError("tol must be positive")
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)

    pts = sorted({a, b, *(float(p) for p in split_points if a < float(p) < b)})
    lo = np.array(pts[:-1])
    hi = np.array(pts[1:])
    if len(lo) > max_panels:
        raise ParameterError("more split points than the panel budget allows")
    vals, errs = _eval_panels_1d(f, lo, hi)

    width = b - a
    for _ in range(_MAX_GENERATIONS):
        total = errs.sum()
        if total <= tol or len(lo) >= max_panels:
            break
        mask = errs > tol * (hi - lo) / width
        if not mask.any():
            mask = errs >= errs.max()
        room = max_panels - len(lo)
        if mask.sum() > room:
            # keep only the worst offenders within budget
            worst = np.argsort(errs)[::-1][:room]
            mask = np.zeros(len(lo), dtype=bool)
            mask[worst] = True
        mid = 0.5 * (lo[mask] + hi[mask])
        new_lo = np.concatenate([lo[mask], mid])
        new_hi = np.concatenate([mid, hi[mask]])
        new_vals, new_errs = _eval_panels_1d(f, new_lo, new_hi)
        lo = np.concatenate([lo[~mask], new_lo])
        hi = np.concatenate([hi[~mask], new_hi])
        vals = np.concatenate([vals[~mask], new_vals])
        errs = np.concatenate([errs[~mask], new_errs])

    order = np.argsort(lo, kind="stable")
    value = math.fsum(vals[order])
    err = math.fsum(errs[order])
    if err > 10.0 * tol:
        raise AccuracyError(
            f"1-D quadrature stalled at estimate {err:.3e} (tol {tol:.3e}, "
            f"{len(lo)} panels)",
            achieved=err,
        )
    return QuadratureResult(sign * value, err, len(lo))


def _eval_rects(f, x0, x1, y0, y1):
    mx = 0.5 * (x0 + x1)
    hx = 0.5 * (x1 - x0)
    my = 0.5 * (y0 + y1)
    hy = 0.5 * (y1 - y0)
    X = mx[:, None, None] + hx[:, None, None] * _XGK[None, :, None]
    Y = my[:, None, None] + hy[:, None, None] * _XGK[None, None, :]
    Xb = np.broadcast_to(X, (len(mx), 15, 15))
    Yb = np.broadcast_to(Y, (len(mx), 15, 15))
    fv = np.asarray(f(Xb.ravel(), Yb.ravel()), dtype=float)
    if not np.all(np.isfinite(fv)):
        raise DomainError("2-D integrand returned a non-finite value")
    fv = fv.reshape(len(mx), 15, 15)
    area = hx * hy
    k = area * np.einsum("nij,i,j->n", fv, _WGK, _WGK)
    sub = fv[:, _G7_IDX][:, :, _G7_IDX]
    g = area * np.einsum("nij,i,j->n", sub, _WG, _WG)
    return k, np.abs(k - g)


def _adaptive_rect(f, x0, x1, y0, y1, tol, max_rects):
    lx = np.array([x0])
    hx = np.array([x1])
    ly = np.array([y0])
    hy = np.array([y1])
    vals, errs = _eval_rects(f, lx, hx, ly, hy)
    total_area = (x1 - x0) * (y1 - y0)
    for _ in range(_MAX_GENERATIONS):
        total = errs.sum()
        if total <= tol or len(lx) >= max_rects:
            break
        mask = errs > tol * (hx - lx) * (hy - ly) / total_area
        if not mask.any():
            mask = errs >= errs.max()
        room = (max_rects - len(lx)) // 3
        if mask.sum() > room:
            worst = np.argsort(errs)[::-1][: max(room, 1)]
            mask = np.zeros(len(lx), dtype=bool)
            mask[worst] = True
        mx = 0.5 * (lx[mask] + hx[mask])
        my = 0.5 * (ly[mask] + hy[mask])
        qlx = np.concatenate([lx[mask], mx, lx[mask], mx])
        qhx = np.concatenate([mx, hx[mask], mx, hx[mask]])
        qly = np.concatenate([ly[mask], ly[mask], my, my])
        qhy = np.concatenate([my, my, hy[mask], hy[mask]])
        new_vals, new_errs = _eval_rects(f, qlx, qhx, qly, qhy)
        lx = np.concatenate([lx[~mask], qlx])
        hx = np.concatenate([hx[~mask], qhx])
        ly = np.concatenate([ly[~mask], qly])
        hy = np.concatenate([hy[~mask], qhy])
        vals = np.concatenate([vals[~mask], new_vals])
        errs = np.concatenate([errs[~mask], new_errs])
    order = np.lexsort((ly, lx))
    return math.fsum(vals[order]), math.fsum(errs[order]), len(lx)


def integrate_2d(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    tol: float = 1e-10,
    split_diagonal: bool = False,
    max_rects: int = 8192,
) -> QuadratureResult:
    """Integrate f(x, y) over a rectangle with quadtree refinement.

    With ``split_diagonal`` the two ranges must coincide; the square is cut
    along x = y and each triangle integrated through the corner map, so the
    rule never brackets a diagonal kink. Raises AccuracyError if the combined
    estimate remains above 10 * tol after the rectangle budget is spent.
    """
    x0, x1 = map(float, x_range)
    y0, y1 = map(float, y_range)
    if not all(map(math.isfinite, (x0, x1, y0, y1))):
        raise ParameterError("integration limits must be finite")
    if x1 <= x0 or y1 <= y0:
        raise ParameterError("ranges must be increasing")
    if tol <= 0.0:
        raise ParameterError("tol must be positive")

    if not split_diagonal:
        value, err, n = _adaptive_rect(f, x0, x1, y0, y1, tol, max_rects)
        if err > 10.0 * tol:
            raise AccuracyError(
                f"2-D quadrature stalled at estimate {err:.3e}", achieved=err
            )
        return QuadratureResult(value, err, n)

    if (x0, x1) != (y0, y1):
        raise ParameterError("split_diagonal requires identical x and y ranges")
    L = x1 - x0

    def lower(u, v):
        # x >= y side: x = x0 + L u, y = x0 + L u v
        x = x0 + L * u
        y = x0 + L * u * v
        return f(x, y) * (L * L * u)

    def upper(u, v):
        x = x0 + L * u * v
        y = x0 + L * u
        return f(x, y) * (L * L * u)

    v1, e1, n1 = _adaptive_rect(lower, 0.0, 1.0, 0.0, 1.0, tol / 2.0, max_rects // 2)
    v2, e2, n2 = _adaptive_rect(upper, 0.0, 1.0, 0.0, 1.0, tol / 2.0, max_rects // 2)
    err = e1 + e2
    if err > 10.0 * tol:
        raise AccuracyError(
            f"2-D quadrature stalled at estimate {err:.3e}", achieved=err
        )
    return QuadratureResult(v1 + v2, err, n1 + n2)
