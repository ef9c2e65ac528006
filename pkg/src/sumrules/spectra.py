"""Independent spectra for validating the sum rules.

Three routes, none of which shares machinery with the trace formulas:

* pruefer / monodromy: shooting on the interval, phase counting for
  Neumann/Dirichlet ends and discriminant roots for periodic ends, with
  the compiled kernels in ``_kernels``;
* rayleigh-ritz: variational upper bounds from the trigonometric basis,
  reusing only the matrix element tables;
* bessel: disk/annulus Neumann modes from derivative roots of the radial
  solutions, the root search done by bracketed scanning on top of plain
  Bessel evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import cholesky, solve_triangular
from scipy.optimize import brentq
from scipy.special import jvp, yvp

from . import _kernels
from .density import Density, IntervalDomain
from .errors import BracketError, ParameterError
from .greens import BoundaryCondition
from .quadrature import integrate_1d
from .zeromode import matrix_elements

__all__ = [
    "Spectrum",
    "sl_spectrum",
    "rayleigh_ritz",
    "generalized_sym_eig",
    "bessel_deriv_roots",
    "disk_annulus_spectrum",
]

_KIND_CODES = {"uniform": 0, "borg": 1, "oscillating": 2}
_SPLINE_POINTS = 4097


@dataclass(frozen=True)
class Spectrum:
    """Nonzero eigenvalues in ascending order, repeated per multiplicity.

    ``accuracy`` holds per-eigenvalue absolute error estimates (for the
    shooting methods: the top-of-range step-halving residual scaled
    relatively down the spectrum; NaN where no estimate is available).
    ``has_zero_mode`` records that a zero eigenvalue was removed.
    """

    eigenvalues: np.ndarray
    accuracy: np.ndarray
    bc: BoundaryCondition
    method: str
    has_zero_mode: bool

    @property
    def count(self) -> int:
        return len(self.eigenvalues)


def _kernel_args(d: Density):
    """(kind, p0, xs, cs) dispatch arguments for the compiled kernels."""
    empty_x = np.empty(0)
    empty_c = np.empty((4, 0))
    if d.kind in _KIND_CODES:
        p0 = 0.0
        if d.kind == "borg":
            p0 = float(d.params["alpha"])
        elif d.kind == "oscillating":
            p0 = float(d.params["eps"])
        return _KIND_CODES[d.kind], p0, empty_x, empty_c
    half = 0.5 * d.domain.a
    xs = np.linspace(-half, half, _SPLINE_POINTS)
    spl = CubicSpline(xs, d(xs))
    return 4, 0.0, spl.x, np.ascontiguousarray(spl.c)


def _feature_scale(d: Density) -> float:
    if d.kind == "oscillating":
        return float(d.params["eps"])
    return d.domain.a


def sl_spectrum(d: Density, bc, count: int, method: str | None = None,
                nw: int | None = None) -> Spectrum:
    """First ``count`` nonzero levels of -u'' = E sigma u by shooting.

    ``method`` is "pruefer" (Dirichlet/Neumann) or "monodromy" (periodic);
    when omitted it follows the boundary condition. ``nw`` is the number of
    integration steps per local wavelength (Richardson doubles it inside).
    """
    bc = BoundaryCondition.coerce(bc)
    if not isinstance(d.domain, IntervalDomain):
        raise ParameterError(
            "sl_spectrum shoots on interval densities; "
            "use disk_annulus_spectrum for the annulus"
        )
    if count < 1:
        raise ParameterError("count must be positive")
    expected = "monodromy" if bc is BoundaryCondition.PERIODIC else "pruefer"
    if method is None:
        method = expected
    if method != expected:
        raise ParameterError(f"method {method!r} does not apply to {bc.value} ends")
    a = d.domain.a
    half = 0.5 * a
    lsig = integrate_1d(
        lambda x: np.sqrt(d(x)), -half, half, tol=1e-13, split_points=d.split_hints
    ).value
    hmax = min(a, _feature_scale(d)) / 64.0
    kind, p0, xs, cs = _kernel_args(d)

    if bc is BoundaryCondition.PERIODIC:
        if nw is None:
            nw = 24
        n_pairs = (count + 1) // 2
        levels = _kernels.periodic_pairs(
            n_pairs, -half, half, lsig, nw, hmax, kind, p0, xs, cs
        )
        s_top = math.sqrt(levels[-1]) * lsig
        s_lo = math.sqrt(levels[-2]) * lsig
        split = 0.5 * (s_top - s_lo)
        degenerate = 0 if split > 0.05 else 1
        seed = s_top if degenerate == 0 else 0.5 * (s_top + s_lo)
        s_ref = _kernels.periodic_root_refine(
            seed, degenerate, -half, half, lsig, 2 * nw, 0.5 * hmax, kind, p0, xs, cs
        )
        e_ref = (s_ref / lsig) ** 2
        e_cmp = levels[-1] if degenerate == 0 else 0.5 * (levels[-1] + levels[-2])
        rel = max(abs(e_ref - e_cmp) / levels[-1], 1e-14)
        eig = levels[:count]
        return Spectrum(eig, rel * eig, bc, "monodromy", True)

    if nw is None:
        nw = 16
    neumann = 1 if bc is BoundaryCondition.NEUMANN else 0
    theta0 = 0.5 * math.pi if neumann else 0.0
    levels = _kernels.interval_levels(
        count, neumann, -half, half, lsig, nw, hmax, kind, p0, xs, cs
    )
    # probe a spread of levels at doubled fidelity; the relative error peaks
    # at low n where the step is capped by hmax rather than the wavelength
    probes = sorted({i for i in (*range(8), count // 4, count // 2, count - 1) if i < count})
    rel = 1e-14
    for i in probes:
        target = theta0 + (i + 1) * math.pi
        e_ref = _kernels.interval_level_refine(
            levels[i], target, theta0, -half, half, 2 * nw, 0.5 * hmax, kind, p0, xs, cs
        )
        rel = max(rel, abs(e_ref - levels[i]) / levels[i])
    has_zero = bc is not BoundaryCondition.DIRICHLET
    return Spectrum(levels, rel * levels, bc, "pruefer", has_zero)


def generalized_sym_eig(stiffness: np.ndarray, mass: np.ndarray) -> np.ndarray:
    """All eigenvalues of diag(stiffness) c = lambda mass c, ascending.

    ``mass`` must be symmetric positive definite; the problem is reduced by
    Cholesky factorization to a dense symmetric one.
    """
    stiffness = np.asarray(stiffness, dtype=float)
    L = cholesky(np.asarray(mass, dtype=float), lower=True)
    Y = solve_triangular(L, np.diag(stiffness), lower=True)
    A = solve_triangular(L, Y.T, lower=True).T
    A = 0.5 * (A + A.T)
    return np.linalg.eigvalsh(A)


def rayleigh_ritz(d: Density, bc, M: int = 100) -> Spectrum:
    """Variational upper bounds from the first M basis states.

    M counts states including the constant mode where the boundary
    condition has one; the zero eigenvalue is discarded, so Neumann and
    periodic ends return M - 1 levels (periodic needs odd M to fill whole
    cosine/sine pairs). No per-level accuracy estimate is attached; only
    the low-lying fraction of the list is converged.
    """
    bc = BoundaryCondition.coerce(bc)
    if M < 2:
        raise ParameterError("need at least two basis states")
    if bc is BoundaryCondition.NEUMANN:
        table = matrix_elements(d, bc, M - 1)
    elif bc is BoundaryCondition.PERIODIC:
        table = matrix_elements(d, bc, (M - 1) // 2)
    else:
        table = matrix_elements(d, bc, M)
    levels = generalized_sym_eig(table.eps, table.S)
    if table.has_zero_mode:
        levels = levels[1:]
    levels = np.ascontiguousarray(levels)
    acc = np.full(len(levels), float("nan"))
    return Spectrum(levels, acc, bc, "rayleigh-ritz", table.has_zero_mode)


# --- disk and annulus radial roots --------------------------------------------


def _radial_det(m: int, k, r_min: float | None):
    if r_min is None:
        return jvp(m, k)
    return jvp(m, k * r_min) * yvp(m, k) - yvp(m, k * r_min) * jvp(m, k)


def _roots_below(m: int, k_max: float, r_min: float | None) -> list[float]:
    start = max(1e-3, m - 2.0)
    if start >= k_max:
        return []
    step = 0.1
    ks = np.arange(start, k_max + step, step)
    vals = _radial_det(m, ks, r_min)
    sign = np.sign(vals)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    roots = [
        brentq(lambda k: _radial_det(m, k, r_min), ks[i], ks[i + 1], xtol=1e-13)
        for i in idx
    ]
    roots.extend(float(ks[i]) for i in np.nonzero(vals == 0.0)[0])
    return sorted(r for r in roots if r <= k_max)


def bessel_deriv_roots(n: int, k: int, r_min: float | None = None) -> np.ndarray:
    """First k positive roots of the Neumann radial determinant of order n.

    ``r_min=None`` (or 0) means the unit disk, where the determinant is
    J_n'; otherwise the annulus (r_min, 1) cross-product of Bessel
    derivatives. The trivial root at zero argument (the zero mode of
    n = 0) is excluded.
    """
    if n < 0:
        raise ParameterError("order must be nonnegative")
    if k < 1:
        raise ParameterError("need at least one root")
    if r_min is not None and r_min == 0.0:
        r_min = None
    k_max = max(n + 2.0, 4.0)
    for _ in range(64):
        roots = _roots_below(n, k_max, r_min)
        if len(roots) >= k:
            return np.array(roots[:k])
        k_max *= 2.0
    raise BracketError(
        f"root scan exhausted below {k_max} with {len(roots)} of {k} roots",
        achieved=float(len(roots)),
    )


def disk_annulus_spectrum(r_min: float, count: int) -> Spectrum:
    """First ``count`` Neumann eigenvalues E = k^2, multiplicity included.

    ``r_min = 0`` is the full disk. Modes with angular index n >= 1 carry
    multiplicity 2; the zero mode is excluded.
    """
    if not (0.0 <= r_min < 1.0):
        raise ParameterError("need 0 <= r_min < 1")
    rm = None if r_min == 0.0 else r_min
    area = math.pi * (1.0 - r_min**2)
    # Weyl estimate N(E) ~ area E / 4 pi, padded; grown if it falls short
    cutoff = math.sqrt(6.0 * math.pi * count / area) + 10.0
    for _ in range(8):
        levels: list[float] = []
        n = 0
        while True:
            roots = _roots_below(n, cutoff, rm)
            if not roots and n > 0:
                break
            mult = 1 if n == 0 else 2
            for k in roots:
                levels.extend([k * k] * mult)
            n += 1
        if len(levels) >= count:
            break
        cutoff *= 1.5
    if len(levels) < count:
        raise BracketError(
            f"found only {len(levels)} levels below cutoff {cutoff}",
            achieved=float(len(levels)),
        )
    eig = np.sort(np.array(levels))[:count]
    acc = 2e-13 * np.sqrt(eig)  # d(k^2) from the brentq xtol on k
    return Spectrum(eig, acc, BoundaryCondition.NEUMANN, "bessel", True)
