"""Exact sum rules Z_p = sum_n 1/E_n^p over the nonzero spectrum.

For -psi'' = E sigma psi with Neumann or periodic ends the spectrum contains
E_0 = 0, and the naive trace formulas pick up corrections from projecting the
constant mode out of the resolvent:

    Z_1 = Tr[G0 sigma] - B0 / int(sigma)
    Z_2 = Tr[G0 sigma G0 sigma] - (2/V) B1 - S0

with B_q the bilinear forms int int sigma(x) G^(q)(x, y) sigma(y) dx dy and
S0 = (3 e2^2 - 2 e1 e3)/e1^4 built from the zero-mode expansion coefficients.
With Dirichlet ends both corrections vanish and the plain traces remain.

The annulus sum rule reduces, through the conformal map to the periodic
rectangle, to the radial interval problem: the angular mode sum is performed
in closed form (sum_k 1/(C + k^2) via coth), leaving a radial truncation that
is extrapolated in the basis size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import Density, IntervalDomain, RectangleDomain, density_integral, make_builtin
from .errors import AccuracyError, ParameterError
from .greens import BoundaryCondition, eval_g0, eval_g1
from .quadrature import QuadratureResult, integrate_2d, integrate_1d
from .zeromode import ZeroModeExpansion, e0_coefficients, matrix_elements

__all__ = [
    "SumRuleResult",
    "trace_t1",
    "trace_t2",
    "bilinear_b",
    "z1",
    "z2",
    "annulus_z2",
    "reference_value",
]


@dataclass(frozen=True)
class SumRuleResult:
    """A sum rule split into its bookkeeping pieces.

    ``value`` is exactly ``trace_term + g1_term + zero_mode_subtraction``;
    for order 1 the g1 slot is zero, and with Dirichlet ends both correction
    slots are zero. ``expansion`` carries the zero-mode coefficients when the
    computation needed them.
    """

    order: int
    trace_term: float
    g1_term: float
    zero_mode_subtraction: float
    value: float
    error_estimate: float
    bc: BoundaryCondition
    problem: str
    expansion: ZeroModeExpansion | None = None


def _require_interval(d: Density, what: str):
    if not isinstance(d.domain, IntervalDomain):
        raise ParameterError(
            f"{what} works on interval densities; use annulus_z2 for the annulus"
        )


def trace_t1(d: Density, bc, tol: float = 1e-12) -> QuadratureResult:
    """Tr[G0 sigma] = int sigma(x) G0(x, x) dx."""
    bc = BoundaryCondition.coerce(bc)
    _require_interval(d, "trace_t1")
    a = d.domain.a

    def f(x):
        return d(x) * eval_g0(bc, a, x, x)

    half = 0.5 * a
    return integrate_1d(f, -half, half, tol=tol, split_points=d.split_hints)


def trace_t2(d: Density, bc, tol: float = 1e-10) -> QuadratureResult:
    """Tr[G0 sigma G0 sigma] = int int sigma(x) G0(x, y)^2 sigma(y)."""
    bc = BoundaryCondition.coerce(bc)
    _require_interval(d, "trace_t2")
    a = d.domain.a

    def f(x, y):
        return d(x) * eval_g0(bc, a, x, y) ** 2 * d(y)

    half = 0.5 * a
    return integrate_2d(f, (-half, half), (-half, half), tol=tol, split_diagonal=True)


def bilinear_b(d: Density, bc, q: int, tol: float = 1e-10) -> QuadratureResult:
    """B_q = int int sigma(x) G^(q)(x, y) sigma(y) dx dy for q in {0, 1}."""
    bc = BoundaryCondition.coerce(bc)
    _require_interval(d, "bilinear_b")
    if q not in (0, 1):
        raise ParameterError("bilinear_b supports q in {0, 1}")
    a = d.domain.a
    kernel = eval_g0 if q == 0 else eval_g1
    if q == 1:
        kernel(bc, a, 0.0, 0.0)  # Dirichlet has no closed form; fail early

    def f(x, y):
        return d(x) * kernel(bc, a, x, y) * d(y)

    half = 0.5 * a
    return integrate_2d(f, (-half, half), (-half, half), tol=tol, split_diagonal=True)


def z1(d: Density, bc, tol: float = 1e-12) -> SumRuleResult:
    """First sum rule sum_n 1/E_n over the nonzero spectrum."""
    bc = BoundaryCondition.coerce(bc)
    _require_interval(d, "z1")
    t1 = trace_t1(d, bc, tol=tol)
    if bc is BoundaryCondition.DIRICHLET:
        return SumRuleResult(
            1, t1.value, 0.0, 0.0, t1.value, t1.error_estimate, bc, d.kind
        )
    b0 = bilinear_b(d, bc, 0, tol=max(tol, 1e-11))
    s_int = density_integral(d)
    sub = -b0.value / s_int.value
    err = (
        t1.error_estimate
        + b0.error_estimate / abs(s_int.value)
        + abs(b0.value) * s_int.error_estimate / s_int.value**2
    )
    return SumRuleResult(1, t1.value, 0.0, sub, t1.value + sub, err, bc, d.kind)


def z2(d: Density, bc, tol: float = 1e-10, M: int = 512) -> SumRuleResult:
    """Second sum rule sum_n 1/E_n^2 over the nonzero spectrum."""
    bc = BoundaryCondition.coerce(bc)
    _require_interval(d, "z2")
    t2 = trace_t2(d, bc, tol=tol)
    if bc is BoundaryCondition.DIRICHLET:
        return SumRuleResult(
            2, t2.value, 0.0, 0.0, t2.value, t2.error_estimate, bc, d.kind
        )
    V = d.domain.volume
    b1 = bilinear_b(d, bc, 1, tol=tol)
    g1_term = -2.0 * b1.value / V
    exp = e0_coefficients(d, bc, M=M)
    s0 = (3.0 * exp.e2**2 - 2.0 * exp.e1 * exp.e3) / exp.e1**4
    sub = -s0
    # e3 enters S0 through -2 e3/e1^3; its stopping tolerance dominates
    s0_err = 2.0 * 1e-9 / abs(exp.e1) ** 3
    err = t2.error_estimate + 2.0 * b1.error_estimate / V + s0_err
    value = t2.value + g1_term + sub
    return SumRuleResult(2, t2.value, g1_term, sub, value, err, bc, d.kind, exp)


# --- annulus: exact angular sums ---------------------------------------------


def _f_eta(C: np.ndarray) -> np.ndarray:
    """sum_{k>=1} 1/(k^2 + C) for C > 0, elementwise."""
    x = np.pi * np.sqrt(C)
    return (x / np.tanh(np.minimum(x, 400.0)) - 1.0) / (2.0 * C)


def _neg_fprime(C: np.ndarray) -> np.ndarray:
    """sum_{k>=1} 1/(k^2 + C)^2 for C > 0, elementwise."""
    x = np.pi * np.sqrt(C)
    xs = np.minimum(x, 350.0)
    with np.errstate(over="ignore"):
        csch2 = 1.0 / np.sinh(xs) ** 2
    return (
        np.pi**2 * csch2 / (4.0 * C)
        + np.pi / np.tanh(xs) / (4.0 * C**1.5)
        - 1.0 / (2.0 * C * C)
    )


def _annulus_t2(table) -> float:
    """Double trace on the periodic rectangle with the angular sum closed.

    Separability in the angular index k gives
    T2 = sum_{m,n>=1} S_mn^2/(eps_m eps_n)
       + 2 sum_{m,n>=0} S_mn^2 Phi(eps_m, eps_n),
    Phi(A, B) = sum_{k>=1} 1/((A+k^2)(B+k^2)) as a divided difference of f.
    """
    eps = table.eps
    S = table.S
    n = len(eps)
    F = np.empty(n)
    F[0] = np.pi**2 / 6.0
    F[1:] = _f_eta(eps[1:])
    with np.errstate(divide="ignore", invalid="ignore"):
        Phi = np.subtract.outer(F, F) / (-np.subtract.outer(eps, eps))
    diag = np.empty(n)
    diag[0] = np.pi**4 / 90.0
    diag[1:] = _neg_fprime(eps[1:])
    Phi[np.arange(n), np.arange(n)] = diag
    inv = 1.0 / eps[1:]
    t_k0 = float(np.einsum("mn,m,n->", S[1:, 1:] ** 2, inv, inv))
    t_k = 2.0 * float(np.sum(S * S * Phi))
    return t_k0 + t_k


def annulus_z2(
    r_min: float, M: int = 512, trunc_tol: float = 1e-5, max_M: int = 4096
) -> SumRuleResult:
    """Z_2 for the Neumann annulus with radii (r_min, 1).

    Works in the conformally mapped rectangle where sigma = r e^{2x}. The
    radial truncation M is doubled until the double-trace changes by less
    than ``trunc_tol`` and the remaining 1/M tail is removed by Richardson
    extrapolation.
    """
    if not (0.0 < r_min < 1.0):
        raise ParameterError("annulus_z2 needs 0 < r_min < 1")
    d = make_builtin("annulus", r_min=r_min)
    a = d.domain.a

    prev = None
    while True:
        table = matrix_elements(d, BoundaryCondition.NEUMANN, M)
        t2 = _annulus_t2(table)
        if prev is not None:
            delta = t2 - prev
            if abs(delta) < trunc_tol:
                t2_extrap = t2 + delta  # removes the c/M tail
                trunc_err = 0.5 * abs(delta)
                break
        if 2 * M > max_M:
            raise AccuracyError(
                f"annulus double trace not converged at M = {M}",
                achieved=None if prev is None else abs(t2 - prev),
            )
        prev = t2
        M *= 2

    u = table.S[0, 1:]
    eps = table.eps[1:]
    b1_1d = a * float(np.sum(u * u / eps**2))
    g1_term = -2.0 / a * b1_1d

    exp = e0_coefficients(d, BoundaryCondition.NEUMANN)
    s0 = (3.0 * exp.e2**2 - 2.0 * exp.e1 * exp.e3) / exp.e1**4
    sub = -s0
    value = t2_extrap + g1_term + sub
    err = trunc_err + 2.0 * 1e-9 / abs(exp.e1) ** 3
    return SumRuleResult(
        2, t2_extrap, g1_term, sub, value, err,
        BoundaryCondition.NEUMANN, "annulus", exp,
    )


# --- catalogued closed forms --------------------------------------------------


def reference_value(problem: str, order: int, bc=None, **params) -> float:
    """Closed-form sum rule values for the builtin problems.

    uniform(a) at all three boundary conditions; borg(alpha) Neumann and
    periodic, plus the Dirichlet values, which are independent of alpha
    because the Dirichlet problem is isospectral to the uniform string;
    oscillating(eps) Neumann order 1 at any eps and order 2 at eps = 1;
    annulus(r_min) order 2 as the small-r closed form (exact in the r -> 0
    disk limit). Raises ParameterError for anything not catalogued.
    """
    if order not in (1, 2):
        raise ParameterError("order must be 1 or 2")
    pi = math.pi

    if problem == "uniform":
        a = float(params.get("a", 1.0))
        bc = BoundaryCondition.coerce(bc if bc is not None else "neumann")
        if bc is BoundaryCondition.PERIODIC:
            return a * a / 12.0 if order == 1 else a**4 / 720.0
        return a * a / 6.0 if order == 1 else a**4 / 90.0

    if problem == "borg":
        al = float(params["alpha"])
        bc = BoundaryCondition.coerce(bc if bc is not None else "neumann")
        if bc is BoundaryCondition.DIRICHLET:
            return 1.0 / 6.0 if order == 1 else 1.0 / 90.0
        if bc is BoundaryCondition.NEUMANN:
            if order == 1:
                return (al**2 + 5 * al + 5) / (10 * (al**2 + 3 * al + 3))
            return (al**4 + 10 * al**3 + 45 * al**2 + 70 * al + 35) / (
                350 * (al**2 + 3 * al + 3) ** 2
            )
        if order == 1:
            return (5 * (al * (al + 3) + 3) ** 2 - al**2 * (al * (5 * al + 12) + 12)) / (
                180 * (al + 1) * (al**2 + 3 * al + 3)
            )
        return (24 * al**4 + 100 * al**3 + 205 * al**2 + 210 * al + 105) / (
            8400 * (al**2 + 3 * al + 3) ** 2
        )

    if problem == "oscillating":
        eps = float(params["eps"])
        bc = BoundaryCondition.coerce(bc if bc is not None else "neumann")
        if bc is not BoundaryCondition.NEUMANN:
            raise ParameterError("oscillating closed forms are catalogued for Neumann")
        if order == 1:
            s = math.sin(pi / eps)
            c = math.cos(pi / eps)
            t1 = (eps * s * ((2 * pi**2 - 3 * eps**2) * s + 3 * pi * eps * c) + 2 * pi**3) / (
                6 * pi**3
            )
            t2 = (
                eps**2
                * (
                    18 * eps**2
                    - 8 * (3 * eps**2 + pi**2) * math.cos(2 * pi / eps)
                    + (6 * eps**2 - 4 * pi**2) * math.cos(4 * pi / eps)
                    + 9 * pi * eps * math.sin(4 * pi / eps)
                    - 24 * pi**2
                )
            ) / (96 * pi**3 * (eps * s * s + 2 * pi))
            return t1 + t2
        if eps == 1.0:
            return 2.0 / 45.0 - 271.0 / (256.0 * pi**4) + 1.0 / (24.0 * pi**2)
        raise ParameterError(
            "order-2 oscillating value is catalogued at eps = 1 only"
        )

    if problem == "annulus":
        if order != 2:
            raise ParameterError("annulus values are catalogued for order 2")
        r = float(params.get("r_min", 0.0))
        if not (0.0 <= r < 1.0):
            raise ParameterError("annulus needs 0 <= r_min < 1")
        return 5 * pi**2 / 48.0 - 155.0 / 192.0 + 139.0 * r * r / 96.0

    raise ParameterError(f"no catalogued reference for problem {problem!r}")
