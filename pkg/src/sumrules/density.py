"""Density profiles and the domains they live on.

A density is the weight sigma(x) in the generalized eigenproblem
-psi'' = E sigma psi. One-dimensional problems live on the symmetric interval
[-a/2, a/2]. The annulus problem, after the conformal map to a periodic
rectangle, lives on [-a/2, a/2] x [0, b) with a weight that depends on the
radial coordinate only.

Builtin profiles:

``uniform``
    sigma = 1 on an interval of length ``a`` (default 1).
``borg``
    sigma(x) = (1+alpha)^2 / (1 + alpha (x + 1/2))^4 on [-1/2, 1/2]. The
    spectrum with Dirichlet ends coincides with the uniform string; with
    Neumann or periodic ends it does not.
``oscillating``
    sigma(x) = 2 + sin(2 pi (x + 1/2) / eps) on [-1/2, 1/2]: mean 2 with an
    oscillation of unit amplitude and period eps.
``annulus``
    the annulus with radii (r, 1) maps conformally to the periodic rectangle
    with a = log(1/r), b = 2 pi; the induced weight is the conformal factor
    rho^2 = r e^{2x} with rho = sqrt(r) e^{x}, so sigma runs from r^2 to 1.

Expression densities are parsed by :mod:`sumrules.expr` and evaluated with
parameter bindings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import expr as expr_mod
from .errors import DomainError, ParameterError
from .quadrature import QuadratureResult, integrate_1d

__all__ = [
    "IntervalDomain",
    "RectangleDomain",
    "Density",
    "make_builtin",
    "from_expression",
    "density_integral",
    "validate_positivity",
    "BUILTIN_NAMES",
]

BUILTIN_NAMES = ("uniform", "borg", "oscillating", "annulus")

_GRID_POINTS = 4097
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class IntervalDomain:
    """Symmetric interval [-a/2, a/2]."""

    a: float

    @property
    def volume(self) -> float:
        return self.a

    @property
    def x_range(self) -> tuple[float, float]:
        return (-0.5 * self.a, 0.5 * self.a)


@dataclass(frozen=True)
class RectangleDomain:
    """Rectangle [-a/2, a/2] x [0, b), periodic in the second coordinate."""

    a: float
    b: float = 2.0 * math.pi

    @property
    def volume(self) -> float:
        return self.a * self.b

    @property
    def x_range(self) -> tuple[float, float]:
        return (-0.5 * self.a, 0.5 * self.a)


@dataclass(frozen=True)
class Density:
    """A positive weight profile on its domain.

    The callable evaluates sigma at the first (only, in 1-D) coordinate;
    rectangle densities in this package never depend on the periodic
    coordinate. ``derivative`` is the closed-form sigma' where available
    (shooting integrators need it); expression densities leave it None and
    downstream code falls back to a spline.
    """

    kind: str
    params: dict = field(default_factory=dict)
    domain: IntervalDomain | RectangleDomain = IntervalDomain(1.0)
    fn: Callable[[np.ndarray], np.ndarray] | None = None
    derivative: Callable[[np.ndarray], np.ndarray] | None = None
    expression: "expr_mod.ExprAst | None" = None
    split_hints: tuple = ()

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        lo, hi = self.domain.x_range
        eps = 1e-12 * max(1.0, abs(hi - lo))
        if np.any(xa < lo - eps) or np.any(xa > hi + eps):
            raise DomainError(
                f"evaluation point outside [{lo}, {hi}] for density {self.kind!r}"
            )
        out = self.fn(xa)
        return np.broadcast_to(np.asarray(out, dtype=float), xa.shape).copy() if xa.shape else float(out)


def _require(cond: bool, msg: str):
    if not cond:
        raise ParameterError(msg)


def make_builtin(name: str, **params) -> Density:
    """Construct one of the builtin densities.

    uniform(a=1) | borg(alpha) | oscillating(eps) | annulus(r_min)
    """
    if name == "uniform":
        a = float(params.pop("a", 1.0))
        _require(not params, f"unexpected parameters {sorted(params)} for uniform")
        _require(a > 0.0 and math.isfinite(a), "uniform needs a > 0")
        return Density(
            kind="uniform",
            params={"a": a},
            domain=IntervalDomain(a),
            fn=lambda x: np.ones_like(x),
            derivative=lambda x: np.zeros_like(x),
        )
    if name == "borg":
        _require("alpha" in params, "borg needs alpha")
        alpha = float(params.pop("alpha"))
        _require(not params, f"unexpected parameters {sorted(params)} for borg")
        _require(alpha > -1.0 and math.isfinite(alpha), "borg needs alpha > -1")

        def fn(x, alpha=alpha):
            m = 1.0 + alpha * (x + 0.5)
            return (1.0 + alpha) ** 2 / m**4

        def dfn(x, alpha=alpha):
            m = 1.0 + alpha * (x + 0.5)
            return -4.0 * alpha * (1.0 + alpha) ** 2 / m**5

        return Density(
            kind="borg", params={"alpha": alpha}, domain=IntervalDomain(1.0),
            fn=fn, derivative=dfn,
        )
    if name == "oscillating":
        _require("eps" in params, "oscillating needs eps")
        eps = float(params.pop("eps"))
        _require(not params, f"unexpected parameters {sorted(params)} for oscillating")
        _require(eps > 0.0 and math.isfinite(eps), "oscillating needs eps > 0")

        def fn(x, eps=eps):
            return 2.0 + np.sin(2.0 * np.pi * (x + 0.5) / eps)

        def dfn(x, eps=eps):
            w = 2.0 * np.pi / eps
            return w * np.cos(w * (x + 0.5))

        # period boundaries; panels aligned here keep quadrature cheap
        n_half = int(math.ceil(2.0 / eps))
        hints = tuple(-0.5 + 0.5 * eps * k for k in range(1, n_half) if -0.5 + 0.5 * eps * k < 0.5)
        return Density(
            kind="oscillating", params={"eps": eps}, domain=IntervalDomain(1.0),
            fn=fn, derivative=dfn, split_hints=hints,
        )
    if name == "annulus":
        _require("r_min" in params, "annulus needs r_min")
        r = float(params.pop("r_min"))
        _require(not params, f"unexpected parameters {sorted(params)} for annulus")
        _require(0.0 < r < 1.0, "annulus needs 0 < r_min < 1")
        a = math.log(1.0 / r)

        def fn(x, r=r):
            return r * np.exp(2.0 * x)

        def dfn(x, r=r):
            return 2.0 * r * np.exp(2.0 * x)

        return Density(
            kind="annulus", params={"r_min": r},
            domain=RectangleDomain(a, 2.0 * math.pi), fn=fn, derivative=dfn,
        )
    raise ParameterError(f"unknown builtin density {name!r}; known: {BUILTIN_NAMES}")


def from_expression(
    text_or_ast, params: Mapping[str, float] | None = None, a: float = 1.0
) -> Density:
    """Density from an expression in x on an interval of length a."""
    _require(a > 0.0 and math.isfinite(a), "interval length a must be > 0")
    ast = expr_mod.parse(text_or_ast) if isinstance(text_or_ast, str) else text_or_ast
    bound = dict(params or {})

    def fn(x, ast=ast, bound=bound):
        return expr_mod.eval_ast(ast, x, bound)

    return Density(
        kind="expression", params=bound, domain=IntervalDomain(a),
        fn=fn, expression=ast,
    )


def density_integral(d: Density, tol: float = 1e-12) -> QuadratureResult:
    """Integral of sigma over the full domain (area integral in 2-D).

    Rectangle densities depend on the first coordinate only, so the periodic
    direction contributes a factor b.
    """
    lo, hi = d.domain.x_range
    res = integrate_1d(d, lo, hi, tol=tol, split_points=d.split_hints)
    if isinstance(d.domain, RectangleDomain):
        return QuadratureResult(
            res.value * d.domain.b, res.error_estimate * d.domain.b, res.panels_used
        )
    return res


def validate_positivity(d: Density, n_grid: int = _GRID_POINTS) -> tuple[float, float]:
    """Locate the minimum of sigma and fail if it is not strictly positive.

    Scans a dense grid, then sharpens the worst bracket with golden-section
    search. Returns (x_min, sigma_min). Raises ParameterError when the
    refined minimum is <= 0.
    """
    lo, hi = d.domain.x_range
    xs = np.linspace(lo, hi, n_grid)
    vals = d(xs)
    i = int(np.argmin(vals))
    left = xs[max(i - 1, 0)]
    right = xs[min(i + 1, n_grid - 1)]

    # golden-section sharpening on [left, right]
    c = right - _GOLDEN * (right - left)
    g = left + _GOLDEN * (right - left)
    fc = float(d(c))
    fg = float(d(g))
    for _ in range(80):
        if right - left < 1e-14 * max(1.0, abs(hi - lo)):
            break
        if fc < fg:
            right, g, fg = g, c, fc
            c = right - _GOLDEN * (right - left)
            fc = float(d(c))
        else:
            left, c, fc = c, g, fg
            g = left + _GOLDEN * (right - left)
            fg = float(d(g))
    x_best = c if fc < fg else g
    f_best = min(fc, fg, float(vals[i]))
    if f_best < fc and f_best < fg:
        x_best = float(xs[i])
    if not (f_best > 0.0):
        raise ParameterError(
            f"density {d.kind!r} is not strictly positive: sigma({x_best:.6g}) = {f_best:.6g}"
        )
    return float(x_best), float(f_best)
