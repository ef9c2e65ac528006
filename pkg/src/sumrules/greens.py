"""Closed-form Green's kernels on the symmetric interval [-a/2, a/2].

G^(0) inverts -d^2/dx^2 for the given boundary condition; for Neumann and
periodic ends the inverse is taken on the complement of the constant mode, so
the kernels integrate to zero in each argument. G^(1) is the once-iterated
kernel (the kernel of the inverse squared on the same subspace). Dirichlet
G^(1) is not provided in closed form here; iterate G^(0) numerically instead.

The spectral partial sums are the independent oracle for every closed form:
summing phi_m(x) phi_m(y) / eps_m^(q+1) over the first M frequencies converges
to the kernels at a known polynomial rate, which the tests pin down.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ParameterError, UnsupportedKernelError
from .quadrature import integrate_1d

__all__ = [
    "BoundaryCondition",
    "GreensKernel",
    "eval_g0",
    "eval_g1",
    "make_kernel",
    "convolve_gq",
    "spectral_series_oracle",
]


class BoundaryCondition(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    PERIODIC = "periodic"

    @classmethod
    def coerce(cls, value) -> "BoundaryCondition":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ParameterError(
                f"unknown boundary condition {value!r}; expected one of: {names}"
            ) from None


def _check_interval(a: float):
    if not (a > 0.0 and math.isfinite(a)):
        raise ParameterError("interval length a must be positive and finite")


def eval_g0(bc, a: float, x, y):
    """Evaluate G^(0)(x, y), vectorized with broadcasting."""
    bc = BoundaryCondition.coerce(bc)
    _check_interval(a)
    xa, ya = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    if bc is BoundaryCondition.NEUMANN:
        out = -0.5 * np.abs(xa - ya) + (xa * xa + ya * ya) / (2.0 * a) + a / 12.0
    elif bc is BoundaryCondition.PERIODIC:
        d = xa - ya
        out = d * d / (2.0 * a) - 0.5 * np.abs(d) + a / 12.0
    else:
        lo = np.minimum(xa, ya)
        hi = np.maximum(xa, ya)
        out = (lo + 0.5 * a) * (0.5 * a - hi) / a
    return out if out.shape else float(out)


def eval_g1(bc, a: float, x, y):
    """Evaluate G^(1)(x, y), vectorized. Dirichlet is not supported."""
    bc = BoundaryCondition.coerce(bc)
    _check_interval(a)
    if bc is BoundaryCondition.DIRICHLET:
        raise UnsupportedKernelError(
            "no closed form for the iterated Dirichlet kernel; "
            "use convolve_gq on the q = 0 kernel"
        )
    xa, ya = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    d3 = np.abs(xa - ya) ** 3
    if bc is BoundaryCondition.NEUMANN:
        # grouped so every summand is invariant under x <-> y in floating
        # point, keeping the kernel symmetric to the last bit
        p = xa * ya
        out = (
            a**4
            - 30.0 * a * a * ((xa * xa + ya * ya) - 6.0 * p)
            + 60.0 * a * d3
            - 30.0 * ((xa**4 + ya**4) + 6.0 * p * p)
        ) / (720.0 * a)
    else:
        d2 = (xa - ya) ** 2
        out = (a**4 - 30.0 * a * a * d2 + 60.0 * a * d3 - 30.0 * d2 * d2) / (720.0 * a)
    return out if out.shape else float(out)


@dataclass(frozen=True)
class GreensKernel:
    """A kernel G^(q) on [-a/2, a/2] with a record of how it is represented."""

    bc: BoundaryCondition
    a: float
    q: int
    representation: str
    fn: Callable

    def __call__(self, x, y):
        return self.fn(x, y)


def make_kernel(bc, a: float, q: int) -> GreensKernel:
    """Closed-form kernel for q in {0, 1}."""
    bc = BoundaryCondition.coerce(bc)
    _check_interval(a)
    if q == 0:
        return GreensKernel(bc, a, 0, "closed-form", lambda x, y: eval_g0(bc, a, x, y))
    if q == 1:
        eval_g1(bc, a, 0.0, 0.0)  # raises for Dirichlet up front
        return GreensKernel(bc, a, 1, "closed-form", lambda x, y: eval_g1(bc, a, x, y))
    raise UnsupportedKernelError(f"no closed form for q = {q}; use convolve_gq")


def convolve_gq(kernel: GreensKernel, tol: float = 1e-12) -> GreensKernel:
    """Iterate a kernel once: returns the kernel of order q + 1.

    Evaluates int G^(0)(x, z) G^(q)(z, y) dz pointwise by adaptive quadrature
    with panel boundaries at z = x and z = y, where the integrand has kinks.
    Intended for spot checks and for boundary conditions without a closed
    form; it is not vectorized for bulk work.
    """
    bc, a = kernel.bc, kernel.a
    half = 0.5 * a

    def fn(x, y, kernel=kernel, tol=tol):
        xa, ya = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        flat_x = np.atleast_1d(xa).ravel()
        flat_y = np.atleast_1d(ya).ravel()
        out = np.empty(flat_x.shape)
        for i, (xi, yi) in enumerate(zip(flat_x, flat_y)):
            res = integrate_1d(
                lambda z: eval_g0(bc, a, xi, z) * kernel(z, yi),
                -half,
                half,
                tol=tol,
                split_points=(xi, yi),
            )
            out[i] = res.value
        out = out.reshape(xa.shape)
        return out if out.shape else float(out)

    return GreensKernel(bc, a, kernel.q + 1, "convolution", fn)


def spectral_series_oracle(bc, a: float, q: int, n_terms: int) -> Callable:
    """Partial spectral sum over the first n_terms nonzero frequencies.

    Returns a vectorized callable approximating G^(q). Periodic frequencies
    carry their twofold degeneracy (cosine and sine combine into a cosine of
    the difference).
    """
    bc = BoundaryCondition.coerce(bc)
    _check_interval(a)
    if n_terms < 1:
        raise ParameterError("n_terms must be >= 1")
    m = np.arange(1, n_terms + 1)

    if bc is BoundaryCondition.PERIODIC:
        eps = (2.0 * np.pi * m / a) ** 2

        def fn(x, y, m=m, eps=eps):
            xa, ya = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
            d = (xa - ya)[..., None]
            terms = (2.0 / a) * np.cos(2.0 * np.pi * m * d / a) / eps ** (q + 1)
            out = terms.sum(axis=-1)
            return out if out.shape else float(out)

        return fn

    eps = (np.pi * m / a) ** 2
    trig = np.cos if bc is BoundaryCondition.NEUMANN else np.sin

    def fn(x, y, m=m, eps=eps, trig=trig):
        xa, ya = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        u = (xa + 0.5 * a)[..., None]
        v = (ya + 0.5 * a)[..., None]
        phase = np.pi * m / a
        terms = (2.0 / a) * trig(phase * u) * trig(phase * v) / eps ** (q + 1)
        out = terms.sum(axis=-1)
        return out if out.shape else float(out)

    return fn
