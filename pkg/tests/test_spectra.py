from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.linalg
import scipy.special
from scipy.optimize import brentq

from sumrules import make_builtin
from sumrules.quadrature import integrate_1d
from sumrules.spectra import (
    bessel_deriv_roots,
    disk_annulus_spectrum,
    generalized_sym_eig,
    rayleigh_ritz,
    sl_spectrum,
)

from oracles import borg_nn_energies, borg_pp_energies, inverse_iteration_eig


def test_uniform_interval_levels_are_exact():
    s = sl_spectrum(make_builtin("uniform"), "neumann", 3)
    assert s.has_zero_mode
    ref = np.array([1.0, 4.0, 9.0]) * math.pi**2
    assert np.max(np.abs(s.eigenvalues / ref - 1.0)) < 1e-12

    d = sl_spectrum(make_builtin("uniform"), "dirichlet", 3)
    assert not d.has_zero_mode
    assert np.max(np.abs(d.eigenvalues / ref - 1.0)) < 1e-12


def test_quartic_profile_dirichlet_matches_uniform_levels():
    s = sl_spectrum(make_builtin("borg", alpha=1.0), "dirichlet", 30)
    n = np.arange(1, 31, dtype=float)
    ref = math.pi**2 * n**2
    diff = np.abs(s.eigenvalues - ref)
    assert np.max(diff / ref) < 1e-8
    assert np.max(diff / s.accuracy) < 5.0


def test_uniform_periodic_levels_come_in_pairs():
    s = sl_spectrum(make_builtin("uniform"), "periodic", 200)
    k = np.arange(1, 101, dtype=float)
    ref = np.repeat(4.0 * math.pi**2 * k**2, 2)
    assert np.max(np.abs(s.eigenvalues / ref - 1.0)) < 1e-10


@pytest.mark.parametrize("bc", ["neumann", "periodic"])
def test_shooting_agrees_with_transcendental_roots(bc):
    # the quartic profile admits closed transcendental eigenvalue equations;
    # their brentq roots are an independent oracle for the ODE solver, and
    # the reported per-level accuracy must cover the observed deviation
    oracle = borg_nn_energies if bc == "neumann" else borg_pp_energies
    s = sl_spectrum(make_builtin("borg", alpha=1.0), bc, 300)
    ref = oracle(1.0, 300)
    diff = np.abs(s.eigenvalues - ref)
    assert np.max(diff / ref) < 1e-5
    assert np.nanmax(diff / s.accuracy) < 5.0


DENSITIES = [
    ("uniform", {}),
    ("borg", {"alpha": 1.0}),
    ("oscillating", {"eps": 1.0}),
]


@pytest.mark.parametrize("bc", ["dirichlet", "neumann", "periodic"])
@pytest.mark.parametrize("name,kwargs", DENSITIES)
def test_counting_function_has_no_misses_or_duplicates(name, kwargs, bc):
    d = make_builtin(name, **kwargs)
    s = sl_spectrum(d, bc, 500)
    assert s.count == 500
    assert np.all(s.eigenvalues > 0.0)
    assert np.all(np.diff(s.eigenvalues) >= 0.0)
    # the phase-integral index sqrt(E) * int sqrt(sigma) / pi advances by
    # exactly one per level (two per pair for periodic ends); a missed or
    # doubled level would shift every later deviation past 1.5
    length = integrate_1d(
        lambda x: np.sqrt(d(x)), -0.5, 0.5, split_points=d.split_hints
    ).value
    idx = np.sqrt(s.eigenvalues) * length / math.pi
    assert np.max(np.abs(idx - np.arange(1, 501))) < 1.5


def test_basis_method_agrees_with_shooting():
    osc = make_builtin("oscillating", eps=1.0)
    sl = sl_spectrum(osc, "neumann", 20)
    rr = rayleigh_ritz(osc, "neumann", 400)
    assert np.max(np.abs(rr.eigenvalues[:20] / sl.eigenvalues - 1.0)) < 1e-6


@pytest.mark.parametrize("M", [60, 400])
def test_basis_levels_are_upper_bounds(M):
    osc = make_builtin("oscillating", eps=1.0)
    sl = sl_spectrum(osc, "neumann", 20)
    rr = rayleigh_ritz(osc, "neumann", M)
    floor = sl.eigenvalues - 5.0 * np.nan_to_num(sl.accuracy)
    assert np.all(rr.eigenvalues[:20] >= floor)


def test_exact_basis_is_reproduced():
    rr = rayleigh_ritz(make_builtin("uniform"), "neumann", 50)
    n = np.arange(1, 50, dtype=float)
    assert np.max(np.abs(rr.eigenvalues / (math.pi**2 * n**2) - 1.0)) < 1e-10


def test_generalized_eigensolver_small_cases():
    got = generalized_sym_eig(np.array([0.0, 1.0]), np.eye(2))
    assert np.allclose(got, [0.0, 1.0], atol=1e-14)
    got = generalized_sym_eig(np.array([0.0, math.pi**2]), 2.0 * np.eye(2))
    assert np.allclose(got, [0.0, math.pi**2 / 2.0], atol=1e-13)


def test_generalized_eigensolver_random_spd():
    rng = np.random.default_rng(23)
    stiffness = rng.uniform(0.0, 10.0, 20)
    m = rng.standard_normal((20, 20))
    mass = m @ m.T + 20.0 * np.eye(20)
    got = generalized_sym_eig(stiffness, mass)
    assert np.all(np.diff(got) >= 0.0)
    ref = scipy.linalg.eigh(np.diag(stiffness), mass, eigvals_only=True)
    assert np.max(np.abs(got - ref)) < 1e-10
    for value in got:
        refined = inverse_iteration_eig(stiffness, mass, value)
        assert abs(refined - value) < 1e-10


def test_bessel_derivative_roots():
    got = bessel_deriv_roots(1, 1)[0]
    assert got == pytest.approx(1.8411837813, abs=1e-9)
    # J0' = -J1, so its first positive root is J1's
    got0 = bessel_deriv_roots(0, 1)[0]
    assert got0 == pytest.approx(3.8317059702, abs=1e-9)
    for n in range(4):
        ref = scipy.special.jnp_zeros(n, 5)
        assert np.max(np.abs(bessel_deriv_roots(n, 5) - ref)) < 1e-10


def test_disk_levels():
    s = disk_annulus_spectrum(0.0, 50)
    assert s.has_zero_mode
    first = bessel_deriv_roots(1, 1)[0] ** 2
    assert s.eigenvalues[0] == pytest.approx(first, rel=1e-12)
    assert s.eigenvalues[1] == pytest.approx(first, rel=1e-12)  # n >= 1 pairs
    assert s.eigenvalues[2] > s.eigenvalues[1]


def test_disk_counting_function_tracks_area_term():
    s = disk_annulus_spectrum(0.0, 2000)
    n = np.arange(1, 2001, dtype=float)
    dev = (n - s.eigenvalues / 4.0) / np.sqrt(s.eigenvalues)
    # area term E/4 removed, the rest is the O(sqrt E) boundary term,
    # positive for a free boundary
    assert np.all(dev > 0.0)
    assert np.all(dev < 1.0)


def test_thin_ring_keeps_finite_angular_levels():
    # squeezing the ring does not push every level up: radial excitations
    # diverge like (pi/(1-r))^2 but the n-th angular pair tends to the
    # finite circle value n^2/r^2 at the mean radius, below the disk's
    # first level
    ring = disk_annulus_spectrum(0.9, 6)
    rbar = 0.5 * (1.0 + 0.9)
    pred = np.repeat((np.arange(1, 4) / rbar) ** 2, 2)
    assert np.max(np.abs(ring.eigenvalues / pred - 1.0)) < 5e-3
    assert ring.eigenvalues[0] < disk_annulus_spectrum(0.0, 1).eigenvalues[0]

    # independent root of the derivative cross-product equation
    def cross(x):
        return scipy.special.jvp(1, 0.9 * x) * scipy.special.yvp(1, x) - scipy.special.jvp(
            1, x
        ) * scipy.special.yvp(1, 0.9 * x)

    k = brentq(cross, 0.5, 2.0, xtol=1e-13)
    assert ring.eigenvalues[0] == pytest.approx(k * k, rel=1e-10)
