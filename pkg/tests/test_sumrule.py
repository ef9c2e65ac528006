from __future__ import annotations

import math
from fractions import Fraction

import pytest

from sumrules import ParameterError, make_builtin
from sumrules.sumrule import (
    annulus_z2,
    bilinear_b,
    reference_value,
    trace_t1,
    trace_t2,
    z1,
    z2,
)

UNIFORM = make_builtin("uniform")
BORG = make_builtin("borg", alpha=1.0)
OSC = make_builtin("oscillating", eps=1.0)


@pytest.fixture(scope="module")
def results():
    out = {
        "z1_nn": z1(BORG, "neumann"),
        "z1_pp": z1(BORG, "periodic"),
        "z1_dd": z1(BORG, "dirichlet"),
        "z2_nn": z2(BORG, "neumann"),
        "z2_pp": z2(BORG, "periodic"),
        "z2_dd": z2(BORG, "dirichlet"),
        "z1_osc": z1(OSC, "neumann"),
        "z2_osc": z2(OSC, "neumann"),
    }
    return out


@pytest.mark.parametrize(
    "d,bc,expect",
    [
        (UNIFORM, "neumann", Fraction(1, 6)),
        (UNIFORM, "periodic", Fraction(1, 12)),
        (BORG, "neumann", Fraction(2, 9)),
    ],
)
def test_first_trace(d, bc, expect):
    r = trace_t1(d, bc)
    assert abs(r.value - float(expect)) < 1e-12
    assert abs(r.value - float(expect)) <= 10 * max(r.error_estimate, 1e-16)


@pytest.mark.parametrize(
    "bc,expect",
    [
        ("neumann", Fraction(1, 90)),
        ("periodic", Fraction(1, 720)),
        ("dirichlet", Fraction(1, 90)),
    ],
)
def test_second_trace_uniform(bc, expect):
    r = trace_t2(UNIFORM, bc)
    assert abs(r.value - float(expect)) < 1e-10


@pytest.mark.parametrize("q", [0, 1])
def test_bilinear_vanishes_for_uniform(q):
    # constants are orthogonal to both kernels
    assert abs(bilinear_b(UNIFORM, "neumann", q).value) < 1e-12
    assert abs(bilinear_b(UNIFORM, "periodic", q).value) < 1e-12


def test_bilinear_quartic_profile():
    r = bilinear_b(BORG, "neumann", 0)
    assert abs(r.value - 41.0 / 540.0) < 1e-12
    assert r.value >= 0.0


def test_exact_values_alpha_one(results):
    pins = {
        "z1_nn": Fraction(11, 70),
        "z1_pp": Fraction(3, 35),
        "z2_nn": Fraction(23, 2450),
        "z2_pp": Fraction(23, 14700),
    }
    for key, expect in pins.items():
        tol = 1e-9 if key.startswith("z1") else 1e-7
        assert abs(results[key].value - float(expect)) < tol, key


def test_oscillating_values(results):
    z1_ref = 1.0 / 3.0 - 3.0 / (16.0 * math.pi**2)
    z2_ref = 2.0 / 45.0 - 271.0 / (256.0 * math.pi**4) + 1.0 / (24.0 * math.pi**2)
    assert abs(results["z1_osc"].value - z1_ref) < 1e-9
    assert abs(results["z2_osc"].value - z2_ref) < 1e-8


@pytest.mark.parametrize("alpha", [0.5, 2.0])
@pytest.mark.parametrize("bc", ["neumann", "periodic"])
def test_first_order_matches_catalog_away_from_alpha_one(alpha, bc):
    d = make_builtin("borg", alpha=alpha)
    assert abs(z1(d, bc).value - reference_value("borg", 1, bc, alpha=alpha)) < 1e-9


def test_bookkeeping_identity(results):
    for r in results.values():
        assert r.value == r.trace_term + r.g1_term + r.zero_mode_subtraction
        assert r.value > 0.0
        assert r.error_estimate >= 0.0


def test_first_order_has_no_g1_piece(results):
    assert results["z1_nn"].g1_term == 0.0
    assert results["z1_pp"].g1_term == 0.0


def test_dirichlet_has_no_corrections(results):
    for key in ("z1_dd", "z2_dd"):
        assert results[key].zero_mode_subtraction == 0.0
        assert results[key].g1_term == 0.0 or key == "z2_dd"
    assert results["z2_dd"].g1_term == 0.0


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_dirichlet_spectrum_does_not_see_alpha(alpha):
    d = make_builtin("borg", alpha=alpha)
    assert abs(z1(d, "dirichlet").value - 1.0 / 6.0) < 1e-10
    assert abs(z2(d, "dirichlet").value - 1.0 / 90.0) < 1e-10


def test_zero_mode_correction_lowers_z1(results):
    for key in ("z1_nn", "z1_pp", "z1_osc"):
        r = results[key]
        assert r.value <= r.trace_term
        assert r.zero_mode_subtraction <= 0.0


@pytest.mark.parametrize("a", [1.0, 2.0])
@pytest.mark.parametrize("bc", ["neumann", "periodic"])
def test_uniform_dilation_scaling(a, bc, results):
    d = make_builtin("uniform", a=a)
    w1 = Fraction(1, 6) if bc == "neumann" else Fraction(1, 12)
    w2 = Fraction(1, 90) if bc == "neumann" else Fraction(1, 720)
    assert abs(z1(d, bc).value - float(w1) * a * a) < 1e-12 * a * a
    assert abs(z2(d, bc, M=64).value - float(w2) * a**4) < 1e-10 * a**4


def test_catalog_anchors():
    assert reference_value("borg", 1, "neumann", alpha=0.5) == pytest.approx(
        31.0 / 190.0, abs=1e-15
    )
    assert reference_value("borg", 1, "neumann", alpha=2.0) == pytest.approx(
        19.0 / 130.0, abs=1e-15
    )
    assert reference_value("annulus", 2, r_min=0.0) == pytest.approx(
        5 * math.pi**2 / 48.0 - 155.0 / 192.0, abs=1e-15
    )
    # alpha -> 0 recovers the uniform string at every boundary condition
    for bc in ("neumann", "periodic", "dirichlet"):
        for order in (1, 2):
            assert reference_value("borg", order, bc, alpha=1e-12) == pytest.approx(
                reference_value("uniform", order, bc), rel=1e-9
            )
    with pytest.raises(ParameterError):
        reference_value("oscillating", 2, "neumann", eps=0.5)
    with pytest.raises(ParameterError):
        reference_value("lattice", 1)


def test_oscillating_first_order_catalog_at_generic_eps():
    eps = 0.25
    d = make_builtin("oscillating", eps=eps)
    assert abs(z1(d, "neumann").value - reference_value("oscillating", 1, eps=eps)) < 1e-9


def test_ring_values_near_the_disk_limit():
    r = annulus_z2(1e-2)
    assert abs(r.value - 0.2209370754) <= max(1e-6, 10 * r.error_estimate)
    asym = reference_value("annulus", 2, r_min=0.1)
    assert abs(annulus_z2(0.1).value - asym) < 1e-3


def test_ring_sum_rule_grows_toward_thin_rings():
    # eigenvalues of the thin ring collapse toward the slow angular modes,
    # so the reciprocal sum keeps growing; the uniform-limit bound pi^4/45
    # for the separable rectangle caps it
    vals = [annulus_z2(r).value for r in (0.5, 0.7, 0.9)]
    assert vals[0] < vals[1] < vals[2]
    assert all(v < math.pi**4 / 45.0 for v in vals)


def test_ring_frozen_spot_checks():
    assert annulus_z2(0.5).value == pytest.approx(0.6514527369, abs=1e-6)
    assert annulus_z2(0.9).value == pytest.approx(1.7599405380, abs=1e-6)
