"""Shooting oracle: seeds, Wronskians, determinants, and closed-form spectra.

The m=2 closed forms (harmonic oscillator) calibrate the whole module:
half-line Dirichlet levels 4k-1 and full-line levels 2k-1.
"""

import math

import numpy as np
import pytest

from specquant import (DomainError, ODEProblem, ValidationError,
                       convention_map, dependency_residual, determinant_f,
                       fit_tail, halfline_dirichlet_spectrum, pt_eigenvalues,
                       radius_refinement, stokes_C0, stokes_D0,
                       wronskian_drift, wronskian_value)

PROB2 = ODEProblem(m=2.0, ell=1)
PROB4 = ODEProblem(m=4.0, ell=1)


def test_problem_validation():
    with pytest.raises(DomainError):
        ODEProblem(m=1.5)
    with pytest.raises(ValidationError):
        ODEProblem(m=4.0, ell=3)


def test_halfline_harmonic_closed_form():
    spec = halfline_dirichlet_spectrum(PROB2, 5)
    expected = [3.0, 7.0, 11.0, 15.0, 19.0]
    for got, want in zip(spec.real_values, expected):
        assert got == pytest.approx(want, rel=1e-7)


def test_fullline_harmonic_closed_form():
    spec = pt_eigenvalues(PROB2, 4)
    expected = [1.0, 3.0, 5.0, 7.0]
    assert len(spec) == 4
    for got, want in zip(spec.real_values, expected):
        assert got == pytest.approx(want, rel=1e-7)


def test_c0_at_origin():
    assert stokes_C0(PROB4, 0.0) == pytest.approx(math.sqrt(3.0), abs=1e-12)
    prob5 = ODEProblem(m=5.0, ell=1)
    assert stokes_C0(prob5, 0.0) == pytest.approx(2.0 * math.cos(math.pi / 7.0),
                                                  abs=1e-12)


def test_d0_at_origin():
    # 4 cos^2(pi/6) - 1 = 2
    assert stokes_D0(PROB4, 0.0) == pytest.approx(2.0, abs=1e-9)


def test_d0_route_agreement():
    rng = np.random.default_rng(23)
    pts = [complex(4.0 * rng.random() - 2.0, 1.5 * rng.normal())
           for _ in range(20)]
    for lam in pts:
        a = stokes_D0(PROB4, lam, route="composition")
        b = stokes_D0(PROB4, lam, route="wronskian")
        assert abs(a - b) <= 1e-6 * max(1.0, abs(a))


def test_wronskian_constant():
    w = wronskian_value(PROB4, 1.0)
    assert w == pytest.approx(2j, rel=1e-9)


def test_wronskian_drift_small():
    for lam in (1.0, -2.0, 0.5 + 0.5j):
        assert wronskian_drift(PROB4, lam) < 1e-8


def test_radius_refinement_stable():
    for lam in (1.0, 3.0 + 1.0j, -4.0):
        change, estimate = radius_refinement(PROB4, lam)
        assert change < 1e-8
        assert estimate > 0


def test_linear_dependency_identity():
    for lam in (0.7, 2.0, 1.0 + 0.4j):
        assert dependency_residual(PROB4, lam) < 1e-7


def test_determinant_normalized_and_real():
    assert determinant_f(PROB4, 0.0) == pytest.approx(1.0, rel=1e-12)
    for lam in (1.3, 2.0 + 1.0j, -3.5 + 0.2j):
        a = determinant_f(PROB4, lam)
        b = determinant_f(PROB4, np.conj(lam))
        assert b == pytest.approx(np.conj(a), rel=1e-9)


def test_determinant_zeros_match_halfline():
    # the half-line spectrum reports positive internal values s = -lam;
    # the determinant itself vanishes at the mapped-back lam
    spec = halfline_dirichlet_spectrum(PROB2, 2)
    for s in spec.real_values:
        lam = convention_map(PROB2, s, direction="to_oscillator")
        assert abs(determinant_f(PROB2, lam)) < 1e-6


def test_convention_map_involution():
    for v in (3.0, -1.5, 2.0 + 1.0j):
        once = convention_map(PROB2, v)
        assert convention_map(PROB2, once) == pytest.approx(v, rel=1e-15)
    # internal f-zero s=3 corresponds to oscillator eigenvalue -3
    assert convention_map(PROB2, 3.0) == -3.0
    with pytest.raises(ValidationError):
        convention_map(PROB2, 1.0, direction="sideways")


def test_weyl_growth_of_quartic_spectrum(m4_halfline8):
    tail = fit_tail(list(m4_halfline8.real_values), window=5)
    assert tail.exponent == pytest.approx(4.0 / 3.0, rel=0.05)


def test_spectra_positive_and_increasing(m4_halfline8):
    vals = list(m4_halfline8.real_values)
    assert all(v > 0 for v in vals)
    assert all(b > a for a, b in zip(vals, vals[1:]))
