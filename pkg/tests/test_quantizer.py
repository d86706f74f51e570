"""Quantization scheme: initial data, level solves, sweeps, fixed points."""

import math

import numpy as np
import pytest

from specquant import (InitialSpec, QuantizationProblem, RotationParams,
                       ValidationError, eval_product, initial_sequence,
                       make_product, quantization_residual, run_scheme,
                       solve_level, voros_step)
from specquant.quantizer import growth_amplitude

from conftest import scheme_problem


def _single_level_problem() -> QuantizationProblem:
    return QuantizationProblem(
        rot=RotationParams(alpha=math.pi / 6),
        level_count=1,
        initial=InitialSpec(mode="explicit", values=(1.0,)),
        use_tail=False)


def test_initial_sequence_power_law():
    prob = QuantizationProblem(
        rot=RotationParams(alpha=math.pi / 3), level_count=3,
        initial=InitialSpec(mode="power", scale=1.0, exponent=4.0 / 3.0),
        use_tail=False)
    expected = [(k - 0.5) ** (4.0 / 3.0) for k in (1, 2, 3)]
    assert initial_sequence(prob) == pytest.approx(expected, rel=1e-15)


def test_initial_sequence_explicit_passthrough():
    prob = QuantizationProblem(
        rot=RotationParams(alpha=math.pi / 3), level_count=3,
        initial=InitialSpec(mode="explicit", values=(3.0, 7.0, 11.0)),
        use_tail=False)
    assert list(initial_sequence(prob)) == [3.0, 7.0, 11.0]


def test_initial_sequence_ordering_violation():
    prob = QuantizationProblem(
        rot=RotationParams(alpha=math.pi / 3), level_count=2,
        initial=InitialSpec(mode="explicit", values=(3.0, 2.0)),
        use_tail=False)
    with pytest.raises(ValidationError):
        initial_sequence(prob)


def test_initial_spec_validation():
    with pytest.raises(ValidationError):
        InitialSpec(mode="explicit")          # no values
    with pytest.raises(ValidationError):
        InitialSpec(mode="quadratic")


def test_problem_validation():
    with pytest.raises(ValidationError):
        RotationParams(alpha=math.pi / 2)     # boundary excluded
    with pytest.raises(ValidationError):
        QuantizationProblem(rot=RotationParams(alpha=1.0), level_count=0)
    with pytest.raises(ValidationError):
        QuantizationProblem(rot=RotationParams(alpha=1.0), level_count=4,
                            tolerance=0.0)


def test_solve_level_single_factor():
    # arg(1 - e^{-i pi/3} t) = pi/2 forces t cos(pi/3) = 1, so t = 2
    P = make_product([1.0])
    rot = RotationParams(alpha=math.pi / 6)
    assert solve_level(P, rot, 0.0, 1) == pytest.approx(2.0, rel=1e-9)


def test_voros_step_single_level():
    E = voros_step([1.0], _single_level_problem())
    assert E == pytest.approx([2.0], rel=1e-9)


def test_voros_step_rejects_unordered():
    prob = scheme_problem(4.0, 2)
    with pytest.raises(ValidationError):
        voros_step([3.0, 2.0], prob)


def test_quantization_residual_single_factor():
    # phase at E_1=1 is arg(1 - e^{-i pi/3}) = pi/3; target is pi/2
    P = make_product([1.0])
    rot = RotationParams(alpha=math.pi / 6)
    assert quantization_residual(P, rot, 0.0) == pytest.approx(
        math.pi / 6, abs=1e-12)


def test_growth_amplitude_values():
    # harmonic oscillator: E_k = 4k - 1 = 4 (k - 1/4), so A -> 4 as alpha -> pi/2
    assert growth_amplitude(math.pi / 2 - 1e-12) == pytest.approx(4.0, rel=1e-9)
    assert growth_amplitude(math.pi / 3) == pytest.approx(
        5.506029613885254, rel=1e-12)


def test_run_scheme_output_ordered_and_converged(m4_ode):
    product, report, problem = m4_ode
    assert report.converged
    assert report.iterations <= problem.max_iterations
    assert np.all(np.diff(product.zeros) > 0)
    assert np.all(product.zeros > 0)
    assert len(report.residual_history) == report.iterations


def test_fixed_point_both_directions(m4_ode):
    product, report, problem = m4_ode
    # residual small at the fixed point
    res = quantization_residual(product, problem.rot, problem.rhs_offset)
    assert res <= 10.0 * problem.tolerance
    # and the sweep map is the identity there
    E = np.asarray(product.zeros)
    moved = voros_step(E, problem)
    assert np.max(np.abs(moved - E) / E) <= 10.0 * problem.tolerance


def test_solve_level_self_consistency(m4_ode):
    product, _, problem = m4_ode
    for k in (1, 7, 32, 64):
        got = solve_level(product, problem.rot, problem.rhs_offset, k)
        assert got == pytest.approx(product.zeros[k - 1], rel=1e-9)


def test_zero_condition_equivalence(m4_ode):
    # k f(w^2 E_j) + k^{-1} f(w^{-2} E_j) vanishes at every stored zero,
    # measured against the same combination halfway between zeros
    product, _, problem = m4_ode
    rot = problem.rot
    w2 = rot.omega ** 2
    k = rot.phase_factor

    def comb(lam):
        return (k * eval_product(product, w2 * lam)
                + eval_product(product, lam / w2) / k)

    E = product.zeros
    for j in (0, 5, 20):
        mid = 0.5 * (E[j] + E[j + 1])
        assert abs(comb(E[j])) <= 1e-7 * abs(comb(mid))


def test_alpha_above_pi_third_converges(m3_ode):
    product, report, _ = m3_ode
    assert report.converged
    assert np.all(np.diff(product.zeros) > 0)
