"""Shared fixtures: converged scheme runs and oracle spectra.

Everything expensive is session-scoped; the problem constructions mirror
the CLI defaults so the fixtures exercise the same configurations the
command-line surface produces.
"""

import math

import pytest

from specquant import (InitialSpec, ODEProblem, QuantizationProblem,
                       RotationParams, halfline_dirichlet_spectrum,
                       run_scheme)


def scheme_problem(m: float, levels: int, mode: str = "ode",
                   tol: float = 1e-10, max_iter: int = 200) -> QuantizationProblem:
    """Quantization problem wired exactly like the quantize command."""
    alpha = 2.0 * math.pi / (m + 2.0)
    phi = alpha / 2.0 if mode == "ode" else 0.0
    exponent = 2.0 - 2.0 * alpha / math.pi
    return QuantizationProblem(
        rot=RotationParams(alpha=alpha, phase_offset=phi),
        level_count=levels,
        rhs_offset=phi,
        tolerance=tol,
        max_iterations=max_iter,
        initial=InitialSpec(mode="power", scale=1.0, exponent=exponent),
        use_tail=True,
        tail_window=min(16, max(3, levels // 4)),
        tail_exponent=exponent)


@pytest.fixture(scope="session")
def m4_ode():
    """Converged m=4 run in ODE mode (alpha=pi/3, phi=alpha/2), N=64."""
    problem = scheme_problem(4.0, 64)
    product, report = run_scheme(problem)
    assert report.converged
    return product, report, problem


@pytest.fixture(scope="session")
def m4_voros():
    """Converged m=4 run with the plain right-hand side (k=1), N=64."""
    problem = scheme_problem(4.0, 64, mode="voros")
    product, report = run_scheme(problem)
    assert report.converged
    return product, report, problem


@pytest.fixture(scope="session")
def m3_ode():
    """alpha=2pi/5 (above pi/3): scheme still converges, D-clause skipped."""
    problem = scheme_problem(3.0, 48)
    product, report = run_scheme(problem)
    assert report.converged
    return product, report, problem


@pytest.fixture(scope="session")
def m4_witness(m4_ode):
    """Reality witness for the converged m=4 run (shared: it is expensive)."""
    from specquant import theorem1_witness
    product, _, problem = m4_ode
    return theorem1_witness(product, problem.rot)


@pytest.fixture(scope="session")
def m4_halfline8():
    """First 8 half-line Dirichlet levels of the m=4 oscillator."""
    spec = halfline_dirichlet_spectrum(ODEProblem(m=4.0, ell=1), 8)
    assert len(spec) == 8
    return spec
