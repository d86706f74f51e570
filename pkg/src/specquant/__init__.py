"""Spectral quantization toolkit.

Entire functions with positive zeros, Stokes-type functional relations
built on them, a fixed-point quantization scheme for the zero sequence,
and an independent ODE shooting oracle for cross-validation.
"""

from .errors import (ConditioningError, DomainError, FitError, GuardError,
                     IntegrationError, PoleGuardError, RangeError,
                     ValidationError)
from .oracle import (ODEProblem, SolutionRecord, convention_map,
                     dependency_residual, determinant_f, determinant_many,
                     halfline_dirichlet_spectrum, oracle_fed_product,
                     pt_eigenvalues, radius_refinement, sibuya_solution,
                     stokes_C0, stokes_D0, wronskian_drift, wronskian_value)
from .products import (EntireProduct, RotationParams, ZeroTail, eval_derivative,
                       eval_product, fit_tail, log_derivative, make_product,
                       modulus_profile, phase_derivative, phase_on_ray)
from .quantizer import (ConvergenceReport, InitialSpec, QuantizationProblem,
                        initial_sequence, quantization_residual, run_scheme,
                        solve_level, voros_step)
from .specfun import (ClauseResult, EigenvalueSet, PropositionReport,
                      RayClassification, SpectralFunction, Theorem1Witness,
                      classify_ray, complex_zeros, identity_residual,
                      real_zeros, stokes_C, stokes_D, theorem1_witness,
                      verify_proposition)
from .winding import Rectangle, locate_zeros, robust_winding, winding_number

__version__ = "0.1.0"

__all__ = [
    "ClauseResult", "ConditioningError", "ConvergenceReport", "DomainError",
    "EigenvalueSet", "EntireProduct", "FitError", "GuardError",
    "InitialSpec", "IntegrationError", "ODEProblem", "PoleGuardError",
    "PropositionReport", "QuantizationProblem", "RangeError",
    "RayClassification", "Rectangle", "RotationParams", "SolutionRecord",
    "SpectralFunction", "Theorem1Witness", "ValidationError", "ZeroTail",
    "classify_ray", "complex_zeros", "convention_map", "dependency_residual",
    "determinant_f", "determinant_many", "eval_derivative", "eval_product",
    "fit_tail", "halfline_dirichlet_spectrum", "identity_residual",
    "initial_sequence", "locate_zeros", "log_derivative", "make_product",
    "modulus_profile", "oracle_fed_product", "phase_derivative",
    "phase_on_ray", "pt_eigenvalues", "quantization_residual",
    "radius_refinement", "real_zeros", "robust_winding", "run_scheme",
    "sibuya_solution", "solve_level", "stokes_C", "stokes_C0", "stokes_D",
    "stokes_D0", "theorem1_witness", "verify_proposition", "voros_step",
    "winding_number", "wronskian_drift", "wronskian_value",
]
