"""A tour of the two connection functions built on a converged product.

C and D are ratios of the base product evaluated at rotated arguments.
Everything below is a consistency exercise: known values at the origin,
the three-step functional identity at random points, agreement between
the two independent routes to D, and the reality clauses on the located
zeros.
"""

import math

import numpy as np

from specquant import (InitialSpec, QuantizationProblem, RotationParams,
                       SpectralFunction, identity_residual, run_scheme,
                       stokes_C, stokes_D, verify_proposition)

m = 4.0
alpha = 2.0 * math.pi / (m + 2.0)
exponent = 2.0 - 2.0 * alpha / math.pi

# plain right-hand side, k = 1: the origin constants and the D bound
# below take their classic values only in this gauge
problem = QuantizationProblem(
    rot=RotationParams(alpha=alpha, phase_offset=0.0),
    level_count=48,
    rhs_offset=0.0,
    tolerance=1e-10,
    max_iterations=200,
    initial=InitialSpec(mode="power", scale=1.0, exponent=exponent),
    use_tail=True,
    tail_window=12,
    tail_exponent=exponent,
)
product, report = run_scheme(problem)
print(f"product ready: {len(product.zeros)} zeros, "
      f"residual {report.final_residual:.2e}")

rot = problem.rot

# origin values are forced by f(0) = 1 alone
c0 = stokes_C(product, rot, 0.0)
d0 = stokes_D(product, rot, 0.0)
print(f"C(0) = {c0:.12f}   (expect 2)")
print(f"D(0) = {d0:.12f}   (expect 3)")

# the identity holds wherever the evaluation is well conditioned
rng = np.random.default_rng(7)
E8 = product.zeros[7]
pts = E8 * (0.05 + 0.5 * rng.random(12)) * np.exp(1j * np.pi * (2 * rng.random(12) - 1) * 0.45)
worst_id = max(identity_residual(product, rot, z, which="plain") for z in pts)
print(f"functional identity, worst of 12 random points: {worst_id:.2e}")

# two routes to D: compose C at rotated arguments, or take the ratio of
# four product values directly
worst_route = 0.0
for z in pts:
    a = stokes_D(product, rot, z, route="via-C")
    b = stokes_D(product, rot, z, route="via-f")
    worst_route = max(worst_route, abs(a - b) / max(1.0, abs(a)))
print(f"route agreement via-C vs via-f:            {worst_route:.2e}")

# D on the positive axis stays above 3: D + 1 is a square plus a cross
# term that cannot dip below 4 when k = 1
fn_d = SpectralFunction(product, rot, kind="D")
xs = np.linspace(0.0, 2.0 * E8, 40)
dmin = min(fn_d(x).real + 1.0 for x in xs)
print(f"min of D(x) + 1 on [0, 2 E_8]: {dmin:.6f}  (bound is 4)")

# full clause report on the located zeros of C and D
print()
print("reality clauses:")
rep = verify_proposition(product, rot)
for name, clause in rep.clauses.items():
    extra = f"  margin {clause.margin:.2e}" if not math.isnan(clause.margin) else ""
    print(f"  {name:28s} {clause.status}{extra}")
print(f"all passed: {rep.all_passed}")
print(f"C zeros found in window: {len(rep.c_zeros)}; "
      f"D zeros: {len(rep.d_zeros)}; all real: "
      f"{rep.c_zeros.all_real and rep.d_zeros.all_real}")
