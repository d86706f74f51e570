"""Fractional degree, broken reality: a complex-conjugate eigenvalue pair.

For integer degree the second-level spectrum is real.  Push the degree
to m = 2.5 and reality fails in the mildest possible way: eigenvalues
leave the axis in conjugate pairs, because the determinant still obeys
conj(D0(lam)) = D0(conj(lam)).  The run below is oracle-only, no
quantization scheme involved: the search box is swept for zeros of D0
and every hit is confirmed by direct evaluation.
"""

import numpy as np

from specquant import ODEProblem, pt_eigenvalues, stokes_D0

prob = ODEProblem(m=2.5, ell=2)

print("sweeping the box Re in (0, 12), Im in (-4, 4) for D0 zeros...")
spec = pt_eigenvalues(prob, 3, complex_window=((0.0, 12.0), (-4.0, 4.0)))

for v, is_real in zip(spec.values, spec.reality):
    tag = "real" if is_real else "complex"
    print(f"  {v.real:10.6f} {v.imag:+10.6f}j   [{tag}]")

# pick out the conjugate pair
pair = [v for v in spec.values if abs(v.imag) > 1e-3]
assert len(pair) >= 2, "expected an off-axis pair in this box"
v = max(pair, key=lambda z: z.imag)
w = min(pair, key=lambda z: z.imag)
mismatch = abs(w - np.conj(v)) / abs(v)
print()
print(f"pair symmetry |lower - conj(upper)| / |upper| = {mismatch:.2e}")

# the Schwarz reflection that forces pairs: |D0(conj lam)| = |D0(lam)|
# at the eigenvalue, near it, and at a generic off-axis point
for lam in (v, 0.4 * v, 2.0 + 1.0j):
    a = abs(stokes_D0(prob, np.conj(lam)))
    b = abs(stokes_D0(prob, lam))
    rel = abs(a - b) / max(1.0, b)
    print(f"modulus symmetry at {lam:.4f}: {rel:.2e}")

print()
print("reality is not destroyed, it is complexified: the pair is a")
print("single level that split off the axis while its determinant")
print("kept the conjugation symmetry")
