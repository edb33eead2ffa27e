"""Evaluating E(s, Q): oracles, the fast route, and the functional equation.

E(s, Q) = sum over nonzero lattice points of Q(m, n)^{-s}.  The fast
evaluator uses the Hecke decomposition (a product/sum of Dirichlet
L-functions when every character is real) or a Bessel-sum expansion,
and is checked here against two independent oracles.
"""

import numpy as np

from epzeta import QuadForm, EpsteinEvaluator, eval_lattice_oracle, eval_theta_oracle
from epzeta.epstein import fe_relative_residual

Q1 = QuadForm(1, 0, 5)
Q2 = QuadForm(2, 2, 3)
ev = EpsteinEvaluator(Q1)

# -- oracle agreement --------------------------------------------------------

s = 2.0 + 3.0j
fast = ev.value(s)
lat, tail = eval_lattice_oracle(Q1, s, radius=800)
theta = eval_theta_oracle(Q1, s)
print(f"E({s}, Q1)")
print(f"  fast evaluator : {fast}")
print(f"  lattice oracle : {lat}   (tail bound {tail:.1e})")
print(f"  theta oracle   : {theta}")
print(f"  |fast - theta| : {abs(fast - theta):.2e}")

# -- special values ----------------------------------------------------------

print(f"\nresidue at s = 1: {ev.residue:.12f}  (= 2 pi / sqrt(20))")
print(f"E(0, Q1) = {ev.value(1e-12).real:+.9f}     (analytic value -1)")
print(f"E(-1, Q1) = {ev.value(-1.0 + 0j):.3e}  (trivial zero)")

# -- functional equation -----------------------------------------------------

# Lambda(s) = (sqrt|D|/2pi)^s Gamma(s) E(s, Q) satisfies Lambda(s) = Lambda(1-s)
print("\nfunctional-equation relative residuals:")
for s in (0.3 + 7j, -0.5 + 21j, 1.7 + 53j, 0.9 + 150j):
    r1 = fe_relative_residual(Q1, s)
    r2 = fe_relative_residual(Q2, s)
    print(f"  s = {s}:  Q1 {r1:.2e}   Q2 {r2:.2e}")

# -- vectorized evaluation along a line --------------------------------------

t = np.linspace(1.0, 40.0, 400)
vals = ev.values(0.75 + 1j * t)
print(f"\nmin |E(0.75 + it)| on t in [1, 40]: {np.abs(vals).min():.4f}"
      f" at t = {t[np.argmin(np.abs(vals))]:.2f}")
