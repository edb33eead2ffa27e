"""Argument-principle zero counting and the Davenport-Heilbronn phenomenon.

E(s, Q) for a class number h > 1 is a sum of L-functions, not an Euler
product: it has zeros off the critical line, and even zeros with
Re s > 1.  Winding numbers over rectangle boundaries count them exactly;
Newton refinement plus a certification circle pins each one down.
"""

from epzeta import (
    QuadForm,
    EpsteinEvaluator,
    Rectangle,
    count_strip,
    domination_abscissa,
    find_zeros,
    max_real_part,
    winding_count,
)
from epzeta.zeros import first_zero_right_of

Q1 = QuadForm(1, 0, 5)
ev = EpsteinEvaluator(Q1)

# -- all zeros of E(s, Q1) with 0 < t < 30 -----------------------------------

recs, total, minmod, _ = find_zeros(ev, Rectangle(-1.0, 2.0, 0.1, 30.0))
print(f"zeros with 0.1 < t < 30: winding count {total}, refined {len(recs)}")
for r in sorted(recs, key=lambda r: r.location.imag):
    z = r.location
    tag = "" if abs(z.real - 0.5) < 1e-9 else "   <- off the line"
    print(f"  {z.real:.6f} + {z.imag:.6f} i   residual {r.residual:.1e}{tag}")

# -- strip counts ------------------------------------------------------------

sc = count_strip(ev, 0.6, 0.9, 100.0)
print(f"\nzeros in (0.6, 0.9) up to T = 100: {sc.winding_count}")
print(f"boundary minimum modulus: {sc.boundary_min_modulus:.2e}")

# -- sigma(Q): how far right do zeros reach? ---------------------------------

sd = domination_abscissa(Q1)
print(f"\ndomination abscissa (no zeros right of): {sd:.4f}")
print("winding in (sd, sd+1) x (0, 200):",
      winding_count(ev, Rectangle(sd, sd + 1.0, 0.0, 200.0)))
print(f"max Re of certified zeros below T = 30: {max_real_part(Q1, 30.0):.6f}")

# a zero beyond sigma = 1 exists (here near t ~ 1194); searching upward
# in slabs finds and certifies the first one
rec = first_zero_right_of(ev, 1.0 + 1e-3, 1300.0, window=25.0, sigma2=sd)
print(f"\nfirst zero with Re s > 1: {rec.location}  (certified={rec.certified})")
