"""The Hecke decomposition E(s, Q_C) = (w/h) -free form: sum_j a_j L(s, chi_j).

The representation numbers of each class are finite linear combinations
of multiplicative coefficients b_m(chi); summing them recovers E as a
linear combination of Hecke L-functions, which is what every analytic
statement downstream (zeros, Jensen functions, the torus model) uses.
"""

import numpy as np

from epzeta import QuadForm, build_class_group, characters, epstein_coefficients
from epzeta.lfunc import (
    HeckeFamily,
    LSeries,
    TruncatedEuler,
    decomposition_residual,
    rep_count_oracle,
)

g = build_class_group(-20)
Q1, Q2 = g.classes

# -- representation numbers as character sums --------------------------------

co = epstein_coefficients(g, Q1)
bs = [LSeries(g, ch).coefficients(30) for ch in co.chars]
print("m, r_Q1(m), sum_j a_j b_m(chi_j):")
for m in (1, 3, 4, 5, 6, 7, 9, 21):
    pred = sum(aj * b[m] for aj, b in zip(co.a_list, bs))
    print(f"  {m:3d}  {rep_count_oracle(Q1, m):3d}  {pred:6.1f}")

# -- the decomposition identity at complex s ---------------------------------

rng = np.random.default_rng(1)
ss = rng.uniform(0.6, 3.0, 5) + 1j * rng.uniform(-40, 40, 5)
for Q in (Q1, Q2):
    res = decomposition_residual(g, Q, ss)
    print(f"\nmax |E(s, {Q}) - sum a_j L| over 5 random s: {res.max():.2e}")

# -- L-functions from orthogonality ------------------------------------------

# h L(s, chi) = sum_C conj(chi)(C) E(s, Q_C): each L is a finite linear
# combination of Epstein values, no new machinery needed
fam = HeckeFamily(g)
ch0, ch1 = characters(g)
s = np.array([2.0 + 5.0j])
print("\nL(2+5i, chi_0) =", complex(fam.eval_L(ch0, s)[0]))
print("L(2+5i, chi_1) =", complex(fam.eval_L(ch1, s)[0]))

# -- truncated Euler products ------------------------------------------------

# L_n keeps the first n rational primes; the mean-square truncation error
# on a vertical line decays like n^{1-2 sigma}
for n in (5, 20, 60):
    tr = TruncatedEuler(g, ch1, n)
    full = complex(fam.eval_L(ch1, np.array([1.2 + 9j]))[0])
    trunc = complex(tr.eval(np.array([1.2 + 9j]))[0])
    print(f"n = {n:3d}: |L - L_n|(1.2 + 9i) = {abs(full - trunc):.2e}")
