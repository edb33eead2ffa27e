"""Jensen functions, mean motions, and zero-free strips.

phi_E(sigma) is the time average of log|E(sigma + it)|.  It is convex;
where it is affine with slope -log n the strip is zero-free, and jumps
of its derivative measure the density of zeros — the bridge between
zero counting and almost-periodicity.
"""

import math

from epzeta import (
    QuadForm,
    EpsteinEvaluator,
    Rectangle,
    detect_linearity,
    jensen_profile,
    jensen_time_average,
    jensen_torus,
    winding_count,
    zero_frequency,
)
from epzeta.jensen import TruncatedEpstein, convexity_margins
from epzeta.randmodel import TorusModel

Q1 = QuadForm(1, 0, 5)
Q2 = QuadForm(2, 2, 3)

# -- the sigma-large law -----------------------------------------------------

# for large sigma, E is dominated by its first Dirichlet term a_{n0} n0^{-s};
# phi becomes the affine function -(log n0) sigma + log|a_{n0}|
for Q, n0 in ((Q1, 1), (Q2, 2)):
    ev = EpsteinEvaluator(Q)
    v, e = jensen_time_average(ev, 8.0, 100.0, step=0.05)
    law = -math.log(n0) * 8.0 + math.log(2.0)
    print(f"phi_{Q}(8) = {v:+.6f}   law {law:+.6f}   diff {abs(v - law):.1e}")

# -- profile, linearity, zero frequency --------------------------------------

ev2 = EpsteinEvaluator(Q2)
prof = jensen_profile(ev2, 5.0, 6.0, 150.0, spacing=0.05, step=0.05)
rep = detect_linearity(prof)
print("\nQ2 on (5, 6):")
for (lo, hi, slope), n in zip(rep.intervals, rep.slope_match):
    print(f"  linear on ({lo:.2f}, {hi:.2f}), slope {slope:+.5f}"
          f"  ~ -log {n}")
    print("  winding count in that strip up to T = 200:",
          winding_count(ev2, Rectangle(lo, hi, 0.0, 200.0)))
freq, ferr = zero_frequency(prof, 5.2, 5.8)
print(f"  zero frequency on (5.2, 5.8): {freq:.2e} +- {ferr:.1e}")
print(f"  convexity margin (min, must be >= 0): "
      f"{convexity_margins(prof).min():.2e}")

# -- torus averages for truncations ------------------------------------------

# for the n-prime truncation E_n the time average equals a torus integral
# (the orbit t -> (-t log p / 2pi) equidistributes); QMC computes it fast
m = TorusModel(Q1, 4, 1.5)
tv, te = jensen_torus(m)
tr = TruncatedEpstein(Q1, 4)
ta, tae = jensen_time_average(tr, 1.5, 5000.0, step=0.02)
print(f"\nphi_(E_4)(1.5): torus {tv:.6f} +- {te:.1e}"
      f" | time average {ta:.6f} +- {tae:.1e}")
