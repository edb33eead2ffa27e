"""Class groups of binary quadratic forms: reduction, composition, characters.

Walks through the exact arithmetic layer for the two discriminants used
throughout: D = -20 (class number 2, the Davenport-Heilbronn setting)
and D = -23 (class number 3, the smallest non-abelian-genus case).
"""

from epzeta import (
    QuadForm,
    build_class_group,
    characters,
    classify_prime,
    epstein_coefficients,
    reduce_form,
)

# -- reduction ---------------------------------------------------------------

Q = QuadForm(12, 34, 25)  # equivalent to x^2 + 5 y^2
print("reduce_form(12, 34, 25) =", reduce_form(Q))

# -- the class group of D = -20 ---------------------------------------------

g = build_class_group(-20)
print(f"\nD = -20: h = {g.h}, w = {g.w}, structure = {g.structure}")
print("reduced classes:", g.classes)
print("composition table:")
for row in g.composition_table:
    print("   ", row)

# the characters separate the two classes
for ch in characters(g):
    print("character values:", [complex(v) for v in ch.values])

# Epstein coefficients: E(s, Q_C) = sum_j a_j(C) L(s, chi_j)
for Q in g.classes:
    co = epstein_coefficients(g, Q)
    print(f"a({Q}) = {co.a_list}")

# -- split primes ------------------------------------------------------------

# split primes fall in the class representing them; frequencies -> 1/h
print("\nsmall primes in D = -20:")
for p in (2, 3, 5, 7, 11, 13, 23, 29):
    loc = classify_prime(g, p)
    print(f"  p = {p:3d}: {loc.split_type.name:9s} class {loc.class_index}")

# -- D = -23 -----------------------------------------------------------------

g23 = build_class_group(-23)
print(f"\nD = -23: h = {g23.h}, classes = {g23.classes}")
for Q in g23.classes:
    co = epstein_coefficients(g23, Q)
    print(f"a({Q}) = {co.a_list}  (J = {co.J} after conjugate merging)")
