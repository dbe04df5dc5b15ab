"""
Secant dimensions and k_C
=========================

Over C, k queries suffice exactly when the k-th secant of the Veronese
variety fills C^J. Its dimension is read off as the rank of a random
tangent matrix over a large prime field.
"""
from math import comb

from polyquery.secant import SecantInstance, compute_kc, kc_formula, secant_dim

for n, d, k in [(1, 3, 2), (2, 2, 2), (2, 4, 5), (4, 3, 7)]:
    rep = secant_dim(SecantInstance(n, d, k), rng=0)
    print(f"(n,d,k)=({n},{d},{k}): dim {rep.observed_dim} of {comb(n + d, d)}, expected {rep.expected_dim}")

# the four defective pairs need one query more than the naive count
print(" n d  naive  k_C")
for n, d in [(2, 3), (4, 3), (2, 4), (3, 4), (4, 4)]:
    naive = -(-comb(n + d, d) // (n + 1))
    print(f" {n} {d}  {naive:5d}  {compute_kc(n, d, rng=1):3d} (formula {kc_formula(n, d)})")
