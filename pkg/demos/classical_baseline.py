"""
Classical interpolation needs all J samples
===========================================
"""
from math import comb

import numpy as np

from polyquery import ff_make
from polyquery.classical import interpolate, sample, sample_full_rank_points
from polyquery.errors import SingularSystem

rng = np.random.default_rng(0)
f = ff_make(7)
n, d = 2, 2
J = comb(n + d, d)

c = rng.integers(0, 7, J)
pts = sample_full_rank_points(f, n, d, rng)
print("secret:   ", c)
print("recovered:", interpolate(sample(c, pts, n, d, f), n, d, f))

try:
    interpolate(sample(c, pts[:-1], n, d, f), n, d, f)
except SingularSystem as exc:
    print(f"with {J - 1} points:", exc)

# the real case runs through a residual-checked solve
c = rng.standard_normal(J)
pts = sample_full_rank_points(None, n, d, rng)
print("real max error:", np.abs(interpolate(sample(c, pts, n, d), n, d) - c).max())
