"""
Real versus complex ranks
=========================

A random complex cubic in one variable is a sum of two cubes of linear
forms. Over the reals only about half are, and three terms are needed for
the rest. Membership is decided by a multi-start least-squares fit.
"""
from polyquery.waring import MCConfig, typical_rank_mc

for field, k in [("complex", 2), ("real", 2), ("real", 3)]:
    res = typical_rank_mc(1, 3, k, MCConfig(samples=200, seed=1, field=field))
    print(f"{field:7s} k={k}: {res.fraction:.3f}  95% CI [{res.ci_low:.3f}, {res.ci_high:.3f}]")

# bivariate quadratics: two terms never suffice, three always do
for k in (2, 3):
    res = typical_rank_mc(2, 2, k, MCConfig(samples=100, seed=1))
    print(f"n=2 d=2 k={k}: {res.fraction:.3f}")
