"""
How fast does R_k fill F_q^J?
=============================

R_k is the set of phase vectors reachable with k parallel queries. The
quantum algorithm succeeds with probability |R_k| / q^J, so the ratio below
is the success probability itself.
"""
from polyquery import ff_make
from polyquery.zmap import range_ratio, range_sequence

# univariate cubics: J = 4
print("n=1, d=3")
for q in (5, 7, 11, 13):
    seq = range_sequence(ff_make(q), 1, 3, 3)
    print(f"  q={q:2d}", "  ".join(f"k={k}: {range_ratio(seq[k])[1]:.4f}" for k in (1, 2, 3)))

# two nodes can only be F_q-rational, so k=2 stalls near 1/2 and k=3 is needed
# for a probability that tends to one

# bivariate quadratics: J = 6, and three queries are enough
print("n=2, d=2")
for q in (3, 5, 7):
    seq = range_sequence(ff_make(q), 2, 2, 3)
    print(f"  q={q}", "  ".join(f"k={k}: {range_ratio(seq[k])[1]:.4f}" for k in (1, 2, 3)))

# every z in the range has one canonical preimage (x, y)
rs = seq[2]
z = rs.components[len(rs) // 2]
print("z =", z.tolist(), "comes from", rs.rep(z))
