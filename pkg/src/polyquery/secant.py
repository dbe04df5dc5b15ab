"""Secant varieties of Veronese varieties and the generic query count k_C.

Dimensions are affine-cone dimensions throughout: the k-th secant of the
degree-d Veronese of P^n is compared with C(n+d, d), not C(n+d, d) - 1.

The observed dimension is the rank, over a large prime field, of the
tangent matrix spanned by l_i^(d-1) * x_m at k random points l_i (Terracini).
A bad draw can only lower the rank, so the maximum over trials is kept.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import ceil, comb, factorial

import numpy as np

from ._workers import pmap
from .errors import SizeCap, ZeroPoint
from .ffield import is_prime
from .monomial import homogeneous_exponents

DEFAULT_PRIME = 2_147_483_647
DEFAULT_TRIALS = 3
COLUMN_CAP = 10**4

# (n, d) pairs for which k_C exceeds ceil(J / (n + 1)) by one.
KC_EXCEPTIONS = ((4, 3), (2, 4), (3, 4), (4, 4))
# Defective secants, listed in (d, n, k) order as in the classical theorem.
AH_DEFECTIVE_DNK = ((3, 4, 7), (4, 2, 5), (4, 3, 9), (4, 4, 14))


@dataclass(frozen=True)
class SecantInstance:
    n: int
    d: int
    k: int
    prime: int = DEFAULT_PRIME
    trials: int = DEFAULT_TRIALS

    def __post_init__(self):
        if not is_prime(self.prime) or self.prime <= 10**6:
            raise ValueError(f"work prime must be a prime > 10^6, got {self.prime}")
        if self.prime >= 2**31:
            raise ValueError("work prime must be < 2^31 so products fit in int64")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass(frozen=True)
class DimReport:
    n: int
    d: int
    k: int
    observed_dim: int
    expected_dim: int
    trial_dims: tuple

    @property
    def matches(self):
        return self.observed_dim == self.expected_dim

    def row(self):
        return {
            "n": self.n, "d": self.d, "k": self.k,
            "expected_dim": self.expected_dim, "observed_dim": self.observed_dim,
            "match": self.matches,
        }


def rank_mod_p(M, prime=DEFAULT_PRIME):
    """Exact rank of an integer matrix over F_prime (prime < 2^31)."""
    A = np.array(M, dtype=np.int64) % prime
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, prime) % prime
        below = r + 1 + np.flatnonzero(A[r + 1 :, c])
        if below.size:
            A[below] = (A[below] - A[below, c][:, None] * A[r][None, :]) % prime
        r += 1
    return r


def _multinomial(exps):
    out = factorial(sum(exps))
    for e in exps:
        out //= factorial(e)
    return out


def tangent_matrix(points, d, prime=DEFAULT_PRIME):
    """Rows: coefficients of l_i^(d-1) * x_m in the degree-d monomial basis.

    ``points`` has shape (k, n+1). Result has shape (k*(n+1), C(n+d, d)).
    """
    pts = np.array(points, dtype=np.int64) % prime
    if pts.ndim != 2:
        raise ValueError("points must be a (k, n+1) array")
    if np.any(np.all(pts == 0, axis=1)):
        raise ZeroPoint("tangent matrix needs nonzero points")
    k, nv = pts.shape
    cols = homogeneous_exponents(nv, d)
    col_of = {e: i for i, e in enumerate(cols)}
    low = homogeneous_exponents(nv, d - 1)
    low_arr = np.array(low, dtype=np.int64).reshape(-1, nv)
    coef = np.array([_multinomial(a) % prime for a in low], dtype=np.int64)
    # l^a for every point and every degree-(d-1) exponent a
    pw = np.ones((k, nv, d), dtype=np.int64)
    for e in range(1, d):
        pw[:, :, e] = pw[:, :, e - 1] * pts % prime
    mono = np.ones((k, len(low)), dtype=np.int64)
    for v in range(nv):
        mono = mono * pw[:, v, :][:, low_arr[:, v]] % prime
    mono = mono * coef % prime
    M = np.zeros((k * nv, len(cols)), dtype=np.int64)
    for m in range(nv):
        shifted = [col_of[a[:m] + (a[m] + 1,) + a[m + 1 :]] for a in low]
        M[m::nv][:, shifted] = mono
    return M


def expected_dim(n, d, k):
    """Affine-cone dimension of the k-th secant of the degree-d Veronese of P^n."""
    J = comb(n + d, d)
    if (d, n, k) in AH_DEFECTIVE_DNK:
        return J - 1
    if d == 2 and 2 <= k <= n:
        return k * (n + 1) - k * (k - 1) // 2
    return min(k * (n + 1), J)


def _trial_rank(args):
    n, d, k, prime, seed = args
    rng = np.random.default_rng(seed)
    pts = rng.integers(1, prime, size=(k, n + 1))
    return rank_mod_p(tangent_matrix(pts, d, prime), prime)


def secant_dim(inst, rng=None):
    """Observed vs expected dimension for one instance."""
    J = comb(inst.n + inst.d, inst.d)
    if J > COLUMN_CAP:
        raise SizeCap(f"C(n+d, d) = {J} exceeds column cap {COLUMN_CAP}")
    rng = np.random.default_rng(rng)
    seeds = rng.integers(0, 2**63 - 1, size=inst.trials)
    dims = tuple(pmap(_trial_rank, [(inst.n, inst.d, inst.k, inst.prime, int(s)) for s in seeds]))
    return DimReport(inst.n, inst.d, inst.k, max(dims), expected_dim(inst.n, inst.d, inst.k), dims)


def kc_formula(n, d):
    """Closed-form minimal k whose secant fills C^J."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    if d == 1:
        return 1
    if d == 2 and n >= 2:
        return n + 1
    base = ceil(comb(n + d, d) / (n + 1))
    if (n, d) in KC_EXCEPTIONS:
        return base + 1
    return base


def compute_kc(n, d, rng=None, prime=DEFAULT_PRIME, trials=DEFAULT_TRIALS):
    """Smallest k with observed secant dimension C(n+d, d), by rank scans."""
    J = comb(n + d, d)
    rng = np.random.default_rng(rng)

    def full(k):
        return secant_dim(SecantInstance(n, d, k, prime, trials), rng).observed_dim == J

    k = max(1, ceil(J / (n + 1)))
    if full(k):
        while k > 1 and full(k - 1):
            k -= 1
        return k
    while not full(k):
        k += 1
    return k


def exceptional_lists_consistent():
    """Cross-check the (n, d) exception list against the defective triples.

    Returns a list of human-readable mismatches (empty when consistent).
    """
    problems = []
    from_triples = {(n, d) for d, n, _ in AH_DEFECTIVE_DNK}
    if from_triples != set(KC_EXCEPTIONS):
        problems.append(f"pair sets differ: {sorted(from_triples)} vs {sorted(KC_EXCEPTIONS)}")
    for d, n, k in AH_DEFECTIVE_DNK:
        if k != ceil(comb(n + d, d) / (n + 1)):
            problems.append(f"defective k={k} at (n,d)=({n},{d}) is not ceil(J/(n+1))")
    return problems


def sweep(nmax, dmax, rng=None, kmax=None, prime=DEFAULT_PRIME, trials=DEFAULT_TRIALS):
    """DimReports for 1<=n<=nmax, 1<=d<=dmax, 1<=k<=kmax (default k_C(n, d))."""
    rng = np.random.default_rng(rng)
    out = []
    for n in range(1, nmax + 1):
        for d in range(1, dmax + 1):
            top = kc_formula(n, d) if kmax is None else kmax
            for k in range(1, top + 1):
                out.append(secant_dim(SecantInstance(n, d, k, prime, trials), rng))
    return out


def sweep_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "d", "k", "expected_dim", "observed_dim", "match"])
    for r in reports:
        w.writerow([r.n, r.d, r.k, r.expected_dim, r.observed_dim, int(r.matches)])
    return buf.getvalue()
