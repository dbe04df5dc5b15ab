"""The query-phase map Z and exact enumeration of its range R_k.

For k queries at points x_i in F_q^n with multipliers y_i,

    Z(x, y)_j = sum_i y_i * x_i^j,    j in exponents(n, d),

so the phase generated by the queries is e(Z(x, y) . c). The range R_k is
enumerated exactly, together with a canonical preimage for each element.

Encodings
---------
* A range element z in F_q^J is keyed by ``sum_j enc(z_j) * q**j`` (component
  j is base-q digit j). Keys are int64, so q^J must stay below 2^63.
* A query (x_i, y_i) is the base-q number with digits x_i1, ..., x_im, y_i,
  the first digit most significant. A tuple of k queries is the base-q^(m+1)
  number whose most significant digit is query 1. The canonical
  representative of z is the preimage with the smallest tuple code.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

from . import monomial
from ._workers import pmap
from .errors import DimensionMismatch, SizeCap, WorkCapExceeded
from .ffield import FieldParams, ff_make

WORK_CAP = 10**10
_INT64_LIMIT = 2**63 - 1
_DENSE_LIMIT = 2**24
_CHUNK = 2**17

VARIANTS = ("affine", "restricted", "homogeneous")


@dataclass(frozen=True)
class QueryTuple:
    """k query points ``xs`` (each a tuple of encodings) and multipliers ``ys``."""

    xs: tuple
    ys: tuple

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(tuple(int(v) for v in x) for x in self.xs))
        object.__setattr__(self, "ys", tuple(int(v) for v in self.ys))
        if len(self.xs) != len(self.ys):
            raise DimensionMismatch("xs and ys must have the same length")
        if len({len(x) for x in self.xs}) > 1:
            raise DimensionMismatch("all points must have the same dimension")

    @property
    def k(self):
        return len(self.ys)


def encode_tuple(t, q):
    code = 0
    for x, y in zip(t.xs, t.ys):
        for digit in (*x, y):
            code = code * q + digit
    return code


def decode_tuple(code, k, m, q):
    digits = []
    for _ in range(k * (m + 1)):
        code, dgt = divmod(int(code), q)
        digits.append(dgt)
    digits.reverse()
    xs, ys = [], []
    for i in range(k):
        block = digits[i * (m + 1) : (i + 1) * (m + 1)]
        xs.append(tuple(block[:m]))
        ys.append(block[m])
    return QueryTuple(tuple(xs), tuple(ys))


def _point_vectors(x, n, d, field, variant):
    """Veronese-type images of points ``x`` (shape (..., m))."""
    if variant == "homogeneous":
        vec = monomial.eval_veronese_homogeneous(x, n + 1, d, field)
        # reorder homogeneous monomials so that x^j x_{n+1}^(d-|j|) sits at j
        return vec[..., monomial.homogenize_index(n, d)]
    return monomial.eval_veronese(x, n, d, field)


def _dims(n, variant):
    return n + 1 if variant == "homogeneous" else n


def z_eval(t, n, d, field, variant="affine"):
    """Z(x, y) as an array of J encodings."""
    m = _dims(n, variant)
    xs = np.array(t.xs, dtype=np.int64).reshape(len(t.ys), m)
    ys = np.array(t.ys, dtype=np.int64)
    J = monomial.num_monomials(n, d)
    if len(ys) == 0:
        return np.zeros(J, dtype=np.int64)
    terms = field.mul(ys[:, None], _point_vectors(xs, n, d, field, variant))
    acc = np.zeros(J, dtype=np.int64)
    for row in terms:
        acc = field.add(acc, row).astype(np.int64)
    return acc


@dataclass(eq=False)
class RangeSet:
    """R_k as sorted int64 keys with aligned canonical representative codes."""

    field: FieldParams
    n: int
    d: int
    k: int
    keys: np.ndarray
    reps: np.ndarray
    strategy: str = "exhaustive"
    variant: str = "affine"
    meta: dict = dc_field(default_factory=dict)

    @property
    def J(self):
        return monomial.num_monomials(self.n, self.d)

    @property
    def q(self):
        return self.field.q

    @property
    def size(self):
        return int(self.keys.size)

    @property
    def m(self):
        return _dims(self.n, self.variant)

    def __len__(self):
        return self.size

    @cached_property
    def components(self):
        """(size, J) array of component encodings of every element."""
        return _keys_to_components(self.keys, self.q, self.J)

    @cached_property
    def digits(self):
        """(size, r*J) array of base-p digits; digit j*r + t is coeff t of z_j."""
        f = self.field
        if f.r == 1:
            return self.components
        return f.digits[self.components].reshape(self.size, self.J * f.r).astype(np.uint8)

    @cached_property
    def digits_float(self):
        """``digits`` as float32; products with trace weights stay exact."""
        return self.digits.astype(np.float32)

    def key_of(self, z):
        z = np.asarray(z, dtype=np.int64)
        return int(np.dot(z, self.q ** np.arange(self.J, dtype=object)))

    def contains(self, z):
        key = self.key_of(z)
        i = np.searchsorted(self.keys, key)
        return bool(i < self.size and self.keys[i] == key)

    def rep(self, z):
        """Canonical preimage of ``z`` as a :class:`QueryTuple`."""
        key = self.key_of(z)
        i = int(np.searchsorted(self.keys, key))
        if i >= self.size or self.keys[i] != key:
            raise KeyError(f"{list(z)} is not in R_{self.k}")
        return decode_tuple(int(self.reps[i]), self.k, self.m, self.q)

    def rep_tuples(self):
        return [decode_tuple(int(r), self.k, self.m, self.q) for r in self.reps]

    def sidecar(self):
        return {
            "p": self.field.p,
            "r": self.field.r,
            "modulus": list(self.field.modulus),
            "n": self.n,
            "d": self.d,
            "k": self.k,
            "J": self.J,
            "size": self.size,
            "strategy": self.strategy,
            "variant": self.variant,
        }


def _keys_to_components(keys, q, J):
    keys = np.asarray(keys, dtype=np.int64)
    dtype = np.uint8 if q <= 256 else np.int64
    out = np.empty((keys.size, J), dtype=dtype)
    rest = keys.copy()
    for j in range(J):
        rest, out[:, j] = np.divmod(rest, q)
    return out


def _place_values(q, J):
    if q**J > _INT64_LIMIT:
        raise SizeCap(f"q^J = {q}^{J} does not fit a 63-bit key")
    return q ** np.arange(J, dtype=np.int64)


def _merge_min(keys_a, reps_a, keys_b, reps_b):
    """Union of two keyed sets keeping the smallest representative per key."""
    keys = np.concatenate([keys_a, keys_b])
    reps = np.concatenate([reps_a, reps_b])
    order = np.lexsort((reps, keys))
    keys, reps = keys[order], reps[order]
    first = np.ones(keys.size, dtype=bool)
    first[1:] = keys[1:] != keys[:-1]
    return keys[first], reps[first]


def _zero_range(field, n, d, variant):
    return RangeSet(
        field, n, d, 0, np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64),
        "exhaustive", variant,
    )


def _exhaustive_chunk(args):
    field, n, d, k, variant, start, stop = args
    q = field.q
    m = _dims(n, variant)
    J = monomial.num_monomials(n, d)
    codes = np.arange(start, stop, dtype=np.int64)
    width = k * (m + 1)
    digits = np.empty((codes.size, width), dtype=np.int64)
    rest = codes.copy()
    for pos in range(width - 1, -1, -1):
        rest, digits[:, pos] = np.divmod(rest, q)
    digits = digits.reshape(codes.size, k, m + 1)
    xs, ys = digits[:, :, :m], digits[:, :, m]
    if variant == "restricted":
        keep = np.all(xs != 0, axis=(1, 2))
        codes, xs, ys = codes[keep], xs[keep], ys[keep]
    vec = _point_vectors(xs, n, d, field, variant)
    terms = field.mul(ys[:, :, None], vec)
    acc = terms[:, 0, :].astype(np.int64)
    for i in range(1, k):
        acc = field.add(acc, terms[:, i, :]).astype(np.int64)
    keys = acc @ _place_values(q, J)
    # codes ascend, so the first occurrence of each key is its canonical rep
    uniq, first = np.unique(keys, return_index=True)
    return uniq, codes[first]


def _exhaustive(field, n, d, k, variant, work_cap):
    q = field.q
    m = _dims(n, variant)
    J = monomial.num_monomials(n, d)
    total = q ** (k * (m + 1))
    if total * J > work_cap:
        raise WorkCapExceeded(total * J, work_cap, "exhaustive enumeration")
    if total > _INT64_LIMIT:
        raise SizeCap("tuple codes do not fit 63 bits")
    _place_values(q, J)
    bounds = list(range(0, total, _CHUNK)) + [total]
    jobs = [(field, n, d, k, variant, a, b) for a, b in zip(bounds[:-1], bounds[1:])]
    keys = np.zeros(0, dtype=np.int64)
    reps = np.zeros(0, dtype=np.int64)
    for ck, cr in pmap(_exhaustive_chunk, jobs):
        keys, reps = _merge_min(keys, reps, ck, cr)
    return RangeSet(field, n, d, k, keys, reps, "exhaustive", variant)


def range_sumset(prev, base, work_cap=WORK_CAP):
    """R_k from R_(k-1) and R_1: all sums a + b, reps concatenated (a first)."""
    if (prev.field, prev.n, prev.d, prev.variant) != (base.field, base.n, base.d, base.variant):
        raise DimensionMismatch("prev and base describe different instances")
    if base.k != 1:
        raise DimensionMismatch("base must be the k = 1 range")
    field, q, J = prev.field, prev.q, prev.J
    cost = prev.size * base.size * J
    if cost > work_cap:
        raise WorkCapExceeded(cost, work_cap, f"sumset step to k={prev.k + 1}")
    Q = q ** (prev.m + 1)
    if Q ** (prev.k + 1) > _INT64_LIMIT:
        raise SizeCap("representative codes do not fit 63 bits")
    place = _place_values(q, J)
    add = field.add_table
    a_comp = prev.components
    shifted = prev.reps * Q
    b_comp = base.components

    dense = q**J <= _DENSE_LIMIT
    if dense:
        best = np.full(q**J, _INT64_LIMIT, dtype=np.int64)
    else:
        keys = np.zeros(0, dtype=np.int64)
        reps = np.zeros(0, dtype=np.int64)
        pend_k, pend_r, pending = [], [], 0

    for bi in range(base.size):
        bc = b_comp[bi]
        cand = np.zeros(prev.size, dtype=np.int64)
        for j in range(J):
            cand += add[a_comp[:, j], bc[j]].astype(np.int64) * place[j]
        cand_rep = shifted + base.reps[bi]
        if dense:
            # a -> a + b is injective, so keys within one batch are distinct
            best[cand] = np.minimum(best[cand], cand_rep)
        else:
            pend_k.append(cand)
            pend_r.append(cand_rep)
            pending += cand.size
            if pending > 2**22 or bi == base.size - 1:
                keys, reps = _merge_min(keys, reps, np.concatenate(pend_k), np.concatenate(pend_r))
                pend_k, pend_r, pending = [], [], 0

    if dense:
        keys = np.flatnonzero(best != _INT64_LIMIT).astype(np.int64)
        reps = best[keys]
    return RangeSet(field, prev.n, prev.d, prev.k + 1, keys, reps, "sumset", prev.variant)


def range_sequence(field, n, d, kmax, strategy="sumset", variant="affine", work_cap=WORK_CAP):
    """[R_0, R_1, ..., R_kmax]."""
    out = [_zero_range(field, n, d, variant)]
    if kmax == 0:
        return out
    base = _exhaustive(field, n, d, 1, variant, work_cap)
    out.append(base)
    for k in range(2, kmax + 1):
        if strategy == "exhaustive":
            out.append(_exhaustive(field, n, d, k, variant, work_cap))
        else:
            out.append(range_sumset(out[-1], base, work_cap))
    return out


def enumerate_range(field, n, d, k, strategy="auto", work_cap=WORK_CAP, variant="affine"):
    """Exact R_k with canonical representatives.

    ``strategy`` is ``"exhaustive"`` (every tuple), ``"sumset"`` (iterated
    R_(k-1) + R_1) or ``"auto"`` (sumset for k >= 2). Both give identical
    entries and representatives.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if k < 0:
        raise ValueError("k must be >= 0")
    if strategy == "auto":
        strategy = "exhaustive" if k <= 1 else "sumset"
    if strategy not in ("exhaustive", "sumset"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if k == 0:
        return _zero_range(field, n, d, variant)
    if strategy == "exhaustive":
        return _exhaustive(field, n, d, k, variant, work_cap)
    return range_sequence(field, n, d, k, "sumset", variant, work_cap)[-1]


def restricted_range(field, n, d, k, strategy="auto", work_cap=WORK_CAP):
    """R_k'': only query points with every coordinate nonzero."""
    return enumerate_range(field, n, d, k, strategy, work_cap, variant="restricted")


def homogeneous_range(field, n, d, k, strategy="auto", work_cap=WORK_CAP):
    """R_k': sums of k points of the homogenised Veronese image of F_q^(n+1)."""
    return enumerate_range(field, n, d, k, strategy, work_cap, variant="homogeneous")


def range_ratio(rs):
    """(|R_k| / q^J as a Fraction, its float value)."""
    ratio = Fraction(rs.size, rs.q**rs.J)
    return ratio, float(ratio)


def scale(rs, lam):
    """Keys of lam * z for every z in ``rs`` (unsorted)."""
    comp = rs.field.mul(rs.components, int(lam)).astype(np.int64)
    return comp @ _place_values(rs.q, rs.J)


def write_range_dump(rs, path):
    """CSV ``z_enc,rep_enc`` plus a JSON sidecar next to it."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["z_enc", "rep_enc"])
        for z, r in zip(rs.keys.tolist(), rs.reps.tolist()):
            w.writerow([z, r])
    side = path.with_suffix(".json")
    side.write_text(json.dumps(rs.sidecar(), indent=2, sort_keys=True) + "\n")
    return path, side


def read_range_dump(path):
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    field = ff_make(meta["p"], meta["r"], meta["modulus"])
    data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.int64, ndmin=2)
    return RangeSet(
        field, meta["n"], meta["d"], meta["k"], data[:, 0].copy(), data[:, 1].copy(),
        meta["strategy"], meta.get("variant", "affine"),
    )
