"""Exponent sets, the canonical monomial order and Veronese evaluation.

The order is graded lexicographic: by total degree, and within a degree
lexicographically with x_1 most significant, so for n = 2, d = 2::

    (0,0) (1,0) (0,1) (2,0) (1,1) (0,2)

Every coefficient vector, CSV column and range key in the package indexes
monomials in this order.
"""
from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np

from .errors import DimensionMismatch, Overflow

SIZE_CAP = 10**6


def num_monomials(n, d):
    return comb(n + d, d)


def _compositions(total, parts):
    """All length-``parts`` tuples summing to ``total``, lexicographically descending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _exponents(n, d):
    return tuple(e for deg in range(d + 1) for e in _compositions(deg, n))


def exponents(n, d, size_cap=SIZE_CAP):
    """The exponent set {j in N^n : |j| <= d} in canonical order."""
    if n < 1 or d < 0:
        raise ValueError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    if num_monomials(n, d) > size_cap:
        raise Overflow(f"C({n + d},{d}) = {num_monomials(n, d)} exceeds size cap {size_cap}")
    return list(_exponents(n, d))


@lru_cache(maxsize=None)
def exponent_array(n, d):
    """``exponents(n, d)`` as a read-only (J, n) integer array."""
    arr = np.array(exponents(n, d), dtype=np.int64).reshape(-1, n)
    arr.flags.writeable = False
    return arr


def homogeneous_exponents(nvars, d):
    """Degree-exactly-d exponents in ``nvars`` variables, canonical order."""
    return [e for e in exponents(nvars, d) if sum(e) == d]


def monomial_index(n, d):
    """Map exponent tuple -> position in the canonical order."""
    return {e: i for i, e in enumerate(exponents(n, d))}


def homogenize_index(n, d):
    """Position of x^j * x_{n+1}^(d-|j|) in ``homogeneous_exponents(n+1, d)``,
    for each j of ``exponents(n, d)``."""
    pos = {e: i for i, e in enumerate(homogeneous_exponents(n + 1, d))}
    return np.array([pos[e + (d - sum(e),)] for e in exponents(n, d)], dtype=np.int64)


def _field_veronese(x, exps, field):
    x = np.asarray(x, dtype=np.int64)
    d = int(exps.max(initial=0))
    # pw[..., i, e] = x_i^e
    pw = np.stack([field.pow(x, e) for e in range(d + 1)], axis=-1)
    out = None
    for i in range(exps.shape[1]):
        term = pw[..., i, :][..., exps[:, i]]
        out = term if out is None else field.mul(out, term)
    return out.astype(np.int64)


def _numeric_veronese(x, exps):
    x = np.asarray(x)
    if not np.iscomplexobj(x):
        x = x.astype(float)
    d = int(exps.max(initial=0))
    pw = x[..., None] ** np.arange(d + 1)
    out = np.ones(x.shape[:-1] + (exps.shape[0],), dtype=pw.dtype)
    for i in range(exps.shape[1]):
        out = out * pw[..., i, :][..., exps[:, i]]
    return out


def eval_veronese(x, n, d, field=None):
    """All monomials x^j, j in exponents(n, d), in canonical order.

    ``x`` has shape (..., n); leading axes are treated as a batch. With a
    ``field`` the entries of ``x`` are element encodings and so is the
    result. Without one, ``x`` is real or complex.
    """
    x = _as_points(x, n)
    exps = exponent_array(n, d)
    if field is not None:
        return _field_veronese(x, exps, field)
    return _numeric_veronese(x, exps)


def eval_veronese_homogeneous(x, nvars, d, field=None):
    """Degree-d monomials of ``nvars`` variables (the homogenised Veronese map)."""
    x = _as_points(x, nvars)
    exps = np.array(homogeneous_exponents(nvars, d), dtype=np.int64).reshape(-1, nvars)
    if field is not None:
        return _field_veronese(x, exps, field)
    return _numeric_veronese(x, exps)


def eval_poly(c, x, n, d, field=None):
    """f(x) = sum_j c_j x^j."""
    c = np.asarray(c if field is None else [int(v) for v in c])
    if c.shape[-1] != num_monomials(n, d):
        raise DimensionMismatch(f"expected {num_monomials(n, d)} coefficients, got {c.shape[-1]}")
    v = eval_veronese(x, n, d, field)
    if field is None:
        return np.sum(c * v, axis=-1)
    terms = field.mul(c.astype(np.int64), v)
    acc = np.zeros(terms.shape[:-1], dtype=np.int64)
    for j in range(terms.shape[-1]):
        acc = field.add(acc, terms[..., j]).astype(np.int64)
    return acc


def _as_points(x, n):
    if isinstance(x, (list, tuple)) and x and hasattr(x[0], "enc"):
        x = [v.enc for v in x]
    x = np.asarray(x)
    if x.ndim == 0 or x.shape[-1] != n:
        raise DimensionMismatch(f"points must have trailing dimension {n}, got shape {x.shape}")
    return x
