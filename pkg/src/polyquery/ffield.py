"""Exact arithmetic in F_q, q = p^r.

Elements are stored by their canonical integer encoding
``enc = sum(coeffs[i] * p**i)``, where ``coeffs`` are the coordinates of the
element in the polynomial basis 1, t, ..., t^(r-1) of F_p[t]/(modulus).
The same encoding is used for every file format and hash key in the package.

Scalar helpers work on :class:`FieldElement`; the table-driven methods on
:class:`FieldParams` (``add``, ``mul``, ...) accept NumPy arrays of encodings
and are what the enumeration code uses.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DivideByZero,
    NonPrime,
    ParamsMismatch,
    ReducibleModulus,
    UnsupportedDegree,
)

# Monic irreducible moduli, coefficients low-to-high. For r <= 3 "no root in
# F_p" is equivalent to irreducibility, which is how these were chosen.
BUILTIN_MODULI = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 0, 1),
    (5, 3): (1, 1, 0, 1),
    (7, 2): (1, 0, 1),
    (7, 3): (1, 1, 0, 1),
    (11, 2): (1, 0, 1),
    (11, 3): (1, 4, 0, 1),
    (13, 2): (2, 0, 1),
    (13, 3): (1, 4, 0, 1),
}


def is_prime(n):
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q):
    """Return ``(p, r)`` with ``q == p**r``, or raise :class:`NonPrime`."""
    if q < 2:
        raise NonPrime(q)
    p = next(f for f in range(2, q + 1) if q % f == 0)
    r, rest = 0, q
    while rest % p == 0:
        rest //= p
        r += 1
    if rest != 1:
        raise NonPrime(q)
    return p, r


# --- dense polynomial helpers over F_p (lists, low-to-high) ---------------


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p):
    a = _trim(x % p for x in a)
    m = _trim(m)
    inv_lead = pow(m[-1], -1, p)
    while len(a) >= len(m):
        shift = len(a) - len(m)
        factor = a[-1] * inv_lead % p
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * mi) % p
        a = _trim(a)
    return a


def _poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _poly_sub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim((x - y) % p for x, y in zip(a, b))


def _poly_gcd(a, b, p):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def _poly_powmod(base, e, m, p):
    result = [1]
    base = _poly_mod(base, m, p)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, p), m, p)
        base = _poly_mod(_poly_mul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(modulus, p):
    """Irreducibility of a monic polynomial over F_p.

    Uses gcd(f, t^(p^i) - t) == 1 for i = 1..deg/2, which rules out every
    factor of degree <= deg/2.
    """
    f = _trim(modulus)
    deg = len(f) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    t = [0, 1]
    frob = t
    for _ in range(deg // 2):
        frob = _poly_powmod(frob, p, f, p)
        if len(_poly_gcd(f, _poly_sub(frob, t, p), p)) > 1:
            return False
    return True


@dataclass(frozen=True)
class FieldParams:
    """The field F_{p^r} defined by ``modulus`` (monic, low-to-high)."""

    p: int
    r: int
    modulus: tuple

    @property
    def q(self):
        return self.p**self.r

    def __repr__(self):
        return f"FieldParams(p={self.p}, r={self.r}, modulus={self.modulus})"

    def describe(self):
        return {"p": self.p, "r": self.r, "modulus": list(self.modulus), "q": self.q}

    # -- encoding ----------------------------------------------------------

    def encode(self, coeffs):
        coeffs = list(coeffs) + [0] * (self.r - len(coeffs))
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(coeffs[: self.r]))

    def decode(self, enc):
        enc = int(enc)
        out = []
        for _ in range(self.r):
            enc, dgt = divmod(enc, self.p)
            out.append(dgt)
        return out

    def element(self, value):
        """Build an element from an encoding, a coefficient list or an element."""
        if isinstance(value, FieldElement):
            _check_same(self, value.field)
            return value
        if isinstance(value, (list, tuple)):
            return FieldElement(self, self.encode(value))
        return FieldElement(self, int(value) % self.q if self.r == 1 else int(value))

    def zero(self):
        return FieldElement(self, 0)

    def one(self):
        return FieldElement(self, 1)

    def elements(self):
        return [FieldElement(self, e) for e in range(self.q)]

    # -- scalar kernels on encodings ---------------------------------------

    def _mul_enc(self, a, b):
        """Polynomial multiplication mod the modulus (used to seed tables)."""
        if self.r == 1:
            return a * b % self.p
        prod = _poly_mul(self.decode(a), self.decode(b), self.p)
        return self.encode(_poly_mod(prod, self.modulus, self.p))

    @cached_property
    def digits(self):
        """Array of shape (q, r): base-p digits of every encoding."""
        e = np.arange(self.q, dtype=np.int64)
        return np.stack([(e // self.p**i) % self.p for i in range(self.r)], axis=1)

    @cached_property
    def _place(self):
        return self.p ** np.arange(self.r, dtype=np.int64)

    @cached_property
    def generator(self):
        """Smallest encoding that generates the multiplicative group."""
        order = self.q - 1
        if order == 1:
            return 1
        prime_factors = [f for f in range(2, order + 1) if order % f == 0 and is_prime(f)]
        for g in range(2, self.q):
            if all(self._pow_slow(g, order // f) != 1 for f in prime_factors):
                return g
        raise AssertionError("no generator found; modulus is not irreducible")

    def _pow_slow(self, a, e):
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul_enc(result, base)
            base = self._mul_enc(base, base)
            e >>= 1
        return result

    @cached_property
    def exp_table(self):
        out = np.empty(self.q - 1, dtype=np.int64)
        x = 1
        for i in range(self.q - 1):
            out[i] = x
            x = self._mul_enc(x, self.generator)
        return out

    @cached_property
    def log_table(self):
        out = np.full(self.q, -1, dtype=np.int64)
        out[self.exp_table] = np.arange(self.q - 1)
        return out

    @cached_property
    def add_table(self):
        d = self.digits
        s = (d[:, None, :] + d[None, :, :]) % self.p
        return (s @ self._place).astype(_enc_dtype(self.q))

    @cached_property
    def neg_table(self):
        return (((-self.digits) % self.p) @ self._place).astype(np.int64)

    @cached_property
    def mul_table(self):
        log = self.log_table
        s = (log[:, None] + log[None, :]) % (self.q - 1)
        out = self.exp_table[s]
        out[0, :] = 0
        out[:, 0] = 0
        return out.astype(_enc_dtype(self.q))

    @cached_property
    def inv_table(self):
        out = np.zeros(self.q, dtype=np.int64)
        out[1:] = self.exp_table[(-self.log_table[1:]) % (self.q - 1)]
        return out

    @cached_property
    def frobenius_table(self):
        """x -> x^p on encodings."""
        out = np.zeros(self.q, dtype=np.int64)
        out[1:] = self.exp_table[(self.log_table[1:] * self.p) % (self.q - 1)]
        return out

    @cached_property
    def trace_table(self):
        acc = np.arange(self.q, dtype=np.int64)
        cur = acc.copy()
        for _ in range(self.r - 1):
            cur = self.frobenius_table[cur]
            acc = self.add_table[acc, cur].astype(np.int64)
        if np.any(acc >= self.p):
            raise AssertionError("trace left the prime subfield")
        return acc

    @cached_property
    def roots_of_unity(self):
        return np.exp(2j * np.pi * np.arange(self.p) / self.p)

    @cached_property
    def char_table(self):
        return self.roots_of_unity[self.trace_table]

    @cached_property
    def trace_mul_table(self):
        """tr(a*b) for all pairs, shape (q, q)."""
        return self.trace_table[self.mul_table].astype(np.int8 if self.p < 128 else np.int64)

    # -- vectorised ops on encodings ---------------------------------------

    def add(self, a, b):
        return self.add_table[a, b]

    def neg(self, a):
        return self.neg_table[a]

    def sub(self, a, b):
        return self.add_table[a, self.neg_table[b]]

    def mul(self, a, b):
        return self.mul_table[a, b]

    def inv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise DivideByZero("inverse of zero")
        return self.inv_table[a]

    def pow(self, a, e):
        a = np.asarray(a, dtype=np.int64)
        e = int(e)
        if e == 0:
            return np.ones_like(a)
        out = self.exp_table[(self.log_table[a] * e) % (self.q - 1)]
        return np.where(a == 0, 0, out)

    def trace(self, a):
        return self.trace_table[a]

    def char(self, a):
        return self.char_table[a]


def _enc_dtype(q):
    if q <= 2**8:
        return np.uint8
    if q <= 2**16:
        return np.uint16
    return np.int64


def _check_same(f, g):
    if f != g:
        raise ParamsMismatch(f"{f!r} vs {g!r}")


class FieldElement:
    """A single element of F_q; supports the usual arithmetic operators."""

    __slots__ = ("field", "enc")

    def __init__(self, field, enc):
        if not 0 <= enc < field.q:
            raise ValueError(f"encoding {enc} outside 0..{field.q - 1}")
        self.field = field
        self.enc = int(enc)

    @property
    def coeffs(self):
        return self.field.decode(self.enc)

    def _other(self, other):
        if isinstance(other, FieldElement):
            _check_same(self.field, other.field)
            return other
        return self.field.element(other)

    def __add__(self, other):
        return ff_add(self, self._other(other))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, int(self.field.neg_table[self.enc]))

    def __sub__(self, other):
        return ff_add(self, -self._other(other))

    def __rsub__(self, other):
        return ff_add(self._other(other), -self)

    def __mul__(self, other):
        return ff_mul(self, self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ff_mul(self, ff_inv(self._other(other)))

    def __pow__(self, e):
        return ff_pow(self, e)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.enc == other.enc
        if isinstance(other, int):
            return self.enc == other
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.enc))

    def __int__(self):
        return self.enc

    def __repr__(self):
        return f"F{self.field.q}({self.enc})"


def ff_make(p, r=1, modulus=None):
    """Construct :class:`FieldParams` for F_{p^r}.

    Without ``modulus`` the built-in table is used (p <= 13, r <= 3).
    """
    if not is_prime(p):
        raise NonPrime(p)
    if r < 1:
        raise UnsupportedDegree(f"extension degree must be >= 1, got {r}")
    if modulus is None:
        if r == 1:
            modulus = (0, 1)
        elif (p, r) in BUILTIN_MODULI:
            modulus = BUILTIN_MODULI[(p, r)]
        else:
            raise UnsupportedDegree(f"no built-in modulus for p={p}, r={r}; pass one explicitly")
    modulus = tuple(int(c) % p for c in modulus)
    if len(_trim(modulus)) != r + 1 or modulus[-1] != 1:
        raise ReducibleModulus(f"modulus {modulus} is not monic of degree {r}")
    if r == 1:
        modulus = (0, 1)
    elif not is_irreducible(modulus, p):
        raise ReducibleModulus(f"{modulus} is reducible over F_{p}")
    return FieldParams(p, r, modulus)


def field_for_q(q):
    p, r = prime_power(q)
    return ff_make(p, r)


def ff_add(a, b):
    _check_same(a.field, b.field)
    f = a.field
    if f.r == 1:
        return FieldElement(f, (a.enc + b.enc) % f.p)
    return FieldElement(f, f.encode([(x + y) % f.p for x, y in zip(a.coeffs, b.coeffs)]))


def ff_mul(a, b):
    _check_same(a.field, b.field)
    return FieldElement(a.field, a.field._mul_enc(a.enc, b.enc))


def ff_inv(a):
    if a.enc == 0:
        raise DivideByZero("inverse of zero")
    f = a.field
    if f.r == 1:
        return FieldElement(f, pow(a.enc, -1, f.p))
    return FieldElement(f, f._pow_slow(a.enc, f.q - 2))


def ff_pow(a, e):
    if e < 0:
        return ff_pow(ff_inv(a), -e)
    return FieldElement(a.field, a.field._pow_slow(a.enc, int(e)))


def ff_frobenius(a):
    return ff_pow(a, a.field.p)


def ff_trace(a):
    """tr(a) = a + a^p + ... + a^(p^(r-1)), returned as an int in 0..p-1."""
    acc, cur = a, a
    for _ in range(a.field.r - 1):
        cur = ff_frobenius(cur)
        acc = acc + cur
    if acc.enc >= a.field.p:
        raise AssertionError("trace left the prime subfield")
    return acc.enc


def ff_char(a):
    """The additive character exp(2*pi*i*tr(a)/p)."""
    return cmath.exp(2j * math.pi * ff_trace(a) / a.field.p)
