import cmath
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import GF, Poly, symbols

from polyquery.errors import DivideByZero, NonPrime, ParamsMismatch, ReducibleModulus, UnsupportedDegree
from polyquery.ffield import (
    BUILTIN_MODULI,
    ff_char,
    ff_inv,
    ff_make,
    ff_mul,
    ff_pow,
    ff_trace,
    field_for_q,
    is_irreducible,
    prime_power,
)

T = symbols("t")

SMALL_FIELDS = [
    ff_make(2), ff_make(3), ff_make(5), ff_make(7), ff_make(11), ff_make(13),
    ff_make(2, 2), ff_make(2, 3), ff_make(3, 2), ff_make(2, 4, (1, 1, 0, 0, 1)),
]


def sympy_mul(f, a, b):
    """Oracle: multiply encodings with sympy polynomials over GF(p)."""
    dom = GF(f.p)
    mod = Poly(list(reversed(f.modulus)), T, domain=dom)
    pa = Poly(list(reversed(f.decode(a))), T, domain=dom)
    pb = Poly(list(reversed(f.decode(b))), T, domain=dom)
    coeffs = [int(c) % f.p for c in reversed((pa * pb).rem(mod).all_coeffs())]
    return f.encode(coeffs)


def test_make_prime_field():
    f = ff_make(5)
    assert (f.p, f.r, f.q) == (5, 1, 5)


def test_make_f4():
    f = ff_make(2, 2, (1, 1, 1))
    assert f.q == 4


def test_make_rejects_composite():
    with pytest.raises(NonPrime):
        ff_make(4)


def test_make_rejects_reducible_modulus():
    with pytest.raises(ReducibleModulus):
        ff_make(2, 2, (1, 0, 1))  # t^2 + 1 = (t + 1)^2


def test_make_rejects_non_monic():
    with pytest.raises(ReducibleModulus):
        ff_make(3, 2, (1, 0, 2))


def test_unsupported_degree_without_modulus():
    with pytest.raises(UnsupportedDegree):
        ff_make(2, 5)


@pytest.mark.parametrize("key", sorted(BUILTIN_MODULI))
def test_builtin_moduli_irreducible(key):
    p, r = key
    mod = BUILTIN_MODULI[key]
    assert is_irreducible(mod, p)
    assert Poly(list(reversed(mod)), T, domain=GF(p)).is_irreducible


def test_irreducibility_agrees_with_sympy():
    for p, r in [(2, 4), (3, 3), (5, 2)]:
        for tail in itertools.product(range(p), repeat=r):
            mod = tail + (1,)
            assert is_irreducible(mod, p) == Poly(list(reversed(mod)), T, domain=GF(p)).is_irreducible


def test_prime_power():
    assert prime_power(9) == (3, 2)
    assert prime_power(13) == (13, 1)
    with pytest.raises(NonPrime):
        prime_power(12)


def test_f5_mul():
    f = ff_make(5)
    assert ff_mul(f.element(2), f.element(3)) == f.one()


def test_f4_t_squared():
    f = ff_make(2, 2)
    t = f.element([0, 1])
    assert (t * t).enc == sympy_mul(f, t.enc, t.enc)
    assert (t * t).coeffs == [1, 1]


def test_inverse_of_zero():
    f = ff_make(7)
    with pytest.raises(DivideByZero):
        ff_inv(f.zero())
    with pytest.raises(ZeroDivisionError):
        f.inv(np.array([0, 1]))


def test_params_mismatch():
    with pytest.raises(ParamsMismatch):
        ff_mul(ff_make(2).one(), ff_make(3).one())


def test_pow_zero_is_one():
    f = ff_make(3, 2)
    for a in f.elements():
        assert ff_pow(a, 0) == f.one()


@pytest.mark.parametrize("f", SMALL_FIELDS, ids=lambda f: f"q{f.q}")
def test_mul_table_matches_sympy(f):
    for a in range(f.q):
        for b in range(f.q):
            assert int(f.mul_table[a, b]) == sympy_mul(f, a, b)


@pytest.mark.parametrize("f", [g for g in SMALL_FIELDS if g.q <= 16], ids=lambda f: f"q{f.q}")
def test_field_axioms_exhaustive(f):
    els = f.elements()
    zero, one = f.zero(), f.one()
    for a in els:
        assert a + zero == a and a * one == a
        assert a + (-a) == zero
        if a != zero:
            assert a * ff_inv(a) == one
            assert sum(1 for b in els if a * b == one) == 1
    for a, b in itertools.product(els, repeat=2):
        assert a + b == b + a
        assert a * b == b * a
    for a, b, c in itertools.product(els, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c


@pytest.mark.parametrize("f", [g for g in SMALL_FIELDS if g.q <= 16], ids=lambda f: f"q{f.q}")
def test_frobenius_additive_and_fixes_prime_field(f):
    fixed = set()
    for a in f.elements():
        if a ** f.p == a:
            fixed.add(a.enc)
        for b in f.elements():
            assert (a + b) ** f.p == a ** f.p + b ** f.p
    assert fixed == set(range(f.p))


def test_f4_traces():
    f = ff_make(2, 2)
    assert ff_trace(f.zero()) == 0
    assert ff_trace(f.one()) == 0
    assert ff_trace(f.element([0, 1])) == 1


def _trace_oracle(f, a):
    # sum of a^(p^i) computed with sympy multiplication
    acc, cur = 0, a
    for _ in range(f.r):
        acc = f.encode([(x + y) % f.p for x, y in zip(f.decode(acc), f.decode(cur))])
        nxt = 1
        for _ in range(f.p):
            nxt = sympy_mul(f, nxt, cur)
        cur = nxt
    return acc


@pytest.mark.parametrize("f", SMALL_FIELDS[6:], ids=lambda f: f"q{f.q}")
def test_trace_matches_direct_frobenius(f):
    for a in range(f.q):
        assert ff_trace(f.element(a)) == _trace_oracle(f, a) == int(f.trace_table[a])


@pytest.mark.parametrize("f", [g for g in SMALL_FIELDS if g.q <= 16], ids=lambda f: f"q{f.q}")
def test_trace_is_fp_linear(f):
    for alpha in range(f.p):
        for a in f.elements():
            for b in f.elements():
                lhs = ff_trace(f.element(alpha) * a + b)
                assert lhs == (alpha * ff_trace(a) + ff_trace(b)) % f.p


def test_char_values():
    assert ff_char(ff_make(7).zero()) == 1
    assert abs(ff_char(ff_make(5).element(2)) - cmath.exp(4j * cmath.pi / 5)) < 1e-15


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64])
def test_character_sum_vanishes(q):
    f = field_for_q(q) if q not in (16, 32, 64) else ff_make(2, {16: 4, 32: 5, 64: 6}[q], {
        16: (1, 1, 0, 0, 1), 32: (1, 0, 1, 0, 0, 1), 64: (1, 1, 0, 0, 0, 0, 1)}[q])
    total = sum(ff_char(a) for a in f.elements())
    assert abs(total) < 1e-12
    assert abs(f.char_table.sum()) < 1e-12


@settings(max_examples=200, deadline=None)
@given(a=st.integers(0, 13**3 - 1), b=st.integers(0, 13**3 - 1))
def test_character_is_additive_large_field(a, b):
    f = ff_make(13, 3)
    x, y = f.element(a), f.element(b)
    assert abs(ff_char(x) * ff_char(y) - ff_char(x + y)) < 1e-12
    assert abs(abs(ff_char(x)) - 1) < 1e-15


@settings(max_examples=200, deadline=None)
@given(a=st.integers(0, 13**3 - 1), b=st.integers(0, 13**3 - 1))
def test_scalar_and_table_paths_agree(a, b):
    f = ff_make(13, 3)
    assert int(f.mul(a, b)) == ff_mul(f.element(a), f.element(b)).enc
    assert int(f.add(a, b)) == (f.element(a) + f.element(b)).enc
