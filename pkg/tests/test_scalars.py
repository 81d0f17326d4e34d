from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from mqverify.errors import BadPrime, FieldMismatch, ParseError
from mqverify.scalars import (
    QQ,
    CyclotomicField,
    Dual,
    DualField,
    PrimeField,
    cyclotomic_polynomial,
    cyclotomic_root,
    euler_phi,
    multiplicative_order,
    root_order,
)

x = sympy.symbols("x")


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15])
def test_cyclotomic_polynomial_matches_sympy(m):
    ours = list(cyclotomic_polynomial(m))
    ref = sympy.Poly(sympy.cyclotomic_poly(m, x), x).all_coeffs()[::-1]
    assert ours == [int(c) for c in ref]
    assert euler_phi(m) == int(sympy.totient(m))


def test_roots_of_unity_small_cases():
    assert cyclotomic_root(2, 1) == -1
    assert cyclotomic_root(1, 0) == 1
    F = CyclotomicField(3)
    z = F.zeta(1)
    assert z.coeffs == (0, 1)
    assert z**3 == 1
    assert z * z == -1 - z
    assert root_order(3, 1) == 3
    assert root_order(6, 3) == 2
    assert multiplicative_order(z) == 3


def _to_sympy(c, m):
    zeta = sympy.exp(2 * sympy.pi * sympy.I / m)
    return sum(sympy.Rational(a.numerator, a.denominator) * zeta**k for k, a in enumerate(c.coeffs))


small = st.lists(st.integers(-4, 4), min_size=1, max_size=4)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 4, 5, 8]), small, small)
def test_cyclotomic_ring_ops_against_sympy(m, u, v):
    F = CyclotomicField(m)
    a = F(sum((F(c) * F.zeta(k) for k, c in enumerate(u)), F.zero()))
    b = F(sum((F(c) * F.zeta(k) for k, c in enumerate(v)), F.zero()))
    for ours, ref in ((a + b, _to_sympy(a, m) + _to_sympy(b, m)), (a * b, _to_sympy(a, m) * _to_sympy(b, m))):
        assert sympy.simplify(sympy.expand_complex(_to_sympy(ours, m) - ref)) == 0
    if b:
        assert (a / b) * b == a
        assert b * b.inverse() == 1


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([QQ, CyclotomicField(3), CyclotomicField(5), PrimeField(7), DualField(QQ)]), st.integers(-50, 50), st.integers(1, 9))
def test_serialize_round_trip(F, n, d):
    if isinstance(F, PrimeField):
        v = F(n)
    elif isinstance(F, CyclotomicField):
        v = F(Fraction(n, d)) + F.zeta(1) * F(Fraction(d, 7))
    elif isinstance(F, DualField):
        v = Dual(Fraction(n, d), Fraction(d, 3))
    else:
        v = F(Fraction(n, d))
    assert F.parse(F.serialize(v)) == v


def test_prime_field_and_mixing():
    F5 = PrimeField(5)
    assert F5(Fraction(1, 2)) == F5(3)
    with pytest.raises(BadPrime):
        PrimeField(2)(Fraction(1, 2))
    with pytest.raises(FieldMismatch):
        F5(1) + PrimeField(7)(1)
    with pytest.raises(FieldMismatch):
        CyclotomicField(3).zeta(1) + CyclotomicField(4).zeta(1)


def test_dual_numbers():
    D = DualField(QQ)
    e = Dual(Fraction(0), Fraction(1))
    one = D.one()
    assert e * e == D.zero()
    assert (one + e) * (one - e) == one
    assert (one + e).inverse() == one - e
    assert D.parse(D.serialize(one + e)) == one + e


def test_parse_errors():
    with pytest.raises(ParseError):
        QQ.parse("1/0")
    with pytest.raises(ParseError):
        QQ.parse("abc")
