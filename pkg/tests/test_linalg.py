from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from mqverify.errors import BadPrime, FieldMismatch, ShapeMismatch, SingularMatrix
from mqverify.linalg import Matrix, block_diag, membership, rank_kernel, specialize_mod_p
from mqverify.scalars import QQ, CyclotomicField, DualField, PrimeField


def test_small_cases():
    r, K = rank_kernel(Matrix.identity(QQ, 2))
    assert r == 2 and K.ncols == 0
    r, K = rank_kernel(Matrix.zeros(QQ, 3, 2))
    assert r == 0 and K == Matrix.identity(QQ, 2)
    r, K = rank_kernel(Matrix(QQ, [[1, 2], [2, 4]]))
    assert r == 1 and K.ncols == 1
    k = K.col(0)
    assert k[1] * -2 == k[0]


def test_membership_cases():
    assert membership(Matrix.identity(QQ, 2), [Fraction(3), Fraction(-1)])
    assert not membership(Matrix.zeros(QQ, 2, 2), [Fraction(1), Fraction(0)])
    assert membership(Matrix(QQ, [[1], [2]]), [Fraction(2), Fraction(4)])
    with pytest.raises(ShapeMismatch):
        membership(Matrix(QQ, [[1], [2]]), [Fraction(2)])


def test_specialize_mod_p():
    assert specialize_mod_p(Matrix(QQ, [[Fraction(1, 2)]]), 5).rows == [[PrimeField(5)(3)]]
    with pytest.raises(BadPrime):
        specialize_mod_p(Matrix(QQ, [[Fraction(1, 2)]]), 2)
    m = specialize_mod_p(Matrix(QQ, [[7, -1]]), 5)
    assert [int(x.r) for x in m.rows[0]] == [2, 4]


entries = st.integers(-3, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_rank_and_kernel_against_sympy(nr, nc, data):
    rows = [[data.draw(entries) for _ in range(nc)] for _ in range(nr)]
    m = Matrix(QQ, rows)
    r, K = rank_kernel(m)
    assert r == sympy.Matrix(rows).rank()
    assert K.ncols == nc - r
    assert (m @ K).is_zero()
    if K.ncols:
        assert K.rank() == K.ncols


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.data())
def test_inverse_round_trip(n, data):
    rows = [[data.draw(entries) for _ in range(n)] for _ in range(n)]
    m = Matrix(QQ, rows)
    if sympy.Matrix(rows).det() == 0:
        with pytest.raises(SingularMatrix):
            m.inverse()
    else:
        assert m @ m.inverse() == Matrix.identity(QQ, n)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_prime_field_rank_matches_sympy_mod_p(nr, nc, data):
    rows = [[data.draw(st.integers(0, 6)) for _ in range(nc)] for _ in range(nr)]
    F = PrimeField(7)
    ours = Matrix(F, rows).rank()
    from sympy.polys.matrices import DomainMatrix
    from sympy import GF

    ref = DomainMatrix([[GF(7)(x) for x in r] for r in rows], (nr, nc), GF(7)).rank()
    assert ours == ref


def test_cyclotomic_rank():
    F = CyclotomicField(3)
    z = F.zeta(1)
    # rows (1, z) and (z^2, 1) are proportional since z^3 = 1
    m = Matrix(F, [[F.one(), z], [z * z, F.one()]])
    assert m.rank() == 1
    assert Matrix(F, [[F.one(), z], [z, F.one()]]).rank() == 2


def test_dual_inverse_and_fields():
    D = DualField(QQ)
    m = Matrix(QQ, [[1, 2], [0, 1]]).to_dual(Matrix(QQ, [[0, 1], [1, 0]]))
    assert m @ m.inverse() == Matrix.identity(D, 2)
    with pytest.raises(FieldMismatch):
        Matrix(QQ, [[1]]) @ Matrix(PrimeField(5), [[1]])


def test_block_diag_and_stack():
    b = block_diag(QQ, [Matrix(QQ, [[1]]), Matrix(QQ, [[2, 3]])])
    assert b.rows == [[1, 0, 0], [0, 2, 3]]
    h = Matrix.hstack(QQ, [Matrix(QQ, [[1], [2]]), Matrix(QQ, [[3], [4]])])
    assert h.rows == [[1, 3], [2, 4]]
    assert Matrix.vstack(QQ, [h, h]).shape == (4, 2)
