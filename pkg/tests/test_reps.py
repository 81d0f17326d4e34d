from __future__ import annotations

from fractions import Fraction

import pytest
import sympy

from mqverify.errors import ObstructionError, UnsupportedShape
from mqverify.linalg import Matrix
from mqverify.ncpath import build_relation, PathPoly
from mqverify.reps import (
    Representation,
    check_rep,
    evaluate,
    g_blocks,
    graded_hom,
    induce,
    is_hom,
    module_checks,
    sample_rep,
    tangent_dim,
    truncate,
    unflatten_hom,
)
from mqverify.scalars import QQ, CyclotomicField

from conftest import loops, r1, scalar_rep, two_vertex, two_vertex_rep


def test_r1_hand_values():
    R = r1()
    g = g_blocks(R)
    # the word a a* acts as X_a* X_a, so the two diagonal factors swap roles
    # relative to the matrix-order reading; their quotient is -Id either way
    assert g["a"] == Matrix(QQ, [[1, 0], [0, -1]])
    assert g["a*"] == Matrix(QQ, [[-1, 0], [0, 1]])
    assert g["a"] @ g["a*"].inverse() == Matrix.identity(QQ, 2).scale(QQ(-1))
    assert check_rep(R, {"v": -1}).ok


def test_scalar_case():
    assert check_rep(scalar_rep(), {"v": 1}).ok


def test_obstruction_before_sampling():
    F = CyclotomicField(3)
    with pytest.raises(ObstructionError) as info:
        sample_rep(loops(1), {"v": 2}, {"v": F.zeta(1)}, 0, F)
    assert info.value.q_power is not None
    # (alpha = 1, q = -1) has q^alpha = -1
    with pytest.raises(ObstructionError):
        sample_rep(loops(1), {"v": 1}, {"v": -1}, 0)


def test_unsupported_shape():
    with pytest.raises(UnsupportedShape):
        sample_rep(two_vertex(), {1: 1, 2: 2}, {1: 1, 2: 1}, 0)


@pytest.mark.parametrize("seed", range(4))
def test_samplers(seed):
    r = sample_rep(loops(1), {"v": 2}, {"v": -1}, seed)
    assert r.ok and check_rep(r.rep, {"v": -1}).ok
    r = sample_rep(two_vertex(), {1: 1, 2: 1}, {1: -1, 2: -1}, seed)
    assert r.ok
    x, y = r.rep.X["a"].rows[0][0], r.rep.X["a*"].rows[0][0]
    assert 1 + x * y == -1


def test_sampler_deterministic():
    a = sample_rep(loops(2), {"v": 2}, {"v": 1}, 7)
    b = sample_rep(loops(2), {"v": 2}, {"v": 1}, 7)
    assert a.rep.X == b.rep.X


def test_induce_r1():
    R = r1()
    M = induce(R, 2)
    assert [M.dims[("v", n)] for n in range(3)] == [2, 2, 2]
    assert M.maps[("a", 0)] == R.X["a"] and M.maps[("a*", 1)] == R.X["a*"]
    assert M.maps[("t", "v", 0)] == Matrix.identity(QQ, 2)
    rel = build_relation(R.qd, {"v": -1})
    assert module_checks(M, rel.rho) == {"j_relations": True, "rho_vanishes": True}
    T = truncate(R, 2)
    assert T.maps == M.maps


def test_evaluate_G_and_idempotent():
    R = r1()
    M = induce(R, 2)
    rel = build_relation(R.qd, {"v": -1})
    assert evaluate(rel.G["a"], M, "v", 0) == g_blocks(R)["a"]
    assert evaluate(PathPoly.idem(R.qd, QQ, "v"), M, "v", 1) == Matrix.identity(QQ, 2)
    assert evaluate(rel.rho, M, "v", 0).is_zero()


def test_induce_equivariance():
    R = r1()
    g = {("v", n): Matrix(QQ, [[1, n + 1], [0, 1]]) for n in range(3)}
    M0, M1 = induce(R, 2), induce(R, 2, g)
    homs = graded_hom(M0, M1)
    assert len(homs) >= 1
    assert all(is_hom(M0, M1, h) for h in homs)


def test_graded_hom_dims():
    M = induce(r1(), 2)
    assert len(graded_hom(M, M)) == 1
    a = sample_rep(loops(2), {"v": 2}, {"v": 1}, 1).rep
    b = sample_rep(loops(2), {"v": 2}, {"v": 1}, 2).rep
    assert len(graded_hom(induce(a, 4), induce(b, 4))) == 0
    Z = Representation(loops(1), {"v": 0}, QQ, {"a0": Matrix.zeros(QQ, 0, 0), "a0*": Matrix.zeros(QQ, 0, 0)})
    assert len(graded_hom(induce(Z, 2), induce(Z, 2))) == 0


def _sympy_tangent(R: Representation, q) -> int:
    """Jacobian rank of the matrix relation at R, independently via sympy.
    Tries both product orders and keeps the one vanishing at R."""
    names = [h.name for h in R.qd.H]
    n = R.alpha["v"]
    syms = {h: sympy.Matrix(n, n, lambda r, c: sympy.Symbol(f"{h}_{r}_{c}")) for h in names}
    point = {syms[h][r, c]: sympy.Rational(R.X[h].rows[r][c]) for h in names for r in range(n) for c in range(n)}
    I = sympy.eye(n)
    g = {h: I + syms[R.qd.star(h)] * syms[h] for h in names}
    om = R.qd.omega()
    best = None
    for order in (om, om[::-1]):
        D = sympy.eye(n)
        for a in order:
            D = D * g[a]
        Ds = sympy.eye(n)
        for a in order[::-1]:
            Ds = Ds * g[R.qd.star(a)]
        F = (D - q * Ds).reshape(n * n, 1)
        if F.subs(point) == sympy.zeros(n * n, 1):
            J = F.jacobian(sympy.Matrix([syms[h][r, c] for h in names for r in range(n) for c in range(n)]))
            best = len(names) * n * n - J.subs(point).rank()
    assert best is not None
    return best


def test_tangent_dims():
    t = tangent_dim(r1(), {"v": -1})
    assert (t.tangent_dim, t.moduli_dim) == (5, 2)
    assert _sympy_tangent(r1(), -1) == 5
    assert tangent_dim(scalar_rep(), {"v": 1}).moduli_dim == 2
    assert tangent_dim(two_vertex_rep(), {1: -1, 2: -1}).moduli_dim == 0


@pytest.mark.parametrize("seed", [1, 2])
def test_tangent_against_sympy_g2(seed):
    R = sample_rep(loops(2), {"v": 2}, {"v": 1}, seed).rep
    assert tangent_dim(R, {"v": 1}).tangent_dim == _sympy_tangent(R, 1)
