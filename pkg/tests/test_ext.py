from __future__ import annotations

import pytest

from mqverify.errors import SingularD, SingularOperator
from mqverify.linalg import Matrix
from mqverify.quiver import expected_rank
from mqverify.reps import GradedModule, Representation, graded_hom, induce, sample_rep, tangent_dim
from mqverify.ext import (
    build_differentials,
    complex_report,
    first_order_report,
    phi_correspondence,
    verify_bimodule_memberships,
)
from mqverify.scalars import QQ, CyclotomicField

from conftest import loops, r1, scalar_rep, two_vertex_rep

Q1 = {"v": -1}


def test_r1_shapes_and_cohomology():
    V = induce(r1(), 2)
    cx = build_differentials(V, V, Q1)
    assert cx.d0.shape == (8, 4) and cx.d1.shape == (4, 8)
    assert (cx.d1 @ cx.d0).is_zero()
    rep = complex_report(V, V, Q1, cx=cx)
    assert (rep.h_minus1, rep.h0, rep.h1) == (1, 2, 1)
    assert rep.is_complex and rep.euler_ok and rep.rank_ok and rep.hom_ok
    # oracle: end cohomologies are graded Hom spaces, computed without the complex
    assert rep.h_minus1 == len(graded_hom(V, V)) == 1


def test_scalar_case():
    R = scalar_rep()
    V = induce(R, 2)
    cx = build_differentials(V, V, {"v": 1})
    assert cx.d0.shape == (2, 1) and cx.d1.shape == (1, 2)
    rep = complex_report(V, V, {"v": 1})
    assert (rep.h_minus1, rep.h0, rep.h1) == (1, 2, 1)
    mem = verify_bimodule_memberships(V, V, {"v": 1})
    assert mem.ok
    assert all(f["zero_vectors"] == f["vectors"] for f in mem.families)


def test_two_vertex_cohomology():
    # dims L = E = L' = 2, so Euler forces h0 = h-1 + h1 - 2 = 0
    R = two_vertex_rep()
    q = {1: -1, 2: -1}
    V = induce(R, 2)
    rep = complex_report(V, V, q)
    assert rep.to_json()["dims"] == {"L": 2, "E": 2, "L2g": 2}
    assert (rep.h_minus1, rep.h0, rep.h1) == (1, 0, 1)
    assert rep.expected_rank == -2 == expected_rank(R.qd, R.alpha)


def test_zero_module():
    Z = Representation(loops(1), {"v": 0}, QQ, {"a0": Matrix.zeros(QQ, 0, 0), "a0*": Matrix.zeros(QQ, 0, 0)})
    V = induce(Z, 2)
    cx = build_differentials(V, V, Q1)
    assert cx.d0.shape == (0, 0) and cx.d1.shape == (0, 0)


@pytest.mark.parametrize("qv", [1, -1])
def test_non_isomorphic_stable_pair(qv):
    q = {"v": qv}
    a = sample_rep(loops(2), {"v": 2}, q, 1).rep
    b = sample_rep(loops(2), {"v": 2}, q, 2).rep
    V, W = induce(a, 4), induce(b, 4)
    rep = complex_report(V, W, q)
    assert (rep.h_minus1, rep.h1) == (0, 0)
    assert rep.h0 == expected_rank(a.qd, a.alpha) == 8
    assert rep.h1 == len(graded_hom(W, V))
    phi = phi_correspondence(V, W, q)
    assert phi.dim_kernel == phi.dim_hom == 0 and phi.ok
    diag = complex_report(V, V, q)
    assert (diag.h_minus1, diag.h1) == (1, 1)
    assert diag.expected_rank == tangent_dim(a, q).moduli_dim - 2


def test_phi_round_trip_r1():
    V = induce(r1(), 2)
    phi = phi_correspondence(V, V, Q1)
    assert phi.dim_kernel == phi.dim_hom == 1
    assert phi.forward_homs and phi.reverse_in_kernel and phi.round_trip_phi and phi.round_trip_hom


def test_phi_singular_t_map():
    V = induce(r1(), 2)
    maps = dict(V.maps)
    maps[("t", "v", 0)] = Matrix.zeros(QQ, 2, 2)
    W = GradedModule(V.tq, V.field, dict(V.dims), maps, V.a_module)
    with pytest.raises(SingularD):
        phi_correspondence(V, W, Q1)
    with pytest.raises(SingularOperator):
        verify_bimodule_memberships(V, W, Q1)


def test_memberships_r1_and_g2():
    V = induce(r1(), 2)
    mem = verify_bimodule_memberships(V, V, Q1)
    assert mem.ok and mem.contraction_consistent
    assert all(f["members"] for f in mem.families)
    assert all(e["first"] and e["second"] for e in mem.lemma)
    R = sample_rep(loops(2), {"v": 2}, {"v": 1}, 1).rep
    V = induce(R, 4)
    assert verify_bimodule_memberships(V, V, {"v": 1}).ok


def test_cyclotomic_pair():
    F = CyclotomicField(3)
    q = {"v": F.zeta(1)}
    R = sample_rep(loops(2), {"v": 3}, q, 3, F).rep
    V = induce(R, 4)
    rep = complex_report(V, V, q)
    assert rep.ok and (rep.h_minus1, rep.h1) == (1, 1)


def test_first_order_support():
    out = first_order_report(r1(), Q1)
    assert out == {"diagonal_dim": 2, "gauge_shifted_dim": 2, "off_diagonal_dim": 1, "ok": True}
    out = first_order_report(two_vertex_rep(), {1: -1, 2: -1})
    assert out["ok"] and "skipped" in out
