from __future__ import annotations

from fractions import Fraction

import pytest

from mqverify.errors import ZeroParameter
from mqverify.ncpath import (
    BimodElem,
    PathPoly,
    alpha_dual_closed_form,
    alpha_dual_lemma,
    build_relation,
    derive,
    differential_components,
    identity_suite,
)
from mqverify.parser import parse_expr
from mqverify.scalars import QQ, CyclotomicField

from conftest import chain3, loops, two_vertex


def P(qd, src, F=QQ):
    return parse_expr(qd, src, F)


def gen(qd, kind, name):
    return BimodElem.generator(qd, QQ, (kind, name))


def test_rho_one_loop_minus_one():
    qd = loops(1)
    rel = build_relation(qd, {"v": -1})
    assert rel.rho == P(qd, "2 t^2 + a0 a0* + a0* a0")


def test_rho_two_loops_hand_expansion():
    qd = loops(2)
    rel = build_relation(qd, {"v": 1})
    # (t^2 + a a*)(t^2 + b b*) - (t^2 + b* b)(t^2 + a* a)
    hand = P(qd, "t^2 a0 a0* + t^2 a1 a1* + a0 a0* a1 a1* - t^2 a1* a1 - t^2 a0* a0 - a1* a1 a0* a0")
    assert rel.rho == hand
    assert rel.rho.degree == 4


def test_rho_general_q_g3():
    qd = loops(3)
    q = Fraction(2, 3)
    rel = build_relation(qd, {"v": q})
    G = {h.name: P(qd, f"t^2 + {h.name} {qd.star(h.name)}") for h in qd.H}
    D = G["a0"] * G["a1"] * G["a2"]
    Ds = (G["a2*"] * G["a1*"] * G["a0*"]).scale(QQ(q))
    assert rel.rho == D - Ds
    assert rel.rho.degree == 6


def test_derivation_examples():
    qd = loops(1)
    a = PathPoly.arrow(qd, QQ, "a0")
    assert derive(a) == gen(qd, "arrow", "a0")
    rel = build_relation(qd, {"v": -1})
    As = PathPoly.arrow(qd, QQ, "a0*")
    expect = gen(qd, "arrow", "a0*").lmul(a) + gen(qd, "arrow", "a0").rmul(As)
    assert (derive(rel.G["a0"]) - expect).is_zero()
    assert derive(PathPoly.tpower(qd, QQ, 2)).is_zero()


def test_alpha_and_beta_one_loop():
    qd = loops(1)
    q = Fraction(-3, 2)
    rel = build_relation(qd, {"v": q})
    d = differential_components(rel)
    a, As = PathPoly.arrow(qd, QQ, "a0"), PathPoly.arrow(qd, QQ, "a0*")
    ea, es = gen(qd, "arrow", "a0"), gen(qd, "arrow", "a0*")
    Da = es.lmul(a) + ea.rmul(As)
    Ds = ea.lmul(As) + es.rmul(a)
    assert (d.alpha["v"] - (Da - Ds.scale(QQ(q)))).is_zero()
    ev = gen(qd, "vertex", "v")
    assert (d.beta["a0"] - (ev.lmul(a) - ev.rmul(a))).is_zero()
    edv = gen(qd, "dvertex", "v")
    assert (d.alpha_dual["a0"] - (edv.lmul(As) - edv.rmul(As).scale(QQ(q)))).is_zero()


@pytest.mark.parametrize("qd", [loops(1), loops(2), loops(3), two_vertex(), chain3()], ids=["g1", "g2", "g3", "two", "chain"])
@pytest.mark.parametrize("qval", [Fraction(-1), Fraction(1), Fraction(5, 7)])
def test_identity_suite_and_closed_form(qd, qval):
    rel = build_relation(qd, {v: qval for v in qd.vertices})
    suite = identity_suite(rel)
    assert len(suite) == 4 and all(e["passed"] for e in suite), suite
    d = differential_components(rel)
    closed = alpha_dual_closed_form(rel)
    assert all((closed[h] - d.alpha_dual[h]).is_zero() for h in closed)
    for entry in alpha_dual_lemma(rel, d.alpha_dual):
        for lhs, rhs in (entry["first"], entry["second"]):
            assert (lhs - rhs).is_zero()


def test_identity_suite_cyclotomic():
    F = CyclotomicField(3)
    qd = loops(2)
    rel = build_relation(qd, {"v": F.zeta(1)}, F)
    assert all(e["passed"] for e in identity_suite(rel))


def test_peirce_diagonal_two_vertex():
    qd = two_vertex()
    rel = build_relation(qd, {1: Fraction(2), 2: Fraction(-3)})
    assert rel.rho.peirce(1, 2).is_zero() and rel.rho.peirce(2, 1).is_zero()
    assert rel.rho.is_peirce_diagonal()


def test_corrupted_rho_fails_alpha_identity():
    qd = loops(1)
    rel = build_relation(qd, {"v": -1})
    broken = rel.rho - P(qd, "a0 a0*")
    by_name = {e["name"]: e["passed"] for e in identity_suite(rel, rho=broken)}
    assert not by_name["alpha(eta_i) = e_i delta(rho)"]


def test_zero_q_rejected():
    with pytest.raises(ZeroParameter):
        build_relation(loops(1), {"v": 0})
