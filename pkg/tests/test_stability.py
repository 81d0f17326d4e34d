from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest

from mqverify.errors import BadPrime, FieldMismatch, IndexMismatch, TooLarge
from mqverify.linalg import Matrix
from mqverify.quiver import Quiver, double
from mqverify.reps import Representation, direct_sum, induce, sample_rep
from mqverify.scalars import QQ, CyclotomicField
from mqverify.stability import (
    INCONCLUSIVE,
    SEMISTABLE_ONLY,
    STABLE,
    UNSTABLE,
    _specialize,
    gaussian_binomial,
    good_prime,
    ind_compat_report,
    pairing,
    search_subreps,
    subspace_count,
    subspaces,
    verdict,
    witness_is_invariant,
)

from conftest import loops, r1, two_vertex, two_vertex_rep


def naive_subspaces(p: int, d: int) -> set[frozenset]:
    """Every subspace of F_p^d as the frozenset of its vectors."""
    vecs = list(itertools.product(range(p), repeat=d))
    out = set()
    for k in range(d + 1):
        for gens in itertools.combinations(vecs, k):
            span = {tuple([0] * d)}
            for g in gens:
                span = {tuple((x + c * y) % p for x, y in zip(v, g)) for v in span for c in range(p)}
            out.add(frozenset(span))
    return out


@pytest.mark.parametrize("p,d", [(2, 1), (2, 2), (2, 3), (3, 2), (5, 2), (3, 3)])
def test_subspace_enumeration_matches_naive(p, d):
    ours = subspaces(p, d)
    naive = naive_subspaces(p, d)
    assert len(ours) == len(naive) == subspace_count(p, d)
    for k in range(d + 1):
        assert sum(1 for s in ours if s.dim == k) == gaussian_binomial(d, k, p)
    spans = set()
    for s in ours:
        span = {tuple([0] * d)}
        for g in s.rows:
            span = {tuple((x + c * y) % p for x, y in zip(v, g)) for v in span for c in range(p)}
        spans.add(frozenset(span))
    assert spans == naive


def naive_min_pairing(R: Representation, theta, p: int):
    """Brute force over all subspace tuples with a direct closure check."""
    M = _specialize(R, p)
    verts = list(M.qd.vertices)
    spaces = {v: naive_subspaces(p, M.alpha[v]) for v in verts}
    best = None
    for choice in itertools.product(*(spaces[v] for v in verts)):
        U = dict(zip(verts, choice))
        dims = {v: round(math.log(len(U[v]), p)) for v in verts}
        if all(dims[v] == 0 for v in verts) or all(dims[v] == M.alpha[v] for v in verts):
            continue
        ok = True
        for h in M.qd.H:
            A = [[int(x.r) for x in r] for r in M.X[h.name].rows]
            for u in U[h.src]:
                w = tuple(sum(a * x for a, x in zip(row, u)) % p for row in A)
                if w not in U[h.tgt]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            val = pairing(theta, dims)
            best = val if best is None or val < best else best
    return best


def test_pairing():
    assert pairing({1: 1, 2: -1}, {1: 1, 2: 0}) == 1
    assert pairing({1: 0, 2: 0}, {1: 3, 2: 4}) == 0
    with pytest.raises(IndexMismatch):
        pairing({1: 1}, {2: 1})


def test_r1_certified_stable():
    v = verdict(r1(), {"v": 0}, 5)
    assert v.kind == STABLE and v.stable
    # q = -1 is a primitive root for alpha = 2: stable at every theta (only theta = 0 here)
    assert search_subreps(_specialize(r1(), 5), {"v": 0}).subreps == 0


def test_r1_sum_semistable_with_witness():
    RR = direct_sum(r1(), r1())
    v = verdict(RR, {"v": 0}, 5)
    assert v.kind == SEMISTABLE_ONLY and v.semistable and v.stable is False
    assert v.witness.dims == {"v": 2} and v.witness.pairing == 0
    assert v.witness_lifts
    assert witness_is_invariant(_specialize(RR, 5), v.witness)


def test_two_vertex_stable():
    assert verdict(two_vertex_rep(), {1: 1, 2: -1}).kind == STABLE


def test_unstable_and_inconclusive_controls():
    qd = two_vertex()
    R = Representation(qd, {1: 1, 2: 1}, QQ, {"a": Matrix(QQ, [[0]]), "a*": Matrix(QQ, [[1]])})
    assert verdict(R, {1: 1, 2: -1}).kind == STABLE
    v = verdict(R, {1: -1, 2: 1})
    assert v.kind == UNSTABLE and v.witness.dims == {1: 1, 2: 0} and v.witness_lifts
    # J has eigenlines mod 5 but not over Q; X_a kills exactly one of them
    qd = double(Quiver((1, 2), (("b", 1, 1), ("a", 1, 2))))
    z = lambda r, c: Matrix.zeros(QQ, r, c)
    X = {"b": Matrix(QQ, [[0, -1], [1, 0]]), "b*": z(2, 2), "a": Matrix(QQ, [[2, 1]]), "a*": z(2, 1)}
    R = Representation(qd, {1: 2, 2: 1}, QQ, X)
    v = verdict(R, {1: -1, 2: 2}, 5, max_prime=5)
    assert v.kind == INCONCLUSIVE and v.semistable is None and v.witness_lifts is False
    assert v.witness.pairing == -1
    # over Q the only proper subrep is (0, 1), pairing 2: the retry at 7 certifies that
    v = verdict(R, {1: -1, 2: 2}, 5)
    assert v.kind == STABLE and v.stats["primes_tried"] == [5, 7]


@pytest.mark.parametrize(
    "R,theta",
    [
        (r1(), {"v": 0}),
        (two_vertex_rep(), {1: 1, 2: -1}),
        (two_vertex_rep(), {1: -1, 2: 1}),
        (sample_rep(loops(2), {"v": 2}, {"v": 1}, 3).rep, {"v": 0}),
    ],
)
def test_search_matches_naive_oracle(R, theta):
    Mp = _specialize(R, 5)
    guided = search_subreps(Mp, theta)
    brute = search_subreps(Mp, theta, brute_force=True)
    oracle = naive_min_pairing(R, theta, 5)
    assert guided.min_pairing == brute.min_pairing == oracle
    assert guided.subreps == brute.subreps


def test_guided_matches_brute_force_on_sum():
    Mp = _specialize(direct_sum(r1(), r1()), 5)
    guided = search_subreps(Mp, {"v": 0})
    brute = search_subreps(Mp, {"v": 0}, brute_force=True)
    assert (guided.min_pairing, guided.subreps) == (brute.min_pairing, brute.subreps)
    # invariant lines of R1 + R1 mod 5 are the diagonal copies {(x, cx)}: one per point of P^1(F_5)
    assert brute.subreps == 6


def test_good_prime_skips_denominators():
    qd = loops(1)
    R = Representation(qd, {"v": 1}, QQ, {"a0": Matrix(QQ, [[Fraction(6, 5)]]), "a0*": Matrix(QQ, [[Fraction(1, 7)]])})
    assert good_prime(R, 5, 11) == 11
    with pytest.raises(BadPrime):
        good_prime(R, 5, 7)
    assert good_prime(r1()) == 5


def test_verdict_preconditions():
    with pytest.raises(BadPrime):
        verdict(r1(), {"v": 0}, 4)
    F = CyclotomicField(3)
    Rz = sample_rep(loops(2), {"v": 3}, {"v": F.zeta(1)}, 3, F).rep
    with pytest.raises(FieldMismatch):
        verdict(Rz, {"v": 0})
    with pytest.raises(TooLarge):
        verdict(direct_sum(r1(), r1()), {"v": 0}, max_total_dim=3)


def test_ind_compat_examples():
    assert ind_compat_report(r1(), {"v": 0}, 2).agree
    rep = ind_compat_report(direct_sum(r1(), r1()), {"v": 0}, 2, max_total_dim=12)
    assert rep.agree and rep.graded.kind == SEMISTABLE_ONLY
    rep = ind_compat_report(two_vertex_rep(), {1: 1, 2: -1}, 2)
    assert rep.agree and rep.base.kind == STABLE
