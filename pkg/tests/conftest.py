from __future__ import annotations

import pytest

from mqverify.linalg import Matrix
from mqverify.quiver import Quiver, double
from mqverify.reps import Representation
from mqverify.scalars import QQ


def loops(g: int):
    return double(Quiver(("v",), tuple((f"a{j}", "v", "v") for j in range(g))))


def two_vertex():
    return double(Quiver((1, 2), (("a", 1, 2),)))


def chain3():
    return double(Quiver((1, 2, 3), (("a", 1, 2), ("b", 2, 3))))


def r1() -> Representation:
    """One loop, alpha = 2, q = -1: g_a = diag(-1, 1), g_a* = diag(1, -1)."""
    qd = double(Quiver(("v",), (("a", "v", "v"),)))
    return Representation(qd, {"v": 2}, QQ, {"a": Matrix(QQ, [[0, 1], [0, 0]]), "a*": Matrix(QQ, [[0, 0], [-2, 0]])})


def two_vertex_rep() -> Representation:
    qd = two_vertex()
    return Representation(qd, {1: 1, 2: 1}, QQ, {"a": Matrix(QQ, [[1]]), "a*": Matrix(QQ, [[-2]])})


def scalar_rep() -> Representation:
    qd = double(Quiver(("v",), (("a", "v", "v"),)))
    return Representation(qd, {"v": 1}, QQ, {"a": Matrix(QQ, [[2]]), "a*": Matrix(QQ, [[3]])})


@pytest.fixture
def R1():
    return r1()
