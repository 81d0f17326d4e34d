"""Quivers, their doubles and graded triples, dimension and stability vectors."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import BadPairing, InvalidQuiver, NLevelTooSmall

STAR = "*"
RESERVED = frozenset({"t", "e"})


@dataclass(frozen=True)
class Arrow:
    name: str
    src: object
    tgt: object


@dataclass(frozen=True)
class Quiver:
    """A finite quiver with a fixed arrow ordering a_1, ..., a_g.

    ``vertices`` order is significant: it fixes the powers T^i used when
    lifting stability vectors to the tripled quiver.
    """

    vertices: tuple
    arrows: tuple[Arrow, ...]
    ordering: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arrows", tuple(Arrow(*a) if not isinstance(a, Arrow) else a for a in self.arrows))
        if not self.ordering:
            object.__setattr__(self, "ordering", tuple(a.name for a in self.arrows))
        else:
            object.__setattr__(self, "ordering", tuple(self.ordering))
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidQuiver("duplicate vertex ids")
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise InvalidQuiver("arrow names must be distinct")
        for a in self.arrows:
            if not a.name or a.name.endswith(STAR) or a.name in RESERVED:
                raise InvalidQuiver(f"bad arrow name {a.name!r} ('t', 'e' and the '*' suffix are reserved)")
            if a.src not in self.vertices or a.tgt not in self.vertices:
                raise InvalidQuiver(f"arrow {a.name} references an unknown vertex")
        if sorted(self.ordering) != sorted(names):
            raise InvalidQuiver("ordering must be a permutation of the arrow names")

    @property
    def g(self) -> int:
        return len(self.arrows)

    def arrow(self, name: str) -> Arrow:
        for a in self.arrows:
            if a.name == name:
                return a
        raise KeyError(name)

    def ordered_arrows(self) -> list[Arrow]:
        return [self.arrow(n) for n in self.ordering]


@dataclass(frozen=True)
class DoubledQuiver:
    """The double: every arrow a gains a reverse partner a*.

    ``H`` lists a_1, ..., a_g followed by a_1*, ..., a_g* (fixed ordering).
    """

    base: Quiver
    H: tuple[Arrow, ...] = field(init=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ordered = self.base.ordered_arrows()
        h = [Arrow(a.name, a.src, a.tgt) for a in ordered]
        h += [Arrow(a.name + STAR, a.tgt, a.src) for a in ordered]
        object.__setattr__(self, "H", tuple(h))
        object.__setattr__(self, "_index", {a.name: a for a in h})

    @property
    def vertices(self) -> tuple:
        return self.base.vertices

    @property
    def g(self) -> int:
        return self.base.g

    def arrow(self, name: str) -> Arrow:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown arrow {name!r}") from None

    def has_arrow(self, name: str) -> bool:
        return name in self._index

    def src(self, name: str):
        return self.arrow(name).src

    def tgt(self, name: str):
        return self.arrow(name).tgt

    def star(self, name: str) -> str:
        """The involution a <-> a*."""
        return name[:-1] if name.endswith(STAR) else name + STAR

    def sign(self, name: str) -> int:
        """+1 on original arrows, -1 on starred ones."""
        self.arrow(name)
        return -1 if name.endswith(STAR) else 1

    def omega(self) -> list[str]:
        """Original arrows in the fixed order a_1, ..., a_g."""
        return list(self.base.ordering)

    def arrow_names(self) -> list[str]:
        return [a.name for a in self.H]


def double(q: Quiver) -> DoubledQuiver:
    return DoubledQuiver(q)


@dataclass(frozen=True)
class TripledQuiver:
    """Graded tripled quiver over levels 0..N.

    Arrows are ``(h, n)`` for h in H and ``("t", i, n)`` for t-arrows, with
    n in [0, N-1]; each goes from level n to level n+1.
    """

    qd: DoubledQuiver
    N: int

    @property
    def vertices(self) -> list[tuple]:
        return [(i, n) for n in range(self.N + 1) for i in self.qd.vertices]

    def arrows(self) -> list[tuple]:
        out = []
        for n in range(self.N):
            for h in self.qd.H:
                out.append((h.name, n))
            for i in self.qd.vertices:
                out.append(("t", i, n))
        return out

    def src(self, arrow: tuple) -> tuple:
        if arrow[0] == "t" and len(arrow) == 3:
            return (arrow[1], arrow[2])
        return (self.qd.src(arrow[0]), arrow[1])

    def tgt(self, arrow: tuple) -> tuple:
        if arrow[0] == "t" and len(arrow) == 3:
            return (arrow[1], arrow[2] + 1)
        return (self.qd.tgt(arrow[0]), arrow[1] + 1)


def triple(qd: DoubledQuiver, N: int) -> TripledQuiver:
    if N < 2 * qd.g:
        raise NLevelTooSmall(f"N={N} is below the relation degree 2g={2 * qd.g}")
    return TripledQuiver(qd, N)


# ---------------------------------------------------------------------------
# dimension and stability vectors


def dim_vector(vertices: Sequence, values: Mapping | Sequence) -> dict:
    if isinstance(values, Mapping):
        out = {v: int(values.get(v, 0)) for v in vertices}
    else:
        if len(values) != len(vertices):
            raise InvalidQuiver("dimension vector length differs from vertex count")
        out = {v: int(x) for v, x in zip(vertices, values)}
    if any(x < 0 for x in out.values()):
        raise InvalidQuiver("dimension vector entries must be non-negative")
    return out


def lift_dimension(alpha: Mapping, N: int) -> dict:
    """Constant-in-level lift to the tripled quiver, keyed by (i, n)."""
    return {(i, n): a for n in range(N + 1) for i, a in alpha.items()}


def pairing_value(theta: Mapping, beta: Mapping) -> Fraction:
    return sum((Fraction(theta[k]) * beta.get(k, 0) for k in theta), Fraction(0))


def default_T(theta: Mapping, alpha: Mapping, N: int) -> Fraction:
    """Conservative stand-in for 'T >> 0'."""
    biggest = max((abs(Fraction(x)) for x in theta.values()), default=Fraction(0))
    return 1 + (N + 1) * sum(alpha.values()) * (1 + biggest)


def lift_stability(theta: Mapping, alpha: Mapping, N: int, T=None, vertices: Sequence | None = None) -> dict:
    """Stability weights on the tripled quiver.

    Vertex number i (1-based, in ``vertices`` order) contributes T^i at level
    N and theta_i - T^i at level 0; intermediate levels get weight 0.
    """
    if pairing_value(theta, alpha) != 0:
        raise BadPairing(f"theta pairs to {pairing_value(theta, alpha)} with alpha, not 0")
    if vertices is None:
        vertices = list(theta)
    if T is None:
        T = default_T(theta, alpha, N)
    T = Fraction(T)
    if T <= 0:
        raise ValueError("T must be positive")
    out = {}
    for idx, v in enumerate(vertices, start=1):
        th = Fraction(theta[v])
        for n in range(N + 1):
            out[(v, n)] = Fraction(0)
        out[(v, N)] += T ** idx
        out[(v, 0)] += th - T ** idx
    return out


def expected_rank(qd: DoubledQuiver, alpha: Mapping) -> int:
    """dim E - dim L - dim L' for the three-term complex."""
    return sum(alpha[h.src] * alpha[h.tgt] for h in qd.H) - 2 * sum(a * a for a in alpha.values())
