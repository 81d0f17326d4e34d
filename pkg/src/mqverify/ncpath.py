"""Noncommutative calculus in kQ^dbl[t].

Words are read left to right: ``e_{s(a)} a e_{t(a)} = a`` and ``a b`` is
nonzero only when t(a) = s(b). The central variable t is folded into a single
exponent per monomial. Evaluation on representations reverses word order
(see :mod:`mqverify.reps`).

Bimodule elements ``p (x) eta (x) r`` live in P_0, P_1 or their duals,
depending on the slot kind:

=========  =====================================  ==========================
kind       slot                                   p ends at / r starts at
=========  =====================================  ==========================
"arrow"    eta_a  (P_1)                           s(a) / t(a)
"vertex"   eta_i  (P_0)                           i / i
"darrow"   eta_a^v (dual of P_1)                  t(a) / s(a)
"dvertex"  eta_i^v (dual of P_0)                  i / i
=========  =====================================  ==========================

t is central and the tensor products are over S[t], so t-powers of a
bimodule term are also collected into one exponent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from .errors import NonComposable, ZeroParameter
from .quiver import DoubledQuiver
from .scalars import QQ, Field

# Words left to right; matrices act on the right, so evaluation reverses order.
WORD_ORDER = "left-to-right"


@dataclass(frozen=True, order=True)
class Mono:
    """e_start * h_1 ... h_k * t^tpow (tpow may be negative only inside
    dual-side operators that are evaluated on modules with invertible t)."""

    start: object
    word: tuple = ()
    tpow: int = 0

    def end(self, qd: DoubledQuiver):
        return qd.tgt(self.word[-1]) if self.word else self.start

    @property
    def degree(self) -> int:
        return len(self.word) + self.tpow


def make_mono(qd: DoubledQuiver, word, tpow: int = 0, start=None) -> Mono:
    word = tuple(word)
    for x, y in zip(word, word[1:]):
        if qd.tgt(x) != qd.src(y):
            raise NonComposable(f"{x} ends at {qd.tgt(x)!r} but {y} starts at {qd.src(y)!r}")
    if word:
        s = qd.src(word[0])
        if start is not None and start != s:
            raise NonComposable(f"word {' '.join(word)} does not start at {start!r}")
        start = s
    elif start is None:
        raise NonComposable("empty word needs an explicit vertex")
    return Mono(start, word, tpow)


def _mul_mono(qd: DoubledQuiver, a: Mono, b: Mono) -> Mono | None:
    if a.end(qd) != b.start:
        return None
    return Mono(a.start, a.word + b.word, a.tpow + b.tpow)


class PathPoly:
    """Canonical linear combination of monomials with field coefficients."""

    __slots__ = ("qd", "field", "terms")

    def __init__(self, qd: DoubledQuiver, field: Field = QQ, terms: Mapping[Mono, object] | None = None):
        self.qd = qd
        self.field = field
        self.terms: dict[Mono, object] = {}
        if terms:
            for m, c in terms.items():
                self._accum(m, c)

    def _accum(self, m: Mono, c):
        c = self.field(c)
        if not c:
            return
        s = self.terms.get(m)
        s = c if s is None else s + c
        if s:
            self.terms[m] = s
        else:
            self.terms.pop(m, None)

    # constructors ------------------------------------------------------------
    @classmethod
    def zero(cls, qd, field=QQ):
        return cls(qd, field)

    @classmethod
    def mono(cls, qd, field, word=(), tpow=0, start=None, coeff=1):
        return cls(qd, field, {make_mono(qd, word, tpow, start): coeff})

    @classmethod
    def idem(cls, qd, field, i):
        if i not in qd.vertices:
            raise KeyError(f"unknown vertex {i!r}")
        return cls.mono(qd, field, (), 0, i)

    @classmethod
    def arrow(cls, qd, field, name):
        qd.arrow(name)
        return cls.mono(qd, field, (name,))

    @classmethod
    def one(cls, qd, field=QQ):
        return cls(qd, field, {Mono(i): 1 for i in qd.vertices})

    @classmethod
    def tpower(cls, qd, field=QQ, k: int = 1):
        return cls(qd, field, {Mono(i, (), k): 1 for i in qd.vertices})

    @classmethod
    def vertex_scalars(cls, qd, field, q: Mapping):
        """sum_i q_i e_i."""
        return cls(qd, field, {Mono(i): q[i] for i in qd.vertices})

    # arithmetic --------------------------------------------------------------
    def _like(self, other: PathPoly):
        if not isinstance(other, PathPoly):
            raise TypeError("PathPoly operand expected")
        if other.qd is not self.qd and other.qd != self.qd:
            raise NonComposable("polynomials over different quivers")

    def copy(self) -> PathPoly:
        p = PathPoly(self.qd, self.field)
        p.terms = dict(self.terms)
        return p

    def __add__(self, other: PathPoly) -> PathPoly:
        self._like(other)
        out = self.copy()
        for m, c in other.terms.items():
            out._accum(m, c)
        return out

    def __neg__(self) -> PathPoly:
        out = PathPoly(self.qd, self.field)
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __sub__(self, other: PathPoly) -> PathPoly:
        return self + (-other)

    def scale(self, c) -> PathPoly:
        out = PathPoly(self.qd, self.field)
        for m, x in self.terms.items():
            out._accum(m, x * self.field(c))
        return out

    def __mul__(self, other):
        if not isinstance(other, PathPoly):
            return self.scale(other)
        self._like(other)
        out = PathPoly(self.qd, self.field)
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mul_mono(self.qd, m1, m2)
                if m is not None:
                    out._accum(m, c1 * c2)
        return out

    def __rmul__(self, c):
        return self.scale(c)

    def __pow__(self, k: int) -> PathPoly:
        out = PathPoly.one(self.qd, self.field)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, PathPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    # structure ---------------------------------------------------------------
    def degrees(self) -> set[int]:
        return {m.degree for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> int | None:
        ds = self.degrees()
        if len(ds) == 1:
            return next(iter(ds))
        return None

    def peirce(self, i, j) -> PathPoly:
        """e_i * self * e_j."""
        out = PathPoly(self.qd, self.field)
        out.terms = {m: c for m, c in self.terms.items() if m.start == i and m.end(self.qd) == j}
        return out

    def is_peirce_diagonal(self) -> bool:
        return all(m.start == m.end(self.qd) for m in self.terms)

    def items(self) -> Iterator[tuple[Mono, object]]:
        return iter(sorted(self.terms.items(), key=lambda kv: _mono_key(kv[0])))

    def __repr__(self):
        return f"PathPoly({format_poly(self)})"

    def __str__(self):
        return format_poly(self)


def _mono_key(m: Mono):
    return (len(m.word), str(m.start), m.word, m.tpow)


def format_mono(m: Mono) -> str:
    parts = []
    if m.word:
        parts.extend(m.word)
    else:
        parts.append(f"e({m.start})")
    if m.tpow == 1:
        parts.append("t")
    elif m.tpow:
        parts.append(f"t^{m.tpow}")
    return " ".join(parts)


def _format_coeff(c, field) -> str:
    return field.serialize(c)


def format_poly(p: PathPoly) -> str:
    if p.is_zero():
        return "0"
    return " + ".join(f"[{_format_coeff(c, p.field)}] {format_mono(m)}" for m, c in p.items())


def normalize(qd: DoubledQuiver, raw, field: Field = QQ) -> PathPoly:
    """Canonical form of a raw expression.

    ``raw`` is a list of ``(coeff, factors)`` terms; each factor is an arrow
    name, ``"t"``, or ``("e", vertex)``. Adjacent arrows must compose;
    idempotents multiply to zero on mismatch.
    """
    if isinstance(raw, PathPoly):
        return raw.copy()
    total = PathPoly(qd, field)
    for coeff, factors in raw:
        term = PathPoly.one(qd, field).scale(coeff)
        word: list[str] = []
        for f in factors:
            if isinstance(f, tuple) and f and f[0] == "e":
                factor = PathPoly.idem(qd, field, f[1])
                word = []
            elif f == "t":
                factor = PathPoly.tpower(qd, field, 1)
            else:
                if word and qd.tgt(word[-1]) != qd.src(f):
                    raise NonComposable(f"{word[-1]} ends at {qd.tgt(word[-1])!r} but {f} starts at {qd.src(f)!r}")
                factor = PathPoly.arrow(qd, field, f)
                word.append(f)
            term = term * factor
        total = total + term
    return total


# ---------------------------------------------------------------------------
# bimodule elements


SLOT_KINDS = ("arrow", "vertex", "darrow", "dvertex")


def slot_ends(qd: DoubledQuiver, slot: tuple) -> tuple:
    """(vertex where the left factor must end, vertex where the right factor
    must start) for a slot."""
    kind, x = slot
    if kind == "arrow":
        return qd.src(x), qd.tgt(x)
    if kind == "darrow":
        return qd.tgt(x), qd.src(x)
    if kind in ("vertex", "dvertex"):
        if x not in qd.vertices:
            raise KeyError(f"unknown vertex {x!r}")
        return x, x
    raise ValueError(f"unknown slot kind {kind!r}")


@dataclass(frozen=True, order=True)
class BTerm:
    left: Mono  # tpow always 0
    slot: tuple
    right: Mono  # carries the whole t-power


class BimodElem:
    """Formal sum of p (x) eta (x) r with slot-compatibility enforced."""

    __slots__ = ("qd", "field", "terms")

    def __init__(self, qd: DoubledQuiver, field: Field = QQ):
        self.qd = qd
        self.field = field
        self.terms: dict[BTerm, object] = {}

    def _accum(self, left: Mono, slot: tuple, right: Mono, c):
        c = self.field(c)
        if not c:
            return
        le, rs = slot_ends(self.qd, slot)
        if left.end(self.qd) != le or right.start != rs:
            raise NonComposable(f"slot {slot} is incompatible with {format_mono(left)} | {format_mono(right)}")
        key = BTerm(Mono(left.start, left.word, 0), slot, Mono(right.start, right.word, right.tpow + left.tpow))
        s = self.terms.get(key)
        s = c if s is None else s + c
        if s:
            self.terms[key] = s
        else:
            self.terms.pop(key, None)

    @classmethod
    def generator(cls, qd, field, slot) -> BimodElem:
        le, rs = slot_ends(qd, slot)
        out = cls(qd, field)
        out._accum(Mono(le), slot, Mono(rs), 1)
        return out

    @classmethod
    def from_parts(cls, p: PathPoly, slot: tuple, r: PathPoly) -> BimodElem:
        """p (x) eta (x) r, dropping incompatible monomial pairs (they are
        zero after the idempotents act)."""
        out = cls(p.qd, p.field)
        le, rs = slot_ends(p.qd, slot)
        for m1, c1 in p.terms.items():
            if m1.end(p.qd) != le:
                continue
            for m2, c2 in r.terms.items():
                if m2.start != rs:
                    continue
                out._accum(m1, slot, m2, c1 * c2)
        return out

    def copy(self) -> BimodElem:
        out = BimodElem(self.qd, self.field)
        out.terms = dict(self.terms)
        return out

    def __add__(self, other: BimodElem) -> BimodElem:
        out = self.copy()
        for k, c in other.terms.items():
            out._accum(k.left, k.slot, k.right, c)
        return out

    def __neg__(self) -> BimodElem:
        out = BimodElem(self.qd, self.field)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other: BimodElem) -> BimodElem:
        return self + (-other)

    def scale(self, c) -> BimodElem:
        out = BimodElem(self.qd, self.field)
        for k, x in self.terms.items():
            out._accum(k.left, k.slot, k.right, x * self.field(c))
        return out

    def lmul(self, p: PathPoly) -> BimodElem:
        """p * self."""
        out = BimodElem(self.qd, self.field)
        for m, c in p.terms.items():
            for k, x in self.terms.items():
                nm = _mul_mono(self.qd, m, k.left)
                if nm is not None:
                    out._accum(Mono(nm.start, nm.word, 0), k.slot, Mono(k.right.start, k.right.word, k.right.tpow + nm.tpow), c * x)
        return out

    def rmul(self, p: PathPoly) -> BimodElem:
        """self * p."""
        out = BimodElem(self.qd, self.field)
        for k, x in self.terms.items():
            for m, c in p.terms.items():
                nm = _mul_mono(self.qd, k.right, m)
                if nm is not None:
                    out._accum(k.left, k.slot, nm, x * c)
        return out

    def __eq__(self, other):
        if not isinstance(other, BimodElem):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (str(kv[0].slot), _mono_key(kv[0].left), _mono_key(kv[0].right)))

    def slots(self) -> set:
        return {k.slot for k in self.terms}

    def component(self, slot: tuple) -> BimodElem:
        out = BimodElem(self.qd, self.field)
        out.terms = {k: c for k, c in self.terms.items() if k.slot == slot}
        return out

    def slot_compatible(self) -> bool:
        for k in self.terms:
            le, rs = slot_ends(self.qd, k.slot)
            if k.left.end(self.qd) != le or k.right.start != rs:
                return False
        return True

    def __repr__(self):
        return f"BimodElem({format_bimod(self)})"

    def __str__(self):
        return format_bimod(self)


def _slot_name(slot):
    kind, x = slot
    return {"arrow": f"eta[{x}]", "vertex": f"eta[{x}]", "darrow": f"eta^v[{x}]", "dvertex": f"eta^v[{x}]"}[kind]


def format_bimod(b: BimodElem) -> str:
    if b.is_zero():
        return "0"
    return " + ".join(
        f"[{b.field.serialize(c)}] ({format_mono(k.left)}) {_slot_name(k.slot)} ({format_mono(k.right)})" for k, c in b.items()
    )


def derive(p: PathPoly) -> BimodElem:
    """Universal S[t]-derivation: a -> 1 (x) eta_a (x) 1, killing e_i and t."""
    qd = p.qd
    out = BimodElem(qd, p.field)
    for m, c in p.terms.items():
        w = m.word
        for j, h in enumerate(w):
            left = Mono(m.start, w[:j], 0)
            right = Mono(qd.tgt(h), w[j + 1:], m.tpow)
            out._accum(left, ("arrow", h), right, c)
    return out


def dualize_term(qd: DoubledQuiver, key: BTerm, target: object) -> tuple[Mono, tuple, Mono]:
    """p (x) eta_c (x) r, appearing in the image of eta_target, dualizes to
    r eta_target^v p (the left factor of the dual term is r)."""
    r = key.right
    p = key.left
    kind = {"arrow": "darrow", "vertex": "dvertex"}
    _ = kind[key.slot[0]]
    return Mono(r.start, r.word, 0), target, Mono(p.start, p.word, r.tpow)


# ---------------------------------------------------------------------------
# relation elements


@dataclass
class Relation:
    qd: DoubledQuiver
    field: Field
    q: dict
    G: dict  # arrow name -> G_a
    L: dict  # arrow name -> L_a (for a in H)
    R: dict
    D: PathPoly
    Dstar: PathPoly
    rho: PathPoly
    qpoly: PathPoly


def build_relation(qd: DoubledQuiver, q: Mapping, field: Field = QQ) -> Relation:
    """G_a = t^2 + a a*, D = G_{a_1}...G_{a_g}, D* = q G_{a_g*}...G_{a_1*},
    rho = D - D*, with the L/R factors around each G."""
    for i in qd.vertices:
        if not field(q[i]):
            raise ZeroParameter(f"q at vertex {i!r} is zero")
    t2 = PathPoly.tpower(qd, field, 2)
    G = {}
    for h in qd.H:
        G[h.name] = t2 + PathPoly.mono(qd, field, (h.name, qd.star(h.name)))
    omega = qd.omega()
    one = PathPoly.one(qd, field)

    def prod(names):
        out = one
        for n in names:
            out = out * G[n]
        return out

    L, R = {}, {}
    stars = [qd.star(a) for a in omega]
    for j, a in enumerate(omega):
        L[a] = prod(omega[:j])
        R[a] = prod(omega[j + 1:])
        # L_{a_j*} = G_{a_g*}...G_{a_{j+1}*},  R_{a_j*} = G_{a_{j-1}*}...G_{a_1*}
        L[stars[j]] = prod(list(reversed(stars[j + 1:])))
        R[stars[j]] = prod(list(reversed(stars[:j])))
    qpoly = PathPoly.vertex_scalars(qd, field, q)
    D = prod(omega)
    Dstar = qpoly * prod(list(reversed(stars)))
    return Relation(qd, field, {i: field(q[i]) for i in qd.vertices}, G, L, R, D, Dstar, D - Dstar, qpoly)


@dataclass
class Differentials:
    alpha: dict  # vertex -> BimodElem in P_1 (arrow slots)
    beta: dict  # arrow -> BimodElem in P_0 (vertex slots)
    alpha_dual: dict  # arrow -> BimodElem in P_0^v (dvertex slots)


def delta_G(rel: Relation, a: str) -> BimodElem:
    return derive(rel.G[a])


def differential_components(rel: Relation) -> Differentials:
    qd, field = rel.qd, rel.field
    alpha = {}
    for i in qd.vertices:
        acc = BimodElem(qd, field)
        for a in qd.omega():
            if qd.src(a) == i:
                acc = acc + delta_G(rel, a).lmul(rel.L[a]).rmul(rel.R[a])
            if qd.tgt(a) == i:
                s = qd.star(a)
                acc = acc - delta_G(rel, s).lmul(rel.L[s]).rmul(rel.R[s]).lmul(rel.qpoly)
        alpha[i] = acc
    beta = {}
    for h in qd.H:
        a = PathPoly.arrow(qd, field, h.name)
        beta[h.name] = BimodElem.from_parts(a, ("vertex", h.tgt), PathPoly.idem(qd, field, h.tgt)) - BimodElem.from_parts(
            PathPoly.idem(qd, field, h.src), ("vertex", h.src), a
        )
    return Differentials(alpha, beta, transpose_alpha(qd, field, alpha))


def transpose_alpha(qd: DoubledQuiver, field: Field, alpha: Mapping) -> dict:
    """alpha^v(eta_c^v) = sum over terms p (x) eta_c (x) r of alpha(eta_i) of
    r eta_i^v p."""
    out = {h.name: BimodElem(qd, field) for h in qd.H}
    for i, elem in alpha.items():
        for key, c in elem.terms.items():
            left, _, right = dualize_term(qd, key, i)
            out[key.slot[1]]._accum(left, ("dvertex", i), right, c)
    return out


def alpha_dual_closed_form(rel: Relation) -> dict:
    """The two-case closed formula for alpha^v(eta_a^v), written with
    a in Omega and its partner a*."""
    qd, field = rel.qd, rel.field
    out = {}
    for a in qd.omega():
        s = qd.star(a)
        A = PathPoly.arrow(qd, field, a)
        As = PathPoly.arrow(qd, field, s)
        sa, ta = qd.src(a), qd.tgt(a)
        # a in Omega:  a* R_a eta_{s(a)} L_a - q R_{a*} eta_{t(a)} L_{a*} a*
        out[a] = BimodElem.from_parts(As * rel.R[a], ("dvertex", sa), rel.L[a]) - BimodElem.from_parts(
            rel.qpoly * rel.R[s], ("dvertex", ta), rel.L[s] * As
        )
        # partner:  R_a eta_{s(a)} L_a a - q a R_{a*} eta_{t(a)} L_{a*}
        out[s] = BimodElem.from_parts(rel.R[a], ("dvertex", sa), rel.L[a] * A) - BimodElem.from_parts(
            rel.qpoly * A * rel.R[s], ("dvertex", ta), rel.L[s]
        )
    return out


def apply_alpha_dual(alpha_dual: Mapping, elem: BimodElem) -> BimodElem:
    """Extend alpha^v bimodule-linearly to an element of the dual of P_1."""
    out = BimodElem(elem.qd, elem.field)
    for key, c in elem.terms.items():
        if key.slot[0] != "darrow":
            raise ValueError("alpha^v is defined on dual-arrow slots only")
        left = PathPoly(elem.qd, elem.field, {key.left: 1})
        right = PathPoly(elem.qd, elem.field, {key.right: 1})
        out = out + alpha_dual[key.slot[1]].lmul(left).rmul(right).scale(c)
    return out


def alpha_dual_lemma(rel: Relation, alpha_dual: Mapping) -> list[dict]:
    """Both sides of the two alpha^v identities for every a in Omega.

    alpha^v(eta_a^v a - a* eta_{a*}^v) = G_{a*} X - X G_{a*},  X = q R_{a*} eta_{t(a)}^v L_{a*}
    alpha^v(a eta_a^v - eta_{a*}^v a*) = G_a Y - Y G_a,        Y = R_a eta_{s(a)}^v L_a
    """
    qd, field = rel.qd, rel.field
    out = []
    for a in qd.omega():
        s = qd.star(a)
        A = PathPoly.arrow(qd, field, a)
        As = PathPoly.arrow(qd, field, s)
        ea = BimodElem.generator(qd, field, ("darrow", a))
        es = BimodElem.generator(qd, field, ("darrow", s))
        X = BimodElem.from_parts(rel.qpoly * rel.R[s], ("dvertex", qd.tgt(a)), rel.L[s])
        Y = BimodElem.from_parts(rel.R[a], ("dvertex", qd.src(a)), rel.L[a])
        lhs1 = apply_alpha_dual(alpha_dual, ea.rmul(A) - es.lmul(As))
        rhs1 = X.lmul(rel.G[s]) - X.rmul(rel.G[s])
        lhs2 = apply_alpha_dual(alpha_dual, ea.lmul(A) - es.rmul(As))
        rhs2 = Y.lmul(rel.G[a]) - Y.rmul(rel.G[a])
        out.append({"arrow": a, "first": (lhs1, rhs1), "second": (lhs2, rhs2)})
    return out


# ---------------------------------------------------------------------------
# identity suite


def identity_suite(rel: Relation, rho: PathPoly | None = None) -> list[dict]:
    """Symbolic checks in the free algebra. ``rho`` overrides the relation
    (negative controls)."""
    qd, field = rel.qd, rel.field
    rho = rel.rho if rho is None else rho
    report = []

    bad = []
    for h in qd.H:
        a = PathPoly.arrow(qd, field, h.name)
        s = qd.star(h.name)
        As = PathPoly.arrow(qd, field, s)
        if not (rel.G[h.name] * a - a * rel.G[s]).is_zero():
            bad.append(f"G_{h.name} {h.name} != {h.name} G_{s}")
        if not (As * rel.G[h.name] - rel.G[s] * As).is_zero():
            bad.append(f"{s} G_{h.name} != G_{s} {s}")
    report.append({"name": "G_a intertwining", "passed": not bad, "detail": "; ".join(bad)})

    off = [(i, j) for i in qd.vertices for j in qd.vertices if i != j and not rho.peirce(i, j).is_zero()]
    total = PathPoly.zero(qd, field)
    for i in qd.vertices:
        total = total + rho.peirce(i, i)
    ok = not off and total == rho
    report.append({"name": "Peirce diagonality of rho", "passed": ok, "detail": f"off-diagonal components at {off}" if off else ""})

    drho = derive(rho)
    diffs = differential_components(rel)
    bad = [str(i) for i in qd.vertices if not (diffs.alpha[i] - drho.lmul(PathPoly.idem(qd, field, i))).is_zero()]
    report.append({"name": "alpha(eta_i) = e_i delta(rho)", "passed": not bad, "detail": f"fails at vertices {bad}" if bad else ""})

    deg_ok = rho.is_homogeneous() and (rho.is_zero() or rho.degree == 2 * qd.g)
    report.append({"name": "rho homogeneous of degree 2g", "passed": deg_ok, "detail": "" if deg_ok else f"degrees {sorted(rho.degrees())}"})
    return report
