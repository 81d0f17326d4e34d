"""Representations of the double, graded modules over the tripled quiver,
and the operations that move between them.

Arrow matrices are maps V_{s(h)} -> V_{t(h)}. Since words in
:mod:`mqverify.ncpath` read left to right, a word h_1 ... h_k acts as the
matrix product X_{h_k} ... X_{h_1}.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import (
    ConsistencyError,
    DegreeOverflow,
    ObstructionError,
    RetryExhausted,
    ShapeMismatch,
    SingularG,
    SingularGroupElem,
    SingularMatrix,
    UnsupportedShape,
    VertexMismatch,
)
from .linalg import Matrix, block_diag, rank_kernel
from .ncpath import Mono, PathPoly
from .quiver import DoubledQuiver, TripledQuiver, triple
from .scalars import QQ, DualField, Field, field_of

SAMPLE_BOX = 3
SAMPLE_RETRIES = 64


# ---------------------------------------------------------------------------
# data types


@dataclass
class Representation:
    qd: DoubledQuiver
    alpha: dict
    field: Field
    X: dict  # arrow name -> Matrix of shape alpha[t(h)] x alpha[s(h)]

    def __post_init__(self):
        for h in self.qd.H:
            m = self.X.get(h.name)
            if m is None:
                raise ShapeMismatch(f"missing matrix for arrow {h.name}")
            if m.shape != (self.alpha[h.tgt], self.alpha[h.src]):
                raise ShapeMismatch(f"arrow {h.name}: expected {(self.alpha[h.tgt], self.alpha[h.src])}, got {m.shape}")
            if m.field != self.field:
                raise ShapeMismatch(f"arrow {h.name} is over {m.field!r}, not {self.field!r}")

    def vertices(self) -> list:
        return list(self.qd.vertices)

    def arrow_data(self) -> list[tuple]:
        """(src, tgt, matrix) for every arrow; used by the subspace search."""
        return [(h.src, h.tgt, self.X[h.name]) for h in self.qd.H]

    def dims(self) -> dict:
        return dict(self.alpha)

    def map_field(self, fn, field: Field) -> Representation:
        return Representation(self.qd, dict(self.alpha), field, {k: m.map(fn, field) for k, m in self.X.items()})


def direct_sum(r1: Representation, r2: Representation) -> Representation:
    if r1.qd != r2.qd or r1.field != r2.field:
        raise ShapeMismatch("direct sum of representations over different quivers or fields")
    alpha = {i: r1.alpha[i] + r2.alpha[i] for i in r1.qd.vertices}
    X = {h: block_diag(r1.field, [r1.X[h], r2.X[h]]) for h in r1.X}
    return Representation(r1.qd, alpha, r1.field, X)


@dataclass
class GradedModule:
    """A representation of the tripled quiver: fibers at (i, n), matrices on
    every arrow ``(h, n)`` and ``("t", i, n)``."""

    tq: TripledQuiver
    field: Field
    dims: dict  # (i, n) -> int
    maps: dict  # arrow tuple -> Matrix
    a_module: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for arr in self.tq.arrows():
            m = self.maps.get(arr)
            s, t = self.tq.src(arr), self.tq.tgt(arr)
            if m is None:
                raise ShapeMismatch(f"missing matrix for {arr}")
            if m.shape != (self.dims[t], self.dims[s]):
                raise ShapeMismatch(f"{arr}: expected {(self.dims[t], self.dims[s])}, got {m.shape}")

    @property
    def N(self) -> int:
        return self.tq.N

    @property
    def qd(self) -> DoubledQuiver:
        return self.tq.qd

    def vertices(self) -> list:
        return self.tq.vertices

    def arrow_data(self) -> list[tuple]:
        return [(self.tq.src(a), self.tq.tgt(a), self.maps[a]) for a in self.tq.arrows()]

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def t_map(self, i, lo: int, hi: int) -> Matrix:
        """t^(hi - lo) from (i, lo) to (i, hi)."""
        out = Matrix.identity(self.field, self.dims[(i, lo)])
        for n in range(lo, hi):
            out = self.maps[("t", i, n)] @ out
        return out

    def map_field(self, fn, field: Field) -> GradedModule:
        return GradedModule(self.tq, field, dict(self.dims), {k: m.map(fn, field) for k, m in self.maps.items()}, self.a_module, dict(self.meta))


# ---------------------------------------------------------------------------
# evaluation


def _eval_mono(m: Mono, M: GradedModule, n: int) -> Matrix:
    qd = M.qd
    i = m.start
    level = n
    out = Matrix.identity(M.field, M.dims[(i, n)])
    k = m.tpow
    if k > 0:
        if n + k > M.N:
            raise DegreeOverflow(f"t^{k} from level {n} leaves [0, {M.N}]")
        out = M.t_map(i, n, n + k)
        level = n + k
    elif k < 0 and n + k >= 0:
        try:
            out = M.t_map(i, n + k, n).inverse()
        except SingularMatrix:
            raise SingularMatrix(f"t is not invertible at vertex {i!r} between levels {n + k} and {n}") from None
        level = n + k
    v = i
    for h in m.word:
        if level + 1 > M.N:
            raise DegreeOverflow(f"arrow {h} from level {level} leaves [0, {M.N}]")
        out = M.maps[(h, level)] @ out
        level += 1
        v = qd.tgt(h)
    if k < 0 and n + k < 0:
        try:
            out = M.t_map(v, level + k, level).inverse() @ out
        except SingularMatrix:
            raise SingularMatrix(f"t is not invertible at vertex {v!r}") from None
        level += k
    return out


def evaluate_block(p: PathPoly, M: GradedModule, i, j, n: int) -> Matrix:
    """Action of e_i p e_j from fiber (i, n) to fiber (j, n + deg p)."""
    d = p.degree
    if d is None and not p.is_zero():
        raise ValueError("evaluate needs a homogeneous element")
    d = d or 0
    if n < 0 or n + d > M.N:
        raise DegreeOverflow(f"degree {d} from level {n} leaves [0, {M.N}]")
    out = Matrix.zeros(M.field, M.dims[(j, n + d)], M.dims[(i, n)])
    for m, c in p.terms.items():
        if m.start == i and m.end(M.qd) == j:
            out = out + _eval_mono(m, M, n).scale(M.field(c))
    return out


def evaluate(p: PathPoly, M: GradedModule, i, n: int) -> Matrix:
    """Action of p on the (i, n) fiber.

    p must be supported on the left at i. The result maps into the direct sum
    of the fibers (j, n + deg p) over the end vertices j, stacked in vertex
    order; for Peirce-diagonal p this is just the (i, n + deg p) fiber.
    """
    starts = {m.start for m in p.terms}
    if starts - {i}:
        raise VertexMismatch(f"element has left support {sorted(map(str, starts))}, not {i!r}")
    ends = [j for j in M.qd.vertices if any(m.end(M.qd) == j for m in p.terms)] or [i]
    blocks = [evaluate_block(p, M, i, j, n) for j in ends]
    return Matrix.vstack(M.field, blocks, M.dims[(i, n)])


# ---------------------------------------------------------------------------
# the multiplicative relation on ungraded representations


def common_field(values) -> Field:
    """The field of the first non-rational scalar, else Q."""
    out = QQ
    for v in values:
        f = field_of(v)
        if f != QQ:
            return f
    return out


def q_power(q: Mapping, alpha: Mapping, field: Field):
    out = field.one()
    for i, a in alpha.items():
        out = out * field(q[i]) ** a
    return out


def check_obstruction(q: Mapping, alpha: Mapping, field: Field):
    qa = q_power(q, alpha, field)
    if qa != field.one():
        raise ObstructionError(
            f"q^alpha = {field.serialize(qa)} != 1: no representation with this dimension vector exists "
            "(a product of determinants forces q^alpha = 1)",
            q_power=field.serialize(qa),
        )
    return qa


def g_blocks(R: Representation) -> dict:
    """g_h = Id + X_{h*} X_h on the fiber at s(h) (the action of the word h h*)."""
    out = {}
    for h in R.qd.H:
        s = R.qd.star(h.name)
        out[h.name] = Matrix.identity(R.field, R.alpha[h.src]) + R.X[s] @ R.X[h.name]
    return out


def _vertex_product(R: Representation, g: dict, names: Sequence[str], i) -> Matrix:
    """Action of G_{names[0]} ... G_{names[-1]} at vertex i (t = 1)."""
    out = Matrix.identity(R.field, R.alpha[i])
    for n in names:
        if R.qd.src(n) == i:
            out = g[n] @ out
    return out


def relation_products(R: Representation, g: dict | None = None) -> tuple[dict, dict]:
    """Per-vertex actions of D and of D*/q at t = 1."""
    g = g_blocks(R) if g is None else g
    omega = R.qd.omega()
    stars = [R.qd.star(a) for a in reversed(omega)]
    D = {i: _vertex_product(R, g, omega, i) for i in R.qd.vertices}
    Ds = {i: _vertex_product(R, g, stars, i) for i in R.qd.vertices}
    return D, Ds


@dataclass
class RelationCheck:
    q_power: object
    residual: dict  # vertex -> Matrix
    ok: bool

    def to_json(self, field: Field) -> dict:
        return {
            "q_power": field.serialize(self.q_power),
            "residual_zero": self.ok,
            "residual": {str(i): [[field.serialize(x) for x in r] for r in m.rows] for i, m in self.residual.items()},
        }


def check_rep(R: Representation, q: Mapping) -> RelationCheck:
    """Obstruction first, then invertibility of every g_h, then the residual
    D (D*/q)^{-1} - q at each vertex."""
    F = R.field
    qa = check_obstruction(q, R.alpha, F)
    g = g_blocks(R)
    for h, m in g.items():
        if m.nrows and not m.is_invertible():
            raise SingularG(f"Id + X_{R.qd.star(h)} X_{h} is not invertible")
    D, Ds = relation_products(R, g)
    residual = {}
    for i in R.qd.vertices:
        n = R.alpha[i]
        residual[i] = D[i] @ Ds[i].inverse() - Matrix.identity(F, n).scale(F(q[i])) if n else Matrix.zeros(F, 0, 0)
    return RelationCheck(qa, residual, all(m.is_zero() for m in residual.values()))


def polynomial_residual(R: Representation, q: Mapping) -> dict:
    """D - q D* at each vertex (no inverses, so it extends to dual numbers)."""
    D, Ds = relation_products(R)
    return {i: D[i] - Ds[i].scale(R.field(q[i])) for i in R.qd.vertices}


# ---------------------------------------------------------------------------
# sampling


@dataclass
class SampleResult:
    rep: Representation | None
    check: RelationCheck | None
    attempts: int
    strategy: str = ""

    @property
    def ok(self) -> bool:
        return self.rep is not None and self.check is not None and self.check.ok


def _random_matrix(rng: random.Random, field: Field, r: int, c: int, box: int) -> Matrix:
    return Matrix(field, [[rng.randint(-box, box) for _ in range(c)] for _ in range(r)], c)


def sample_rep(
    qd: DoubledQuiver,
    alpha: Mapping,
    q: Mapping,
    seed: int,
    field: Field | None = None,
    box: int = SAMPLE_BOX,
    retries: int = SAMPLE_RETRIES,
) -> SampleResult:
    """Draw a point of the representation space satisfying the relation.

    When the last ordered arrow a_g is not a loop, every arrow but a_g* is
    drawn from the integer box and X_{a_g*} is solved from the relation at
    t(a_g). When a_g is a loop that solve is degenerate (see
    :func:`_sample_handles`), so single-vertex quivers use a handle
    construction instead. Either way the result is verified exactly.
    """
    alpha = {i: int(alpha[i]) for i in qd.vertices}
    if field is None:
        field = common_field(q.values())
    check_obstruction(q, alpha, field)
    omega = qd.omega()
    if not omega:
        R = Representation(qd, alpha, field, {})
        return SampleResult(R, check_rep(R, q), 0, strategy="empty")
    last = omega[-1]
    s, t = qd.src(last), qd.tgt(last)
    if alpha[s] != alpha[t]:
        raise UnsupportedShape(f"last arrow {last} has alpha_s={alpha[s]} != alpha_t={alpha[t]}")
    if alpha[s] == 0:
        raise UnsupportedShape(f"last arrow {last} joins zero-dimensional fibers")
    rng = random.Random(seed)
    if s == t and len(qd.vertices) == 1:
        return _sample_handles(qd, alpha, q, rng, field, box, retries)
    last_star = qd.star(last)
    F = field
    qt = F(q[t])
    for attempt in range(1, retries + 1):
        X = {h.name: _random_matrix(rng, F, alpha[h.tgt], alpha[h.src], box) for h in qd.H if h.name != last_star}
        if not X[last].is_invertible():
            continue
        Y = _solve_last_star(qd, alpha, F, X, last, qt)
        if Y is None:
            continue
        X[last_star] = Y
        R = Representation(qd, alpha, F, X)
        try:
            chk = check_rep(R, q)
        except SingularG:
            continue
        if not chk.ok:
            bad = [str(i) for i, m in chk.residual.items() if not m.is_zero()]
            raise ConsistencyError(f"solved representation violates the relation at vertices {bad}")
        return SampleResult(R, chk, attempt, strategy="solve-last")
    raise RetryExhausted(f"no admissible draw in {retries} attempts")


def _random_invertible(rng, F, n, box) -> Matrix | None:
    m = _random_matrix(rng, F, n, n, box)
    return m if m.is_invertible() else None


def _nonzero(rng, box) -> int:
    return rng.choice([k for k in range(-box, box + 1) if k])


def _sample_handles(qd, alpha, q, rng, F, box, retries) -> SampleResult:
    """One vertex, loops a_1..a_g. Write h_j = g_{a_j}, k_j = g_{a_j*}; with
    X_j invertible, h_j = X_j^{-1} k_j X_j and Y_j = X_j^{-1}(k_j - Id). The
    relation reads h_g ... h_1 = q k_1 ... k_g.

    Drawing all but one arrow and solving the rest fails here: the last
    handle needs k_g conjugate to a matrix built from k_g and the other
    handles, a codimension n-1 condition. Instead:

    * handles j >= 3: X_j random, Y_j = 0, so h_j = k_j = Id;
    * handle 2: k_2 random, X_2 = c_0 + c_1 k_2 commutes with it, so h_2 = k_2;
    * handle 1: then h_1 = q k_2^{-1} k_1 k_2, i.e. W = k_2 X_1^{-1} satisfies
      W k_1 W^{-1} = q k_1. Take k_1 = P C P^{-1}, W = P S D P^{-1} with C
      diagonal with eigenvalues c_b q^{-m} on cyclic blocks of length ord(q),
      S the block-cyclic shift and D diagonal.
    """
    v = qd.vertices[0]
    n = alpha[v]
    qv = F(q[v])
    omega = qd.omega()
    g = len(omega)
    order = 1
    acc = qv
    while acc != F.one():
        acc = acc * qv
        order += 1
        if order > n:
            raise UnsupportedShape(f"q has no order dividing {n}")
    if n % order:
        raise UnsupportedShape(f"order of q ({order}) does not divide alpha ({n})")
    I = Matrix.identity(F, n)
    for attempt in range(1, retries + 1):
        P = _random_invertible(rng, F, n, box)
        if P is None:
            continue
        Pinv = P.inverse()
        if g >= 2:
            k2 = _random_invertible(rng, F, n, box)
            if k2 is None:
                continue
        else:
            k2 = I
        cs = [_nonzero(rng, box) for _ in range(n // order)]
        diag = [F(cs[m // order]) * F.inv(qv) ** (m % order) for m in range(n)]
        C = Matrix(F, [[diag[r] if r == cc else 0 for cc in range(n)] for r in range(n)], n)
        k1 = P @ C @ Pinv
        S = Matrix.zeros(F, n, n)
        for m in range(n):
            blk = (m // order) * order
            S.rows[blk + (m - blk + 1) % order][m] = F.one()
        D = Matrix(F, [[_nonzero(rng, box) if r == cc else 0 for cc in range(n)] for r in range(n)], n)
        W = P @ S @ D @ Pinv
        if not W.is_invertible():
            continue
        X = {}
        X1 = W.inverse() @ k2
        X[omega[0]] = X1
        X[qd.star(omega[0])] = X1.inverse() @ (k1 - I)
        if g >= 2:
            X2 = I.scale(_nonzero(rng, box)) + k2.scale(rng.randint(-box, box))
            if not X2.is_invertible():
                continue
            X[omega[1]] = X2
            X[qd.star(omega[1])] = X2.inverse() @ (k2 - I)
        for a in omega[2:]:
            X[a] = _random_matrix(rng, F, n, n, box)
            X[qd.star(a)] = Matrix.zeros(F, n, n)
        R = Representation(qd, alpha, F, X)
        try:
            chk = check_rep(R, q)
        except SingularG:
            continue
        if not chk.ok:
            raise ConsistencyError("handle construction violates the relation")
        return SampleResult(R, chk, attempt, strategy="handles")
    raise RetryExhausted(f"no admissible draw in {retries} attempts")


def _solve_last_star(qd, alpha, F, X, last, qt) -> Matrix | None:
    """Solve D = q D* at t(a_g) for Y = X_{a_g*}.

    The residual is affine in Y: g_{a_g*} = Id + X_{a_g} Y enters D* linearly,
    and when a_g is a loop g_{a_g} = Id + Y X_{a_g} enters D linearly too (a
    Sylvester equation). For a non-loop this is Y = X_{a_g}^{-1}(M - Id).
    Returns None when the linear system has no solution.
    """
    t = qd.tgt(last)
    n = alpha[t]
    last_star = qd.star(last)

    def residual(Y: Matrix) -> Matrix:
        Xs = dict(X)
        Xs[last_star] = Y
        R = Representation(qd, alpha, F, Xs)
        D, Ds = relation_products(R)
        return D[t] - Ds[t].scale(qt)

    zero = Matrix.zeros(F, n, n)
    r0 = residual(zero)
    cols = []
    for r in range(n):
        for c in range(n):
            E = Matrix.zeros(F, n, n)
            E.rows[r][c] = F.one()
            cols.append((residual(E) - r0).flat())
    L = Matrix.from_columns(F, cols, n * n)
    sol = L.solve(Matrix.column(F, (-r0).flat()))
    if sol is None:
        return None
    return Matrix.from_flat(F, sol.col(0), n, n)


# ---------------------------------------------------------------------------
# graded modules from representations


def induce(R: Representation, N: int, group_elems: Mapping | None = None) -> GradedModule:
    """Graded module with (h, n) = g_{t(h), n+1} X_h g_{s(h), n}^{-1} and
    t_{i, n} = g_{i, n+1} g_{i, n}^{-1}; identity group elements by default."""
    tq = triple(R.qd, N)
    F = R.field
    g, ginv = {}, {}
    for i in R.qd.vertices:
        for n in range(N + 1):
            if group_elems is not None and (i, n) in group_elems:
                m = group_elems[(i, n)]
                try:
                    ginv[(i, n)] = m.inverse()
                except SingularMatrix:
                    raise SingularGroupElem(f"group element at {(i, n)} is singular") from None
                g[(i, n)] = m
            else:
                g[(i, n)] = ginv[(i, n)] = Matrix.identity(F, R.alpha[i])
    maps = {}
    for n in range(N):
        for h in R.qd.H:
            maps[(h.name, n)] = g[(h.tgt, n + 1)] @ R.X[h.name] @ ginv[(h.src, n)]
        for i in R.qd.vertices:
            maps[("t", i, n)] = g[(i, n + 1)] @ ginv[(i, n)]
    dims = {(i, n): R.alpha[i] for n in range(N + 1) for i in R.qd.vertices}
    return GradedModule(tq, F, dims, maps, a_module=True)


def truncate(R: Representation, N: int) -> GradedModule:
    """Slice V[t] = V (x) k[t] to degrees 0..N.

    The degree-n piece is spanned by v t^n; arrows send v t^n to X_h(v) t^(n+1)
    and t sends v t^n to v t^(n+1).
    """
    tq = triple(R.qd, N)
    F = R.field
    pieces = {n: {i: [(k, n) for k in range(R.alpha[i])] for i in R.qd.vertices} for n in range(N + 1)}

    def action(src_basis, tgt_basis, img):
        # img(k) -> list of (coefficient, target basis index)
        rows = [[F.zero()] * len(src_basis) for _ in tgt_basis]
        for c, (k, _n) in enumerate(src_basis):
            for coeff, j in img(k):
                rows[j][c] = rows[j][c] + F(coeff)
        return Matrix(F, rows, len(src_basis))

    maps = {}
    for n in range(N):
        for h in R.qd.H:
            X = R.X[h.name]
            src, tgt = pieces[n][h.src], pieces[n + 1][h.tgt]
            maps[(h.name, n)] = action(src, tgt, lambda k, X=X: [(X[j, k], j) for j in range(X.nrows)])
        for i in R.qd.vertices:
            src, tgt = pieces[n][i], pieces[n + 1][i]
            maps[("t", i, n)] = action(src, tgt, lambda k: [(1, k)])
    dims = {(i, n): len(pieces[n][i]) for n in range(N + 1) for i in R.qd.vertices}
    return GradedModule(tq, F, dims, maps, a_module=True)


def flatten(M: GradedModule) -> Representation:
    """Read off X_h = t^{-1} (h, 0) at level 0; inverse to induce when t is
    invertible."""
    F = M.field
    X = {}
    for h in M.qd.H:
        tinv = M.maps[("t", h.tgt, 0)].inverse()
        X[h.name] = tinv @ M.maps[(h.name, 0)]
    return Representation(M.qd, {i: M.dims[(i, 0)] for i in M.qd.vertices}, F, X)


def module_checks(M: GradedModule, rho: PathPoly) -> dict:
    """J-relations (t commutes with every arrow) and vanishing of rho in every
    degree where it is defined."""
    j_ok = True
    for n in range(M.N - 1):
        for h in M.qd.H:
            lhs = M.maps[(h.name, n + 1)] @ M.maps[("t", h.src, n)]
            rhs = M.maps[("t", h.tgt, n + 1)] @ M.maps[(h.name, n)]
            if lhs != rhs:
                j_ok = False
    rho_ok = True
    d = rho.degree or 0
    for i in M.qd.vertices:
        e_rho = PathPoly(rho.qd, rho.field, {m: c for m, c in rho.terms.items() if m.start == i})
        for n in range(0, M.N - d + 1):
            if not evaluate_block(e_rho, M, i, i, n).is_zero():
                rho_ok = False
    return {"j_relations": j_ok, "rho_vanishes": rho_ok}


# ---------------------------------------------------------------------------
# homomorphisms


def _hom_index(W: GradedModule, V: GradedModule) -> tuple[list, dict, int]:
    order = W.tq.vertices
    offsets = {}
    k = 0
    for v in order:
        offsets[v] = k
        k += V.dims[v] * W.dims[v]
    return order, offsets, k


def hom_equations(W: GradedModule, V: GradedModule) -> Matrix:
    """Coefficient matrix of the degree-0 homomorphism conditions W -> V.

    Unknowns are the blocks Phi_{(i,n)}: W_{(i,n)} -> V_{(i,n)}, laid out in
    tripled-vertex order, each row-major. One equation block per arrow:
    V_A Phi_src - Phi_tgt W_A = 0. Works over any ring of scalars (the dual
    numbers included); only the kernel needs a field.
    """
    if W.tq.qd != V.tq.qd or W.N != V.N:
        raise ShapeMismatch("graded_hom needs modules on the same tripled quiver")
    if W.field != V.field:
        raise ShapeMismatch("graded_hom needs modules over the same field")
    F = W.field
    order, off, nvars = _hom_index(W, V)
    rows = []
    z = F.zero()
    for arr in W.tq.arrows():
        s, t = W.tq.src(arr), W.tq.tgt(arr)
        VA, WA = V.maps[arr], W.maps[arr]
        ws, vs, wt, vt = W.dims[s], V.dims[s], W.dims[t], V.dims[t]
        # entry (r, c) of V_A Phi_s - Phi_t W_A, r < vt, c < ws
        for r in range(vt):
            for c in range(ws):
                row = [z] * nvars
                for k in range(vs):
                    a = VA[r, k]
                    if a:
                        idx = off[s] + k * ws + c
                        row[idx] = row[idx] + a
                for k in range(wt):
                    b = WA[k, c]
                    if b:
                        idx = off[t] + r * wt + k
                        row[idx] = row[idx] - b
                rows.append(row)
    return Matrix._wrap(F, rows, nvars) if rows else Matrix.zeros(F, 0, nvars)


def graded_hom(W: GradedModule, V: GradedModule) -> list[dict]:
    """Basis of degree-0 homomorphisms W -> V (see :func:`hom_equations`)."""
    A = hom_equations(W, V)
    if A.ncols == 0:
        return []
    _, K = rank_kernel(A)
    return [unflatten_hom(W, V, K.col(j)) for j in range(K.ncols)]


def unflatten_hom(W: GradedModule, V: GradedModule, vec: Sequence) -> dict:
    order, off, _ = _hom_index(W, V)
    return {v: Matrix.from_flat(W.field, vec[off[v]:off[v] + V.dims[v] * W.dims[v]], V.dims[v], W.dims[v]) for v in order}


def is_hom(W: GradedModule, V: GradedModule, phi: Mapping) -> bool:
    for arr in W.tq.arrows():
        s, t = W.tq.src(arr), W.tq.tgt(arr)
        if V.maps[arr] @ phi[s] != phi[t] @ W.maps[arr]:
            return False
    return True


# ---------------------------------------------------------------------------
# tangent spaces


@dataclass
class TangentReport:
    tangent_dim: int
    moduli_dim: int
    n_vars: int
    n_eqs: int
    kernel: Matrix


def linearized_relation(R: Representation, q: Mapping) -> Matrix:
    """Columns: eps-parts of the relation residual after X_h += eps E_rc, for
    every arrow h (in H order) and entry (r, c) (row-major)."""
    F = R.field
    DF = DualField(F)
    base = {h: m.to_dual() for h, m in R.X.items()}
    qd = {i: DF(q[i]) for i in R.qd.vertices}
    cols = []
    for h in R.qd.H:
        m = R.X[h.name]
        for r in range(m.nrows):
            for c in range(m.ncols):
                eps = Matrix.zeros(F, m.nrows, m.ncols)
                eps.rows[r][c] = F.one()
                X = dict(base)
                X[h.name] = m.to_dual(eps)
                Rd = Representation(R.qd, R.alpha, DF, X)
                res = polynomial_residual(Rd, qd)
                col = []
                for i in R.qd.vertices:
                    col.extend(x.b for x in res[i].flat())
                cols.append(col)
    n_eqs = sum(R.alpha[i] ** 2 for i in R.qd.vertices)
    if not cols:
        return Matrix.zeros(F, n_eqs, 0)
    return Matrix.from_columns(F, cols, n_eqs)


def tangent_dim(R: Representation, q: Mapping) -> TangentReport:
    chk = check_rep(R, q)
    if not chk.ok:
        raise ConsistencyError("tangent space requested at a point that violates the relation")
    J = linearized_relation(R, q)
    rank, K = rank_kernel(J)
    t = J.ncols - rank
    moduli = t - (sum(a * a for a in R.alpha.values()) - 1)
    return TangentReport(t, moduli, J.ncols, J.nrows, K)
