"""King (semi)stability by exhaustive subrepresentation search over F_p.

Convention: theta(alpha) = 0 and M is theta-semistable iff every proper
nonzero subrepresentation S has theta(dim S) >= 0, theta-stable iff > 0. At
theta = 0 stable means simple.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .errors import BadPrime, FieldMismatch, IndexMismatch, TooLarge
from .linalg import Matrix, specialize_mod_p
from .quiver import lift_stability
from .reps import GradedModule, Representation, induce
from .scalars import QQ, PrimeField, is_prime

MAX_TOTAL_DIM = 9
MAX_PRIME = 13

STABLE = "CertifiedStable"
SEMISTABLE_ONLY = "CertifiedSemistableOnly"
UNSTABLE = "UnstableWithWitness"
INCONCLUSIVE = "Inconclusive"


def pairing(theta: Mapping, beta: Mapping) -> Fraction:
    if set(theta) != set(beta):
        raise IndexMismatch("theta and dimension vector have different index sets")
    return sum((Fraction(theta[k]) * beta[k] for k in theta), Fraction(0))


# ---------------------------------------------------------------------------
# subspaces of F_p^d


@dataclass(frozen=True)
class Subspace:
    rows: tuple  # reduced row echelon basis, tuples of ints mod p
    pivots: tuple

    @property
    def dim(self) -> int:
        return len(self.rows)

    def contains(self, v: list, p: int) -> bool:
        w = list(v)
        for r, c in zip(self.rows, self.pivots):
            f = w[c]
            if f:
                w = [(x - f * y) % p for x, y in zip(w, r)]
        return not any(w)


@lru_cache(maxsize=None)
def subspaces(p: int, d: int) -> tuple[Subspace, ...]:
    """Every subspace of F_p^d, in order of dimension then pivot set."""
    out = []
    for k in range(d + 1):
        for piv in itertools.combinations(range(d), k):
            slots = [(r, c) for r in range(k) for c in range(piv[r] + 1, d) if c not in piv]
            for vals in itertools.product(range(p), repeat=len(slots)):
                rows = [[0] * d for _ in range(k)]
                for r, c in enumerate(piv):
                    rows[r][c] = 1
                for (r, c), x in zip(slots, vals):
                    rows[r][c] = x
                out.append(Subspace(tuple(map(tuple, rows)), piv))
    return tuple(out)


def rref_mod_p(vectors, p: int, d: int) -> Subspace:
    rows = [[x % p for x in v] for v in vectors]
    out: list[list[int]] = []
    pivots: list[int] = []
    for c in range(d):
        k = next((i for i, r in enumerate(rows) if r[c]), None)
        if k is None:
            continue
        r = rows.pop(k)
        inv = pow(r[c], -1, p)
        r = [(x * inv) % p for x in r]
        rows = [[(x - ri[c] * y) % p for x, y in zip(ri, r)] for ri in rows]
        out = [[(x - o[c] * y) % p for x, y in zip(o, r)] for o in out]
        out.append(r)
        pivots.append(c)
    return Subspace(tuple(map(tuple, out)), tuple(pivots))


@lru_cache(maxsize=None)
def subspaces_containing(p: int, d: int, W: Subspace) -> tuple[Subspace, ...]:
    """Subspaces of F_p^d containing W, via subspaces of the quotient."""
    if not W.rows:
        return subspaces(p, d)
    free = [c for c in range(d) if c not in W.pivots]
    out = []
    for Q in subspaces(p, len(free)):
        lifted = []
        for r in Q.rows:
            v = [0] * d
            for c, x in zip(free, r):
                v[c] = x
            lifted.append(v)
        out.append(rref_mod_p(list(W.rows) + lifted, p, d))
    return tuple(out)


def gaussian_binomial(n: int, k: int, p: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


def subspace_count(p: int, d: int) -> int:
    return sum(gaussian_binomial(d, k, p) for k in range(d + 1))


# ---------------------------------------------------------------------------
# search


@dataclass
class Witness:
    dims: dict
    basis: dict  # vertex -> list of basis rows (ints mod p)
    pairing: Fraction


@dataclass
class SearchResult:
    witness: Witness | None  # a proper nonzero subrep minimizing the pairing
    min_pairing: Fraction | None
    visited: int
    full_count: int
    subreps: int


def _as_int_matrix(m: Matrix, p: int) -> list[list[int]]:
    return [[int(x.r) if hasattr(x, "r") else int(x) % p for x in r] for r in m.rows]


def _closed(A: list[list[int]], Us: Subspace, Ut: Subspace, p: int) -> bool:
    for u in Us.rows:
        w = [sum(a * x for a, x in zip(row, u)) % p for row in A]
        if not Ut.contains(w, p):
            return False
    return True


def search_subreps(M, theta: Mapping, max_total_dim: int = MAX_TOTAL_DIM, max_prime: int = MAX_PRIME, brute_force: bool = False) -> SearchResult:
    """Enumerate invariant subspace tuples of ``M`` (over F_p) and return one
    minimizing theta among proper nonzero ones.

    Vertices are assigned in order; with ``brute_force`` every tuple of the
    full product is visited. Otherwise each vertex only ranges over subspaces
    containing the images forced by already-assigned vertices, and branches
    violating closure on any assigned arrow are cut.
    """
    F = M.field
    if not isinstance(F, PrimeField):
        raise TypeError("subrepresentation search needs a module over a prime field")
    p = F.p
    verts = list(M.vertices())
    dims = M.dims() if callable(M.dims) else M.dims
    total = sum(dims[v] for v in verts)
    if total > max_total_dim:
        raise TooLarge(f"total dimension {total} exceeds the search bound {max_total_dim}")
    if p > max_prime:
        raise TooLarge(f"prime {p} exceeds the search bound {max_prime}")
    pos = {v: k for k, v in enumerate(verts)}
    arrows = [(s, t, _as_int_matrix(m, p)) for s, t, m in M.arrow_data()]
    # arrows checked once both ends are assigned, at the later of the two
    check_at: list[list] = [[] for _ in verts]
    for s, t, A in arrows:
        if dims[s] and dims[t]:
            check_at[max(pos[s], pos[t])].append((s, t, A))
        elif dims[s] and not dims[t]:
            # image lands in a zero space: U_s must be killed by A
            check_at[pos[s]].append((s, t, A))
    choices = [subspaces(p, dims[v]) for v in verts]
    # arrows from earlier vertices force U_k to contain their images
    into: list[list] = [[] for _ in verts]
    for s, t, A in arrows:
        if dims[s] and dims[t] and pos[s] < pos[t]:
            into[pos[t]].append((s, t, A))
    full = 1
    for v in verts:
        full *= subspace_count(p, dims[v])

    best: list = [None, None]
    stats = {"visited": 0, "subreps": 0}
    assign: list = [None] * len(verts)

    def ok_at(k: int) -> bool:
        for s, t, A in check_at[k]:
            Us = assign[pos[s]]
            Ut = assign[pos[t]] if dims[t] else Subspace((), ())
            if not _closed(A, Us, Ut, p):
                return False
        return True

    def record():
        d = {v: assign[pos[v]].dim for v in verts}
        sub = sum(d.values())
        if sub == 0 or sub == total:
            return
        stats["subreps"] += 1
        val = pairing(theta, d)
        if best[1] is None or val < best[1]:
            best[0] = Witness(d, {v: [list(r) for r in assign[pos[v]].rows] for v in verts}, val)
            best[1] = val

    def rec(k: int):
        if k == len(verts):
            stats["visited"] += 1
            if brute_force and not all(ok_at(j) for j in range(len(verts))):
                return
            record()
            return
        if brute_force:
            cands = choices[k]
        else:
            need = []
            for s, t, A in into[k]:
                for u in assign[pos[s]].rows:
                    need.append([sum(a * x for a, x in zip(row, u)) % p for row in A])
            cands = subspaces_containing(p, dims[verts[k]], rref_mod_p(need, p, dims[verts[k]])) if need else choices[k]
        for U in cands:
            assign[k] = U
            if not brute_force and not ok_at(k):
                stats["visited"] += 1
                continue
            rec(k + 1)
        assign[k] = None

    rec(0)
    return SearchResult(best[0], best[1], stats["visited"], full, stats["subreps"])


def destabilizer(M, theta: Mapping, stable: bool = False, **bounds) -> Witness | None:
    """A proper nonzero subrep with theta < 0 (or <= 0 when ``stable``)."""
    res = search_subreps(M, theta, **bounds)
    if res.witness is None:
        return None
    if res.min_pairing < 0 or (stable and res.min_pairing == 0):
        return res.witness
    return None


def witness_is_invariant(M, w: Witness) -> bool:
    """Post-hoc closure check of a witness over the module's own field."""
    F = M.field
    p = F.p
    spaces = {}
    for v, rows in w.basis.items():
        spaces[v] = Subspace(tuple(map(tuple, rows)), tuple(next(c for c, x in enumerate(r) if x) for r in rows))
    for s, t, m in M.arrow_data():
        if not _closed(_as_int_matrix(m, p), spaces[s], spaces[t], p):
            return False
    return True


def _lift_witness(Mq, w: Witness, p: int) -> bool:
    """Try the witness with entries read as integers in (-p/2, p/2] over Q."""
    def lift(x):
        return x - p if x > p // 2 else x

    bases = {}
    for v, rows in w.basis.items():
        bases[v] = [[lift(x) for x in r] for r in rows]
    for s, t, m in Mq.arrow_data():
        if not bases[s]:
            continue
        U = Matrix(Mq.field, bases[s], m.ncols).T
        img = m @ U
        if not bases[t]:
            if not img.is_zero():
                return False
            continue
        T = Matrix(Mq.field, bases[t], m.nrows).T
        if T.solve(img) is None:
            return False
    return True


# ---------------------------------------------------------------------------
# verdicts


@dataclass
class StabilityVerdict:
    kind: str
    prime: int
    semistable: bool | None
    stable: bool | None
    witness: Witness | None = None
    witness_lifts: bool | None = None
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "prime": self.prime,
            "semistable": self.semistable,
            "stable": self.stable,
            "stats": dict(sorted(self.stats.items())),
        }
        if self.witness is not None:
            out["witness"] = {
                "dims": {str(k): v for k, v in self.witness.dims.items()},
                "pairing": f"{self.witness.pairing.numerator}/{self.witness.pairing.denominator}",
                "basis": {str(k): [[f"{self.prime}:{x}" for x in r] for r in rows] for k, rows in self.witness.basis.items()},
                "lifts_to_Q": self.witness_lifts,
            }
        return out


def _specialize(M, p: int):
    if isinstance(M, Representation):
        X = {h: specialize_mod_p(m, p) for h, m in M.X.items()}
        return Representation(M.qd, dict(M.alpha), PrimeField(p), X)
    maps = {a: specialize_mod_p(m, p) for a, m in M.maps.items()}
    return GradedModule(M.tq, PrimeField(p), dict(M.dims), maps, M.a_module)


def _denominators(M) -> set[int]:
    mats = M.X.values() if isinstance(M, Representation) else M.maps.values()
    return {Fraction(x).denominator for m in mats for r in m.rows for x in r}


def good_prime(M, start: int = 5, max_prime: int = MAX_PRIME) -> int:
    """Smallest prime >= ``start`` dividing no denominator of a module over Q."""
    dens = _denominators(M)
    for p in range(max(start, 2), max_prime + 1):
        if is_prime(p) and all(d % p for d in dens):
            return p
    raise BadPrime(f"every prime in [{start}, {max_prime}] divides a denominator")


def verdict(M, theta: Mapping, p: int = 5, **bounds) -> StabilityVerdict:
    """Certified verdict for a module over Q via reduction mod p.

    A Q-subrepresentation saturates to an F_p one of the same dimension
    vector, so "no F_p destabilizer" certifies the Q statement. An F_p
    witness proves nothing over Q unless it lifts; it is tried with the
    symmetric integer lift and verified exactly. When it does not lift, the
    next good prime up to ``max_prime`` is tried.
    """
    if not is_prime(p):
        raise BadPrime(f"{p} is not prime")
    if M.field != QQ:
        raise FieldMismatch("verdict expects a module over Q")
    max_prime = bounds.get("max_prime", MAX_PRIME)
    tried = []
    while True:
        v = _verdict_at(M, theta, p, **bounds)
        tried.append(p)
        if v.witness is None or v.witness_lifts or p >= max_prime:
            break
        try:
            p = good_prime(M, p + 1, max_prime)
        except BadPrime:
            break
    v.stats["primes_tried"] = tried
    return v


def _verdict_at(M, theta: Mapping, p: int, **bounds) -> StabilityVerdict:
    Mp = _specialize(M, p)
    res = search_subreps(Mp, theta, **bounds)
    stats = {"visited": res.visited, "full_product": res.full_count, "subreps": res.subreps}
    mp = res.min_pairing
    if res.witness is None or mp > 0:
        return StabilityVerdict(STABLE, p, True, True, stats=stats)
    lifts = _lift_witness(M, res.witness, p)
    if mp == 0:
        return StabilityVerdict(SEMISTABLE_ONLY, p, True, False if lifts else None, res.witness, lifts, stats)
    if lifts:
        return StabilityVerdict(UNSTABLE, p, False, False, res.witness, lifts, stats)
    return StabilityVerdict(INCONCLUSIVE, p, None, None, res.witness, lifts, stats)


def verdict_mod_p(M, theta: Mapping, **bounds) -> StabilityVerdict:
    """Verdict for a module already over F_p (no lifting question)."""
    res = search_subreps(M, theta, **bounds)
    stats = {"visited": res.visited, "full_product": res.full_count, "subreps": res.subreps}
    p = M.field.p
    mp = res.min_pairing
    if res.witness is None or mp > 0:
        return StabilityVerdict(STABLE, p, True, True, stats=stats)
    if mp == 0:
        return StabilityVerdict(SEMISTABLE_ONLY, p, True, False, res.witness, None, stats)
    return StabilityVerdict(UNSTABLE, p, False, False, res.witness, None, stats)


@dataclass
class IndCompatReport:
    base: StabilityVerdict
    graded: StabilityVerdict
    theta_gtr: dict
    T: Fraction | None

    @property
    def agree(self) -> bool:
        return (self.base.semistable, self.base.stable) == (self.graded.semistable, self.graded.stable)

    def to_json(self) -> dict:
        return {"agree": self.agree, "base": self.base.to_json(), "graded": self.graded.to_json()}


def ind_compat_report(R: Representation, theta: Mapping, N: int, T=None, p: int = 5, **bounds) -> IndCompatReport:
    """Compare the verdict for R at theta with the verdict for its induced
    graded module at the lifted stability vector."""
    base = verdict(R, theta, p, **bounds)
    V = induce(R, N)
    th = lift_stability(theta, R.alpha, N, T, vertices=list(R.qd.vertices))
    graded = verdict(V, th, p, **bounds)
    return IndCompatReport(base, graded, th, T)
