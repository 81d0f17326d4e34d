"""Dense exact matrices over a single :class:`~mqverify.scalars.Field`.

Elimination is fraction-free (Bareiss) over Q, where rows are first scaled to
integers. Other fields use plain Gauss elimination with one inverse per pivot.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .errors import BadPrime, FieldMismatch, ShapeMismatch, SingularMatrix
from .scalars import (
    QQ,
    Dual,
    DualField,
    Field,
    PrimeField,
    RationalField,
)


class Matrix:
    """Immutable-by-convention dense matrix. ``rows`` is a list of lists."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: Field, rows: Sequence[Sequence], ncols: int | None = None):
        self.field = field
        self.rows = [[field(x) for x in r] for r in rows]
        self.nrows = len(self.rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        if any(len(r) != ncols for r in self.rows):
            raise ShapeMismatch("ragged matrix rows")

    @classmethod
    def _wrap(cls, field, rows, ncols):
        m = object.__new__(cls)
        m.field = field
        m.rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        return m

    # construction -----------------------------------------------------------
    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> Matrix:
        z = field.zero()
        return cls._wrap(field, [[z] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, field: Field, n: int) -> Matrix:
        z, o = field.zero(), field.one()
        return cls._wrap(field, [[o if i == j else z for j in range(n)] for i in range(n)], n)

    @classmethod
    def column(cls, field: Field, entries: Iterable) -> Matrix:
        return cls(field, [[x] for x in entries], 1)

    @classmethod
    def from_columns(cls, field: Field, cols: Sequence[Sequence], nrows: int) -> Matrix:
        return cls(field, [[c[i] for c in cols] for i in range(nrows)], len(cols))

    @classmethod
    def hstack(cls, field: Field, blocks: Sequence[Matrix], nrows: int | None = None) -> Matrix:
        if nrows is None:
            nrows = blocks[0].nrows if blocks else 0
        for b in blocks:
            _same_field(field, b)
            if b.nrows != nrows:
                raise ShapeMismatch("hstack row counts differ")
        rows = [sum((b.rows[i] for b in blocks), []) for i in range(nrows)]
        return cls._wrap(field, rows, sum(b.ncols for b in blocks))

    @classmethod
    def vstack(cls, field: Field, blocks: Sequence[Matrix], ncols: int | None = None) -> Matrix:
        if ncols is None:
            ncols = blocks[0].ncols if blocks else 0
        rows = []
        for b in blocks:
            _same_field(field, b)
            if b.ncols != ncols:
                raise ShapeMismatch("vstack column counts differ")
            rows.extend(list(r) for r in b.rows)
        return cls._wrap(field, rows, ncols)

    # access ------------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def columns(self) -> list[list]:
        return [self.col(j) for j in range(self.ncols)]

    def flat(self) -> list:
        """Row-major entry list."""
        return [x for r in self.rows for x in r]

    @classmethod
    def from_flat(cls, field: Field, entries: Sequence, nrows: int, ncols: int) -> Matrix:
        return cls._wrap(field, [list(entries[i * ncols:(i + 1) * ncols]) for i in range(nrows)], ncols)

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> Matrix:
        return Matrix._wrap(self.field, [r[c0:c1] for r in self.rows[r0:r1]], c1 - c0)

    # arithmetic --------------------------------------------------------------
    def _check(self, other: Matrix, same_shape=True):
        if not isinstance(other, Matrix):
            raise TypeError("matrix operand expected")
        _same_field(self.field, other)
        if same_shape and self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix._wrap(self.field, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix._wrap(self.field, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self) -> Matrix:
        return Matrix._wrap(self.field, [[-a for a in r] for r in self.rows], self.ncols)

    def scale(self, c) -> Matrix:
        c = self.field(c)
        return Matrix._wrap(self.field, [[c * a for a in r] for r in self.rows], self.ncols)

    def __matmul__(self, other: Matrix) -> Matrix:
        self._check(other, same_shape=False)
        if self.ncols != other.nrows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        z = self.field.zero()
        cols = other.columns()
        out = []
        for r in self.rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            row = []
            for c in cols:
                s = z
                for k, a in nz:
                    b = c[k]
                    if b:
                        s = s + a * b
                row.append(s)
            out.append(row)
        return Matrix._wrap(self.field, out, other.ncols)

    @property
    def T(self) -> Matrix:
        return Matrix._wrap(self.field, [list(c) for c in zip(*self.rows)] if self.nrows else [[] for _ in range(self.ncols)], self.nrows)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, tuple(map(tuple, self.rows))))

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def trace(self):
        s = self.field.zero()
        for i in range(min(self.nrows, self.ncols)):
            s = s + self.rows[i][i]
        return s

    def map(self, fn, field: Field) -> Matrix:
        return Matrix(field, [[fn(x) for x in r] for r in self.rows], self.ncols)

    def __repr__(self):
        return f"Matrix({self.field!r}, {self.rows!r})"

    # dual-number helpers -------------------------------------------------------
    def dual_parts(self) -> tuple[Matrix, Matrix]:
        """Split a matrix over k[eps] into (value part, eps part) over k."""
        if not isinstance(self.field, DualField):
            raise FieldMismatch("dual_parts needs a matrix over a dual extension")
        base = self.field.base
        a = Matrix._wrap(base, [[x.a for x in r] for r in self.rows], self.ncols)
        b = Matrix._wrap(base, [[x.b for x in r] for r in self.rows], self.ncols)
        return a, b

    def to_dual(self, eps_part: Matrix | None = None) -> Matrix:
        df = DualField(self.field)
        if eps_part is None:
            return Matrix._wrap(df, [[Dual(x, self.field.zero()) for x in r] for r in self.rows], self.ncols)
        self._check(eps_part)
        return Matrix._wrap(df, [[Dual(x, y) for x, y in zip(r, s)] for r, s in zip(self.rows, eps_part.rows)], self.ncols)

    # elimination -------------------------------------------------------------
    def echelon(self) -> tuple[list[list], list[int]]:
        """Row echelon form (not reduced) and pivot columns."""
        _require_field(self.field)
        if isinstance(self.field, RationalField):
            return _bareiss_rational(self.rows, self.ncols)
        return _gauss(self.rows, self.ncols)

    def rank(self) -> int:
        return len(self.echelon()[1])

    def kernel(self) -> Matrix:
        return rank_kernel(self)[1]

    def inverse(self) -> Matrix:
        if not self.is_square():
            raise ShapeMismatch("inverse of non-square matrix")
        n = self.nrows
        if isinstance(self.field, DualField):
            a, b = self.dual_parts()
            ai = a.inverse()
            return ai.to_dual(-(ai @ b @ ai))
        aug = Matrix.hstack(self.field, [self, Matrix.identity(self.field, n)])
        rows, piv = _gauss([list(r) for r in aug.rows], 2 * n, reduce=True)
        if piv[:n] != list(range(n)):
            raise SingularMatrix("matrix is not invertible")
        return Matrix._wrap(self.field, [r[n:] for r in rows[:n]], n)

    def is_invertible(self) -> bool:
        if not self.is_square():
            return False
        if isinstance(self.field, DualField):
            return self.dual_parts()[0].is_invertible()
        return self.rank() == self.nrows

    def solve(self, rhs: Matrix) -> Matrix | None:
        """Some X with self @ X == rhs, or None."""
        _same_field(self.field, rhs)
        if rhs.nrows != self.nrows:
            raise ShapeMismatch("solve: row counts differ")
        n = self.ncols
        aug = Matrix.hstack(self.field, [self, rhs])
        rows, piv = _gauss([list(r) for r in aug.rows], aug.ncols, reduce=True)
        if any(p >= n for p in piv):
            return None
        z = self.field.zero()
        sol = [[z] * rhs.ncols for _ in range(n)]
        for r, p in enumerate(piv):
            sol[p] = rows[r][n:]
        return Matrix._wrap(self.field, sol, rhs.ncols)


def _same_field(field: Field, m: Matrix):
    if m.field != field:
        raise FieldMismatch(f"{m.field!r} vs {field!r}")


def _require_field(field: Field):
    if isinstance(field, DualField):
        raise FieldMismatch("rank/kernel need a field, not a dual-number extension")


def _gauss(rows: list[list], ncols: int, reduce: bool = False) -> tuple[list[list], list[int]]:
    """Plain elimination with field division. Returns (rows, pivots)."""
    rows = [list(r) for r in rows]
    nrows = len(rows)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        inv = 1 / pv if isinstance(pv, (int, Fraction)) else pv.inverse()
        rows[r] = [x * inv for x in rows[r]]
        targets = range(nrows) if reduce else range(r + 1, nrows)
        for i in targets:
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def _bareiss_rational(rows: list[list], ncols: int) -> tuple[list[list], list[int]]:
    """Scale each row to integers, then fraction-free integer elimination."""
    int_rows = []
    for r in rows:
        d = lcm(*(Fraction(x).denominator for x in r)) if r else 1
        int_rows.append([int(Fraction(x) * d) for x in r])
    nrows = len(int_rows)
    pivots: list[int] = []
    prev = 1
    k = 0
    for c in range(ncols):
        if k >= nrows:
            break
        p = next((i for i in range(k, nrows) if int_rows[i][c]), None)
        if p is None:
            continue
        int_rows[k], int_rows[p] = int_rows[p], int_rows[k]
        pv = int_rows[k][c]
        rk = int_rows[k]
        for i in range(k + 1, nrows):
            f = int_rows[i][c]
            ri = int_rows[i]
            if f:
                int_rows[i] = [(pv * x - f * y) // prev for x, y in zip(ri, rk)]
            else:
                int_rows[i] = [(pv * x) // prev for x in ri]
        prev = pv
        pivots.append(c)
        k += 1
    return [[Fraction(x) for x in r] for r in int_rows], pivots


def rank_kernel(m: Matrix) -> tuple[int, Matrix]:
    """Rank and a kernel basis (as columns) of ``m``."""
    rows, pivots = m.echelon()
    field = m.field
    n = m.ncols
    rank = len(pivots)
    pivset = set(pivots)
    free = [c for c in range(n) if c not in pivset]
    z, o = field.zero(), field.one()
    basis = []
    for f in free:
        x = [z] * n
        x[f] = o
        for r in range(rank - 1, -1, -1):
            c = pivots[r]
            s = z
            for j in range(c + 1, n):
                if rows[r][j] and x[j]:
                    s = s + rows[r][j] * x[j]
            x[c] = -s / rows[r][c]
        basis.append(x)
    return rank, Matrix.from_columns(field, basis, n) if basis else Matrix.zeros(field, n, 0)


def membership(m: Matrix, v: Matrix | Sequence) -> bool:
    """Whether ``v`` lies in the column space of ``m``."""
    if not isinstance(v, Matrix):
        v = Matrix.column(m.field, v)
    _same_field(m.field, v)
    if v.nrows != m.nrows:
        raise ShapeMismatch("membership: vector length differs from row count")
    return m.solve(v) is not None


def specialize_mod_p(m: Matrix, p: int) -> Matrix:
    """Entrywise reduction of a rational matrix modulo p."""
    if m.field != QQ:
        raise FieldMismatch("specialize_mod_p needs a rational matrix")
    fp = PrimeField(p)
    for r in m.rows:
        for x in r:
            if Fraction(x).denominator % p == 0:
                raise BadPrime(f"denominator of {x} vanishes mod {p}")
    return Matrix(fp, m.rows, m.ncols)


def block_diag(field: Field, blocks: Sequence[Matrix]) -> Matrix:
    nr = sum(b.nrows for b in blocks)
    nc = sum(b.ncols for b in blocks)
    out = Matrix.zeros(field, nr, nc).rows
    r0 = c0 = 0
    for b in blocks:
        _same_field(field, b)
        for i, row in enumerate(b.rows):
            out[r0 + i][c0:c0 + b.ncols] = row
        r0 += b.nrows
        c0 += b.ncols
    return Matrix._wrap(field, out, nc)
