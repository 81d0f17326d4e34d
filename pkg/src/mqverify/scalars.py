"""Exact scalars: rationals, cyclotomic numbers, prime-field residues, and
square-zero (dual number) extensions of any of these.

Rationals are plain :class:`fractions.Fraction`. The other element types are
small immutable classes that interoperate with ``int`` and ``Fraction``.
A :class:`Field` object names where a value lives; matrices carry one.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import BadPrime, FieldMismatch, ParseError

# ---------------------------------------------------------------------------
# cyclotomic polynomials


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (coefficients low degree first)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(out) - 1, -1, -1):
        c, r = divmod(num[k + len(den) - 1], lead)
        assert r == 0
        out[k] = c
        for j, d in enumerate(den):
            num[k + j] -= c * d
    assert not any(num[: len(den) - 1])
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Integer coefficients of the m-th cyclotomic polynomial, low degree first."""
    if m < 1:
        raise ValueError("cyclotomic order must be >= 1")
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def euler_phi(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


# ---------------------------------------------------------------------------
# element types


class Cyclotomic:
    """Element of Q(zeta_m) as a coefficient vector in the power basis
    1, zeta, ..., zeta^(phi(m)-1)."""

    __slots__ = ("m", "coeffs", "_hash")

    def __init__(self, m: int, coeffs):
        n = euler_phi(m)
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > n:
            cs = _reduce(m, cs)
        cs += [Fraction(0)] * (n - len(cs))
        self.m = m
        self.coeffs = tuple(cs)
        self._hash = None

    @classmethod
    def _raw(cls, m, coeffs):
        obj = object.__new__(cls)
        obj.m = m
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    def _coerce(self, other):
        if isinstance(other, Cyclotomic):
            if other.m != self.m:
                raise FieldMismatch(f"Q(zeta_{self.m}) vs Q(zeta_{other.m})")
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic._raw(self.m, (Fraction(other),) + (Fraction(0),) * (len(self.coeffs) - 1))
        if isinstance(other, (GF, Dual)):
            raise FieldMismatch(f"cannot combine Q(zeta_{self.m}) with {type(other).__name__}")
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyclotomic._raw(self.m, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic._raw(self.m, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyclotomic._raw(self.m, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic._raw(self.m, tuple(a * other for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = len(self.coeffs)
        prod = [Fraction(0)] * (2 * n - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        return Cyclotomic._raw(self.m, tuple(_reduce(self.m, prod)))

    __rmul__ = __mul__

    def inverse(self) -> Cyclotomic:
        if self == 0:
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        n = len(self.coeffs)
        # column j of the multiplication matrix is self * zeta^j
        cols = []
        basis = [Fraction(0)] * n
        for j in range(n):
            e = list(basis)
            e[j] = Fraction(1)
            cols.append((self * Cyclotomic._raw(self.m, tuple(e))).coeffs)
        rows = [[cols[j][i] for j in range(n)] + [Fraction(int(i == 0))] for i in range(n)]
        return Cyclotomic._raw(self.m, tuple(_solve_square_fraction(rows)))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclotomic(self.m, [1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Cyclotomic):
            return self.m == other.m and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if not any(self.coeffs[1:]):
                self._hash = hash(self.coeffs[0])
            else:
                self._hash = hash((self.m, self.coeffs))
        return self._hash

    def __bool__(self):
        return any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __repr__(self):
        return f"Cyclotomic({self.m}, {[str(c) for c in self.coeffs]})"


def _reduce(m: int, prod: list[Fraction]) -> list[Fraction]:
    """Fold x^k for k >= phi(m) back down using the monic relation Phi_m = 0."""
    phi_poly = cyclotomic_polynomial(m)
    n = len(phi_poly) - 1
    prod = list(prod)
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            prod[k] = Fraction(0)
            for j in range(n):
                if phi_poly[j]:
                    prod[k - n + j] -= c * phi_poly[j]
    out = prod[:n]
    return out + [Fraction(0)] * (n - len(out))


def _solve_square_fraction(rows: list[list[Fraction]]) -> list[Fraction]:
    """Gauss-Jordan on an augmented nonsingular system over Q."""
    n = len(rows)
    for c in range(n):
        piv = next(r for r in range(c, n) if rows[r][c])
        rows[c], rows[piv] = rows[piv], rows[c]
        inv = 1 / rows[c][c]
        rows[c] = [x * inv for x in rows[c]]
        for r in range(n):
            if r != c and rows[r][c]:
                f = rows[r][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return [rows[r][n] for r in range(n)]


class GF:
    """Residue class modulo a prime p, canonical representative in [0, p)."""

    __slots__ = ("p", "r")

    def __init__(self, p: int, r: int):
        self.p = p
        self.r = r % p

    def _coerce(self, other):
        if isinstance(other, GF):
            if other.p != self.p:
                raise FieldMismatch(f"F_{self.p} vs F_{other.p}")
            return other.r
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            if other.denominator % self.p == 0:
                raise BadPrime(f"denominator of {other} vanishes mod {self.p}")
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        if isinstance(other, (Cyclotomic, Dual)):
            raise FieldMismatch(f"cannot combine F_{self.p} with {type(other).__name__}")
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GF(self.p, self.r + o)

    __radd__ = __add__

    def __neg__(self):
        return GF(self.p, -self.r)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GF(self.p, self.r - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GF(self.p, o - self.r)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GF(self.p, self.r * o)

    __rmul__ = __mul__

    def inverse(self) -> GF:
        if self.r == 0:
            raise ZeroDivisionError(f"inverse of zero in F_{self.p}")
        return GF(self.p, pow(self.r, -1, self.p))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return GF(self.p, self.r * pow(o, -1, self.p))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return GF(self.p, pow(self.r, k, self.p))

    def __eq__(self, other):
        if isinstance(other, GF):
            return self.p == other.p and self.r == other.r
        if isinstance(other, int):
            return self.r == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.r))

    def __bool__(self):
        return self.r != 0

    def __repr__(self):
        return f"GF({self.p}, {self.r})"


class Dual:
    """a + b*eps with eps^2 = 0, over a base field element type."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        if isinstance(a, Dual) or isinstance(b, Dual):
            raise FieldMismatch("nested dual extensions are not supported")
        self.a = a
        self.b = b

    @staticmethod
    def _split(other):
        if isinstance(other, Dual):
            return other.a, other.b
        return other, 0

    def __add__(self, other):
        a, b = self._split(other)
        return Dual(self.a + a, self.b + b)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __sub__(self, other):
        a, b = self._split(other)
        return Dual(self.a - a, self.b - b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._split(other)
        return Dual(self.a * a, self.a * b + self.b * a)

    __rmul__ = __mul__

    def inverse(self) -> Dual:
        if self.a == 0:
            raise ZeroDivisionError("dual number with zero real part is not invertible")
        ia = 1 / self.a if isinstance(self.a, (int, Fraction)) else self.a.inverse()
        return Dual(ia, -self.b * ia * ia)

    def __truediv__(self, other):
        if isinstance(other, Dual):
            return self * other.inverse()
        return Dual(self.a / other, self.b / other)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = Dual(1, 0)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        a, b = self._split(other)
        return self.a == a and self.b == b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash(("dual", self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self):
        return f"Dual({self.a!r}, {self.b!r})"


# ---------------------------------------------------------------------------
# fields


class Field:
    """Where scalars live. Subclasses provide coercion and serialization."""

    tag = "abstract"

    def __call__(self, x):
        raise NotImplementedError

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def contains(self, x) -> bool:
        raise NotImplementedError

    def serialize(self, x) -> str:
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def inv(self, x):
        return 1 / x if isinstance(x, (int, Fraction)) else x.inverse()

    def __eq__(self, other):
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self):
        return hash((type(self).__name__, tuple(sorted(self.__dict__.items()))))


_RAT_RE = re.compile(r"\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    mt = _RAT_RE.match(text)
    if not mt:
        raise ParseError(f"not a rational literal: {text!r}")
    num = int(mt.group(1))
    den = int(mt.group(2)) if mt.group(2) else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def serialize_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


class RationalField(Field):
    tag = "rational"

    def __call__(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, Cyclotomic) and x.is_rational():
            return x.coeffs[0]
        if isinstance(x, str):
            return parse_rational(x)
        raise FieldMismatch(f"{x!r} is not rational")

    def contains(self, x):
        return isinstance(x, (int, Fraction))

    def serialize(self, x):
        return serialize_rational(x)

    def parse(self, text):
        return parse_rational(text)

    def __repr__(self):
        return "QQ"


QQ = RationalField()


class CyclotomicField(Field):
    tag = "cyclotomic"

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("cyclotomic order must be >= 1")
        self.m = m

    @property
    def degree(self) -> int:
        return euler_phi(self.m)

    def __call__(self, x):
        if isinstance(x, Cyclotomic):
            if x.m != self.m:
                raise FieldMismatch(f"Q(zeta_{x.m}) element in Q(zeta_{self.m})")
            return x
        if isinstance(x, (int, Fraction)):
            return Cyclotomic(self.m, [x])
        if isinstance(x, str):
            return self.parse(x)
        raise FieldMismatch(f"{x!r} is not in Q(zeta_{self.m})")

    def contains(self, x):
        return isinstance(x, Cyclotomic) and x.m == self.m

    def zeta(self, k: int = 1) -> Cyclotomic:
        return Cyclotomic(self.m, [0] * k + [1]) if k < self.m else self.zeta(k % self.m)

    def serialize(self, x):
        x = self(x)
        return f"({self.m}; {', '.join(serialize_rational(c) for c in x.coeffs)})"

    def parse(self, text):
        mt = re.match(r"\s*\(\s*(\d+)\s*;(.*)\)\s*$", text)
        if not mt:
            try:
                return self(parse_rational(text))
            except ParseError:
                raise ParseError(f"not a cyclotomic literal: {text!r}") from None
        m = int(mt.group(1))
        if m != self.m:
            raise FieldMismatch(f"literal of order {m} in Q(zeta_{self.m})")
        parts = [p for p in mt.group(2).split(",")]
        if len(parts) != self.degree:
            raise ParseError(f"expected {self.degree} coefficients in {text!r}")
        return Cyclotomic(self.m, [parse_rational(p) for p in parts])

    def __repr__(self):
        return f"QQ(zeta_{self.m})"


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


class PrimeField(Field):
    tag = "prime"

    def __init__(self, p: int):
        if not is_prime(p):
            raise BadPrime(f"{p} is not prime")
        self.p = p

    def __call__(self, x):
        if isinstance(x, GF):
            if x.p != self.p:
                raise FieldMismatch(f"F_{x.p} element in F_{self.p}")
            return x
        if isinstance(x, int):
            return GF(self.p, x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise BadPrime(f"denominator of {x} vanishes mod {self.p}")
            return GF(self.p, x.numerator * pow(x.denominator, -1, self.p))
        if isinstance(x, str):
            return self.parse(x)
        raise FieldMismatch(f"{x!r} is not in F_{self.p}")

    def contains(self, x):
        return isinstance(x, GF) and x.p == self.p

    def elements(self):
        return [GF(self.p, r) for r in range(self.p)]

    def serialize(self, x):
        return f"{self.p}:{self(x).r}"

    def parse(self, text):
        mt = re.match(r"\s*(\d+)\s*:\s*(\d+)\s*$", text)
        if not mt:
            raise ParseError(f"not a prime-field literal: {text!r}")
        if int(mt.group(1)) != self.p:
            raise FieldMismatch(f"literal of characteristic {mt.group(1)} in F_{self.p}")
        r = int(mt.group(2))
        if r >= self.p:
            raise ParseError(f"non-canonical residue in {text!r}")
        return GF(self.p, r)

    def __repr__(self):
        return f"GF({self.p})"


class DualField(Field):
    """k[eps]/(eps^2) over a base field. Not a field; rank/kernel refuse it."""

    tag = "dual"

    def __init__(self, base: Field):
        if isinstance(base, DualField):
            raise FieldMismatch("nested dual extensions are not supported")
        self.base = base

    def __call__(self, x):
        if isinstance(x, Dual):
            return Dual(self.base(x.a), self.base(x.b))
        return Dual(self.base(x), self.base(0))

    def contains(self, x):
        return isinstance(x, Dual)

    def serialize(self, x):
        x = self(x)
        return f"dual({self.base.serialize(x.a)} | {self.base.serialize(x.b)})"

    def parse(self, text):
        mt = re.match(r"\s*dual\((.*)\|(.*)\)\s*$", text)
        if not mt:
            raise ParseError(f"not a dual-number literal: {text!r}")
        return Dual(self.base.parse(mt.group(1)), self.base.parse(mt.group(2)))

    def __eq__(self, other):
        return isinstance(other, DualField) and self.base == other.base

    def __hash__(self):
        return hash(("dual", self.base))

    def __repr__(self):
        return f"{self.base!r}[eps]"


def field_of(x) -> Field:
    """Smallest registered field containing a scalar value."""
    if isinstance(x, (int, Fraction)):
        return QQ
    if isinstance(x, Cyclotomic):
        return CyclotomicField(x.m)
    if isinstance(x, GF):
        return PrimeField(x.p)
    if isinstance(x, Dual):
        base = field_of(x.a)
        if base is QQ:
            base = field_of(x.b)
        return DualField(base)
    raise FieldMismatch(f"unknown scalar {x!r}")


def cyclotomic_root(m: int, k: int):
    """zeta_m^k. Orders 1 and 2 land in Q itself."""
    if m < 1 or not 0 <= k < m:
        raise ValueError("need m >= 1 and 0 <= k < m")
    if m == 1:
        return Fraction(1)
    if m == 2:
        return Fraction(-1) if k == 1 else Fraction(1)
    return CyclotomicField(m).zeta(k)


def multiplicative_order(x, bound: int = 10_000) -> int | None:
    """Smallest n > 0 with x^n = 1, or None if not found up to ``bound``."""
    cur = x
    for n in range(1, bound + 1):
        if cur == 1:
            return n
        cur = cur * x
    return None


def root_order(m: int, k: int) -> int:
    return m // gcd(m, k)
