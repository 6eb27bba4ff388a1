"""Finite fields GF(p^e) and the small amount of linear algebra built on them.

Field elements are encoded as integers ``0 <= a < q``; the base-p digits of
``a`` are the coefficients (lowest degree first) of the residue polynomial.
``GF.add`` / ``GF.mul`` work on these integer codes directly, and lookup
tables are built lazily for the small fields the geometry module uses.
"""
from __future__ import annotations

import itertools
import math
from functools import cached_property, lru_cache

import numpy as np

MAX_ORDER = 2 ** 20
MAX_SUBSPACES = 10 ** 6
_TABLE_LIMIT = 4096


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % f for f in range(3, math.isqrt(n) + 1, 2))


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, e)`` with ``q == p**e``, or None if q is not a prime power."""
    if q < 2:
        return None
    for p in range(2, math.isqrt(q) + 1):
        if q % p == 0:
            if not is_prime(p):
                return None
            e = 0
            while q % p == 0:
                q //= p
                e += 1
            return (p, e) if q == 1 else None
    return (q, 1)


def is_prime_power(q: int) -> bool:
    return prime_power(q) is not None


def prime_powers(lo: int, hi: int) -> list[int]:
    return [q for q in range(max(lo, 2), hi + 1) if is_prime_power(q)]


# -- polynomials over GF(p), coefficient lists lowest degree first ---------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p):
    a = _trim(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        a = _trim(a)
    return a


def _monic_polys(deg, p):
    for low in itertools.product(range(p), repeat=deg):
        yield list(low) + [1]


def is_irreducible(f, p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg(f)//2."""
    f = _trim(f)
    deg = len(f) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(d, p):
            if not _poly_mod(f, g, p):
                return False
    return True


def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Monic irreducible of degree e whose low coefficients, read as a base-p
    integer (constant term least significant), are smallest."""
    for code in range(p ** e):
        low = [(code // p ** i) % p for i in range(e)]
        f = low + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise FieldError(f"no irreducible polynomial of degree {e} over GF({p})")  # pragma: no cover


class GF:
    """The field GF(p^e) with a deterministic choice of modulus.

    >>> F = GF(2, 2)
    >>> F.modulus
    (1, 1, 1)
    >>> F.mul(2, 2)   # x * x = x + 1
    3
    """

    def __init__(self, p: int, e: int = 1):
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        if e < 1:
            raise FieldError("exponent must be positive")
        if p ** e > MAX_ORDER:
            raise FieldError(f"GF({p}^{e}) exceeds the order cap {MAX_ORDER}")
        self.p = p
        self.e = e
        self.q = p ** e
        self.modulus = (0, 1) if e == 1 else smallest_irreducible(p, e)

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.e) == (other.p, other.e)

    def __hash__(self):
        return hash((self.p, self.e))

    # -- encoding ---------------------------------------------------------
    def coeffs(self, a: int) -> tuple[int, ...]:
        return tuple((a // self.p ** i) % self.p for i in range(self.e))

    def encode(self, coeffs) -> int:
        out = 0
        for i, c in enumerate(coeffs):
            out += (c % self.p) * self.p ** i
        return out

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, int):
            if self.e == 1:
                value %= self.p
            elif not 0 <= value < self.q:
                raise FieldError(f"{value} is not an element code of {self}")
            return FieldElement(self, value)
        return FieldElement(self, self.encode(value))

    def elements(self):
        return [FieldElement(self, a) for a in range(self.q)]

    # -- arithmetic on integer codes --------------------------------------
    def _add(self, a, b):
        if self.e == 1:
            return (a + b) % self.p
        return self.encode(x + y for x, y in zip(self.coeffs(a), self.coeffs(b)))

    def _neg(self, a):
        if self.e == 1:
            return (-a) % self.p
        return self.encode(-x for x in self.coeffs(a))

    def _mul(self, a, b):
        if self.e == 1:
            return a * b % self.p
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        return self.encode(_poly_mod(prod, list(self.modulus), self.p))

    def _pow(self, a, n):
        if n < 0:
            a, n = self._inv(a), -n
        result, base = 1, a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def _inv(self, a):
        if a == 0:
            raise ZeroDivisionError(f"inverse of zero in {self}")
        return self._pow(a, self.q - 2)

    @cached_property
    def tables(self):
        """(add, mul, neg, inv) lookup tables as numpy arrays."""
        if self.q > _TABLE_LIMIT:
            raise FieldError(f"tables are only built for q <= {_TABLE_LIMIT}")
        q = self.q
        add = np.array([[self._add(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
        mul = np.array([[self._mul(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
        neg = np.array([self._neg(a) for a in range(q)], dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
        return add, mul, neg, inv

    def _small(self):
        return self.q <= _TABLE_LIMIT

    def add(self, a: int, b: int) -> int:
        return int(self.tables[0][a, b]) if self._small() else self._add(a, b)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        return int(self.tables[1][a, b]) if self._small() else self._mul(a, b)

    def neg(self, a: int) -> int:
        return int(self.tables[2][a]) if self._small() else self._neg(a)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"inverse of zero in {self}")
        return int(self.tables[3][a]) if self._small() else self._inv(a)

    def pow(self, a: int, n: int) -> int:
        return self._pow(a, n)

    # -- vectors ----------------------------------------------------------
    def dot(self, x, y) -> int:
        acc = 0
        for a, b in zip(x, y):
            if a and b:
                acc = self.add(acc, self.mul(a, b))
        return acc

    def scale(self, c: int, x) -> tuple[int, ...]:
        return tuple(self.mul(c, a) for a in x)

    def vadd(self, x, y) -> tuple[int, ...]:
        return tuple(self.add(a, b) for a, b in zip(x, y))

    def normalize(self, v) -> tuple[int, ...]:
        """Scale a nonzero vector so its first nonzero coordinate is 1."""
        for a in v:
            if a:
                return self.scale(self.inv(a), v)
        raise FieldError("the zero vector is not a projective point")

    def rref(self, rows) -> tuple[tuple[int, ...], ...]:
        """Reduced row echelon form with zero rows dropped."""
        m = [list(r) for r in rows]
        out = []
        ncols = len(m[0]) if m else 0
        r = 0
        for c in range(ncols):
            piv = next((i for i in range(r, len(m)) if m[i][c]), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            ic = self.inv(m[r][c])
            m[r] = [self.mul(ic, a) for a in m[r]]
            for i in range(len(m)):
                if i != r and m[i][c]:
                    f = self.neg(m[i][c])
                    m[i] = [self.add(a, self.mul(f, b)) for a, b in zip(m[i], m[r])]
            r += 1
            if r == len(m):
                break
        for row in m[:r]:
            out.append(tuple(row))
        return tuple(out)

    def span_points(self, basis) -> list[tuple[int, ...]]:
        """Normalized representatives of all projective points in span(basis)."""
        pts = set()
        for coeffs in itertools.product(range(self.q), repeat=len(basis)):
            if not any(coeffs):
                continue
            v = (0,) * len(basis[0])
            for c, b in zip(coeffs, basis):
                if c:
                    v = self.vadd(v, self.scale(c, b))
            pts.add(self.normalize(v))
        return sorted(pts)


class FieldElement:
    """A GF(q) element with operator overloading; wraps an integer code."""

    __slots__ = ("field", "value")

    def __init__(self, field: GF, value: int):
        self.field = field
        self.value = value

    @property
    def coeffs(self):
        return self.field.coeffs(self.value)

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("operands from different fields")
            return other.value
        return self.field(other).value

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def __truediv__(self, other):
        return self * FieldElement(self.field, self._other(other)).inverse()

    def __pow__(self, n: int):
        return FieldElement(self.field, self.field.pow(self.value, n))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field(other).value
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.field}({self.value})"


@lru_cache(maxsize=None)
def field_make(p: int, e: int = 1) -> GF:
    return GF(p, e)


@lru_cache(maxsize=None)
def field_of_order(q: int) -> GF:
    pe = prime_power(q)
    if pe is None:
        raise FieldError(f"{q} is not a prime power")
    return field_make(*pe)


def gaussian_binomial(d: int, r: int, q: int) -> int:
    if r < 0 or r > d:
        return 0
    num = den = 1
    for i in range(r):
        num *= q ** (d - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def enumerate_subspaces(F: GF, d: int, r: int) -> list[tuple[tuple[int, ...], ...]]:
    """All r-dimensional subspaces of GF(q)^d as RREF basis tuples."""
    if not 1 <= r <= d <= 7:
        raise FieldError("need 1 <= r <= d <= 7")
    expected = gaussian_binomial(d, r, F.q)
    if expected > MAX_SUBSPACES:
        raise FieldError(f"{expected} subspaces exceeds the cap {MAX_SUBSPACES}")
    out = []
    for pivots in itertools.combinations(range(d), r):
        free = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, d) if c not in pivots]
        for vals in itertools.product(range(F.q), repeat=len(free)):
            rows = [[0] * d for _ in range(r)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, c), v in zip(free, vals):
                rows[i][c] = v
            out.append(tuple(tuple(row) for row in rows))
    assert len(out) == expected
    return out


class SymplecticForm:
    """Standard alternating form sum_i (x_{2i} y_{2i+1} - x_{2i+1} y_{2i})."""

    def __init__(self, F: GF, dim: int):
        if dim not in (4, 6):
            raise FieldError("symplectic form implemented for dim 4 or 6")
        self.F = F
        self.dim = dim

    def __call__(self, x, y) -> int:
        F = self.F
        acc = 0
        for i in range(0, self.dim, 2):
            acc = F.add(acc, F.sub(F.mul(x[i], y[i + 1]), F.mul(x[i + 1], y[i])))
        return acc

    def gram(self) -> list[list[int]]:
        basis = [tuple(int(i == j) for j in range(self.dim)) for i in range(self.dim)]
        return [[self(a, b) for b in basis] for a in basis]

    def is_totally_isotropic(self, basis) -> bool:
        return all(self(a, b) == 0 for a, b in itertools.combinations(basis, 2))


def symplectic_form(F: GF, dim: int) -> SymplecticForm:
    return SymplecticForm(F, dim)


def rank(F: GF, rows) -> int:
    return len(F.rref(rows)) if rows else 0
