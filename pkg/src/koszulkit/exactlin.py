"""Exact fields (Q and F_p) and dense exact linear algebra.

Everything here is pure and exact: rationals are arbitrary precision,
prime fields are modular integers.  No floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, List, Optional, Sequence


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    # deterministic Miller-Rabin for n < 3.3 * 10^24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """A field of scalars with exact arithmetic.

    Two kinds are supported: the rationals (``Rationals``) and prime
    fields ``PrimeField(p)`` with p < 2**63.  Elements are plain Python
    values (Fraction, int); the field object owns the operations.
    """

    characteristic: int = 0

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def of(self, n):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        raise NotImplementedError

    def elements(self):
        raise NotImplementedError("field is not finitely enumerable")

    @property
    def finite(self) -> bool:
        return self.characteristic > 0


class Rationals(Field):
    characteristic = 0

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def of(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / Fraction(a)

    def is_zero(self, a):
        return a == 0

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")


class PrimeField(Field):
    def __init__(self, p: int):
        if not (2 <= p < 2**63):
            raise ValueError(f"prime field characteristic out of range: {p}")
        if not _is_probable_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p

    def zero(self):
        return 0

    def one(self):
        return 1 % self.p

    def of(self, n):
        if isinstance(n, Fraction):
            return self.of(n.numerator) * self.inv(self.of(n.denominator)) % self.p
        return int(n) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def is_zero(self, a):
        return a % self.p == 0

    def elements(self):
        return range(self.p)

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


QQ = Rationals()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def parse_field(spec: str) -> Field:
    """Parse a field tag: ``Q`` or ``F<p>`` (e.g. ``F5``)."""
    spec = spec.strip()
    if spec in ("Q", "QQ"):
        return QQ
    if spec.startswith("F") and spec[1:].isdigit():
        return GF(int(spec[1:]))
    raise ValueError(f"unknown field spec {spec!r}")


class Matrix:
    """Dense matrix over an exact field; rows of scalars."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: Field, rows: Sequence[Sequence], nrows=None, ncols=None):
        self.field = field
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows) if nrows is None else nrows
        self.ncols = (len(self.rows[0]) if self.rows else 0) if ncols is None else ncols
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError("ragged matrix rows")

    @classmethod
    def zero(cls, field: Field, nrows: int, ncols: int) -> "Matrix":
        z = field.zero()
        return cls(field, [[z] * ncols for _ in range(nrows)], nrows, ncols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        m = cls.zero(field, n, n)
        for i in range(n):
            m.rows[i][i] = field.one()
        return m

    @classmethod
    def from_columns(cls, field: Field, cols: Sequence[Sequence], nrows: int) -> "Matrix":
        m = cls.zero(field, nrows, len(cols))
        for j, c in enumerate(cols):
            for i, v in enumerate(c):
                m.rows[i][j] = v
        return m

    def copy(self) -> "Matrix":
        return Matrix(self.field, [list(r) for r in self.rows], self.nrows, self.ncols)

    def column(self, j: int) -> list:
        return [self.rows[i][j] for i in range(self.nrows)]

    def mul_vec(self, v: Sequence) -> list:
        F = self.field
        if len(v) != self.ncols:
            raise ValueError(f"dimension mismatch: {self.ncols} columns, vector of length {len(v)}")
        out = []
        for row in self.rows:
            acc = F.zero()
            for a, x in zip(row, v):
                if not F.is_zero(a) and not F.is_zero(x):
                    acc = F.add(acc, F.mul(a, x))
            out.append(acc)
        return out

    def __repr__(self):
        return f"Matrix({self.field!r}, {self.nrows}x{self.ncols})"


def _rref_generic(field: Field, rows: List[list]) -> tuple[List[list], List[int]]:
    """Reduced row echelon form by ordinary Gaussian elimination."""
    rows = [list(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if not field.is_zero(rows[i][c]):
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.mul(inv, x) for x in rows[r]]
        for i in range(nrows):
            if i != r and not field.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def _rref_rational(rows: List[list]) -> tuple[List[list], List[int]]:
    """RREF over Q via fraction-free (Bareiss) forward elimination.

    Rows are scaled to integers first; the forward pass keeps entries
    integral which controls coefficient growth on resolution-sized
    inputs, then the echelon rows are normalized exactly.
    """
    work: List[list] = []
    for r in rows:
        fr = [Fraction(x) for x in r]
        den = 1
        for x in fr:
            den = den * x.denominator // _gcd(den, x.denominator)
        work.append([int(x * den) for x in fr])
    nrows = len(work)
    ncols = len(work[0]) if work else 0
    pivots: List[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if work[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        pc = work[r][c]
        # one-step fraction-free update: every row below must be rescaled,
        # otherwise the exact divisibility by the previous pivot breaks
        for i in range(r + 1, nrows):
            ic = work[i][c]
            row_i, row_r = work[i], work[r]
            work[i] = [(pc * row_i[j] - ic * row_r[j]) // prev for j in range(ncols)]
        prev = pc
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    # normalize to reduced form with exact division
    out = [[Fraction(x) for x in row] for row in work[:r]]
    for k in range(r):
        c = pivots[k]
        inv = 1 / out[k][c]
        out[k] = [x * inv for x in out[k]]
    for k in reversed(range(r)):
        c = pivots[k]
        for i in range(k):
            f = out[i][c]
            if f:
                out[i] = [x - f * y for x, y in zip(out[i], out[k])]
    z = Fraction(0)
    for _ in range(r, nrows):
        out.append([z] * ncols)
    return out, pivots


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a if a else 1


def rref(m: Matrix) -> tuple[Matrix, List[int]]:
    if isinstance(m.field, Rationals):
        rows, pivots = _rref_rational(m.rows)
    else:
        rows, pivots = _rref_generic(m.field, m.rows)
    return Matrix(m.field, rows, m.nrows, m.ncols), pivots


def rank(m: Matrix) -> int:
    if m.nrows == 0 or m.ncols == 0:
        return 0
    return len(rref(m)[1])


def kernel_basis(m: Matrix) -> List[list]:
    """Basis of the right null space {x : m x = 0}, as column vectors."""
    F = m.field
    if m.ncols == 0:
        return []
    if m.nrows == 0:
        return [[F.one() if i == j else F.zero() for i in range(m.ncols)]
                for j in range(m.ncols)]
    R, pivots = rref(m)
    pivset = set(pivots)
    free = [c for c in range(m.ncols) if c not in pivset]
    basis = []
    for fc in free:
        v = [F.zero()] * m.ncols
        v[fc] = F.one()
        for k, pc in enumerate(pivots):
            v[pc] = F.neg(R.rows[k][fc])
        basis.append(v)
    return basis


def solve(m: Matrix, b: Sequence) -> Optional[list]:
    """One solution x of m x = b, or None if b is not in the image."""
    F = m.field
    if len(b) != m.nrows:
        raise ValueError(f"dimension mismatch: {m.nrows} rows, rhs of length {len(b)}")
    aug = Matrix(F, [list(row) + [bv] for row, bv in zip(m.rows, b)],
                 m.nrows, m.ncols + 1)
    if m.nrows == 0:
        return [F.zero()] * m.ncols
    R, pivots = rref(aug)
    if pivots and pivots[-1] == m.ncols:
        return None
    x = [F.zero()] * m.ncols
    for k, pc in enumerate(pivots):
        x[pc] = R.rows[k][m.ncols]
    return x


class Subspace:
    """Row-echelon model of a subspace of F^n with exact membership tests."""

    def __init__(self, field: Field, ambient_dim: int):
        self.field = field
        self.n = ambient_dim
        self.rows: List[list] = []      # reduced echelon rows
        self.pivots: List[int] = []

    @classmethod
    def spanned_by(cls, field: Field, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        s = cls(field, ambient_dim)
        for v in vectors:
            s.add(v)
        return s

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, v: Sequence) -> list:
        """Residue of v modulo the subspace (zero iff v is a member)."""
        F = self.field
        v = list(v)
        for row, p in zip(self.rows, self.pivots):
            c = v[p]
            if not F.is_zero(c):
                v = [F.sub(x, F.mul(c, y)) for x, y in zip(v, row)]
        return v

    def contains(self, v: Sequence) -> bool:
        F = self.field
        return all(F.is_zero(x) for x in self.reduce(v))

    def add(self, v: Sequence) -> bool:
        """Adjoin v; returns True if the dimension grew."""
        F = self.field
        v = self.reduce(v)
        p = next((i for i, x in enumerate(v) if not F.is_zero(x)), None)
        if p is None:
            return False
        inv = F.inv(v[p])
        v = [F.mul(inv, x) for x in v]
        for row in self.rows:
            c = row[p]
            if not F.is_zero(c):
                row[:] = [F.sub(x, F.mul(c, y)) for x, y in zip(row, v)]
        k = 0
        while k < len(self.pivots) and self.pivots[k] < p:
            k += 1
        self.rows.insert(k, v)
        self.pivots.insert(k, p)
        return True

    def basis(self) -> List[list]:
        return [list(r) for r in self.rows]

    def coordinates(self, v: Sequence) -> Optional[list]:
        """Coefficients of v in terms of basis(); None if not a member."""
        F = self.field
        v = list(v)
        coords = []
        for row, p in zip(self.rows, self.pivots):
            c = v[p]
            coords.append(c)
            if not F.is_zero(c):
                v = [F.sub(x, F.mul(c, y)) for x, y in zip(v, row)]
        if any(not F.is_zero(x) for x in v):
            return None
        return coords

    def complement_in(self, other: "Subspace") -> List[list]:
        """Vectors extending this subspace to a basis of `other` (self <= other)."""
        ext = Subspace(self.field, self.n)
        for r in self.rows:
            ext.add(r)
        out = []
        for v in other.basis():
            if ext.add(v):
                out.append(list(v))
        return out
