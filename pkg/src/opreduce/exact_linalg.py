"""Exact rational linear algebra: polynomials, matrices, determinants and the
adjugate of the characteristic matrix.

Scalars are :class:`fractions.Fraction`; nothing in this module touches floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

Rational = Fraction

#: Degree of the zero polynomial. Keeps ``deg(p * q) == deg(p) + deg(q)`` total.
NEG_INF = -math.inf


class DimensionError(ValueError):
    """Raised when matrix shapes do not fit the requested operation."""


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact scalars: %r" % value)
    return Fraction(value)


class Poly:
    """Univariate polynomial with rational coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> Poly:
        return cls([0] * degree + [coeff])

    @classmethod
    def from_roots(cls, roots: Iterable) -> Poly:
        p = cls([1])
        for r in roots:
            p = p * cls([-as_rational(r), 1])
        return p

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.coeff(k) + other.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly([1])
        for _ in range(k):
            out = out * self
        return out

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs) + 1
        if dq <= 0:
            return Poly(), self
        quot = [Fraction(0)] * dq
        lead = other.coeffs[-1]
        for k in range(dq - 1, -1, -1):
            c = rem[k + len(other.coeffs) - 1] / lead
            quot[k] = c
            if c:
                for j, oc in enumerate(other.coeffs):
                    rem[k + j] -= c * oc
        return Poly(quot), Poly(rem)

    def derivative(self) -> Poly:
        return Poly(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return "Poly(%s)" % format_poly(self, "x")


def _as_poly(p) -> Poly:
    return p if isinstance(p, Poly) else Poly([p])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero if both inputs are zero)."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    if a.is_zero():
        return a
    return a * Poly([1 / a.coeffs[-1]])


def poly_lcm(a: Poly, b: Poly) -> Poly:
    g = poly_gcd(a, b)
    q, _ = (a * b).divmod(g)
    return q * Poly([1 / q.coeffs[-1]])


def _format_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return "(%s)" % c


def format_poly(p: Poly, var: str = "A") -> str:
    """Render descending, e.g. ``A^2 - 2A``."""
    if p.is_zero():
        return "0"
    parts = []
    for k in range(len(p.coeffs) - 1, -1, -1):
        c = p.coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if k == 0:
            body = _format_coeff(mag)
        else:
            mono = var if k == 1 else "%s^%d" % (var, k)
            body = mono if mag == 1 else _format_coeff(mag) + mono
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" + first) if first_sign == "-" else first
    for sign, body in parts[1:]:
        out += " %s %s" % (sign, body)
    return out


class Mat:
    """Dense immutable matrix of rationals stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        entries = tuple(as_rational(e) for e in entries)
        if rows < 1 or cols < 1:
            raise DimensionError("matrix dimensions must be positive")
        if len(entries) != rows * cols:
            raise DimensionError(
                "expected %d entries, got %d" % (rows * cols, len(entries)))
        self.rows = rows
        self.cols = cols
        self.entries: tuple[Fraction, ...] = entries

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> Mat:
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise DimensionError("ragged or empty row list")
        return cls(len(rows), len(rows[0]), [e for r in rows for e in r])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> Mat:
        return cls.from_rows(cols).T

    @classmethod
    def identity(cls, n: int) -> Mat:
        return cls(n, n, [int(i == j) for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> Mat:
        cols = rows if cols is None else cols
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def diag(cls, values: Sequence) -> Mat:
        n = len(values)
        return cls(n, n, [values[i] if i == j else 0
                          for i in range(n) for j in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return self.entries[j::self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def T(self) -> Mat:
        return Mat(self.cols, self.rows,
                   [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def transpose(self) -> Mat:
        return self.T

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> Mat:
        return Mat(len(rows), len(cols), [self[i, j] for i in rows for j in cols])

    def with_entry(self, i: int, j: int, value) -> Mat:
        e = list(self.entries)
        e[i * self.cols + j] = value
        return Mat(self.rows, self.cols, e)

    def _check_same_shape(self, other: Mat):
        if self.shape != other.shape:
            raise DimensionError("shape mismatch %s vs %s" % (self.shape, other.shape))

    def __add__(self, other: Mat) -> Mat:
        self._check_same_shape(other)
        return Mat(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: Mat) -> Mat:
        self._check_same_shape(other)
        return Mat(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> Mat:
        return Mat(self.rows, self.cols, [-a for a in self.entries])

    def scale(self, c) -> Mat:
        c = as_rational(c)
        return Mat(self.rows, self.cols, [c * a for a in self.entries])

    def __matmul__(self, other: Mat) -> Mat:
        if self.cols != other.rows:
            raise DimensionError("cannot multiply %s by %s" % (self.shape, other.shape))
        out = []
        ocols = [other.col(j) for j in range(other.cols)]
        for i in range(self.rows):
            r = self.row(i)
            for c in ocols:
                out.append(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)))
        return Mat(self.rows, other.cols, out)

    def __mul__(self, other):
        if isinstance(other, Mat):
            return self @ other
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def apply(self, vec: Sequence) -> list[Fraction]:
        if len(vec) != self.cols:
            raise DimensionError("vector length %d, expected %d" % (len(vec), self.cols))
        return [sum((a * as_rational(v) for a, v in zip(self.row(i), vec)), Fraction(0))
                for i in range(self.rows)]

    def __pow__(self, k: int) -> Mat:
        if not self.is_square:
            raise DimensionError("power of a non-square matrix")
        out = Mat.identity(self.rows)
        for _ in range(k):
            out = out @ self
        return out

    def is_zero(self) -> bool:
        return not any(self.entries)

    def trace(self) -> Fraction:
        if not self.is_square:
            raise DimensionError("trace of a non-square matrix")
        return sum((self[i, i] for i in range(self.rows)), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return "Mat(%s)" % [[str(e) for e in self.row(i)] for i in range(self.rows)]


def block_diag(blocks: Sequence[Mat]) -> Mat:
    n = sum(b.rows for b in blocks)
    out = [[Fraction(0)] * n for _ in range(n)]
    off = 0
    for b in blocks:
        if not b.is_square:
            raise DimensionError("diagonal blocks must be square")
        for i in range(b.rows):
            for j in range(b.cols):
                out[off + i][off + j] = b[i, j]
        off += b.rows
    return Mat.from_rows(out)


def companion(p: Poly) -> Mat:
    """Companion matrix with ones on the superdiagonal and ``-d_n .. -d_1`` in
    the last row, for monic ``p = λ^n + d_1 λ^{n-1} + ... + d_n``."""
    if not p.is_monic() or p.degree < 1:
        raise ValueError("companion matrix needs a monic polynomial of degree >= 1")
    n = p.degree
    rows = [[int(j == i + 1) for j in range(n)] for i in range(n - 1)]
    rows.append([-p.coeff(j) for j in range(n)])
    return Mat.from_rows(rows)


def _require_square(m: Mat):
    if not m.is_square:
        raise DimensionError("square matrix required, got %dx%d" % m.shape)


def det(m: Mat) -> Fraction:
    """Determinant by Bareiss fraction-free elimination with row pivoting."""
    _require_square(m)
    n = m.rows
    a = m.to_rows()
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det_cofactor(m: Mat) -> Fraction:
    """Laplace expansion along the first row. Exponential; meant for small n."""
    _require_square(m)
    n = m.rows
    if n == 1:
        return m[0, 0]
    total = Fraction(0)
    rest = list(range(1, n))
    for j in range(n):
        if m[0, j]:
            minor = m.submatrix(rest, [c for c in range(n) if c != j])
            total += (-1) ** j * m[0, j] * det_cofactor(minor)
    return total


def inverse(m: Mat) -> Mat:
    """Gauss-Jordan inverse; raises ZeroDivisionError for singular input."""
    _require_square(m)
    n = m.rows
    a = [list(m.row(i)) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("matrix is singular")
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return Mat.from_rows([row[n:] for row in a])


def rank(vectors: Sequence[Sequence]) -> int:
    rows = [[as_rational(x) for x in v] for v in vectors]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][c]:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


def char_poly(m: Mat) -> Poly:
    """det(λI - m) by the division-free Berkowitz recurrence."""
    _require_square(m)
    n = m.rows
    # descending coefficients of the leading r x r block
    c = [Fraction(1), -m[0, 0]]
    for r in range(1, n):
        a = m.submatrix(range(r), range(r))
        row = [m[r, j] for j in range(r)]
        col = [m[i, r] for i in range(r)]
        toeplitz = [Fraction(1), -m[r, r]]
        v = col
        for _ in range(r):
            toeplitz.append(-sum((x * y for x, y in zip(row, v)), Fraction(0)))
            v = a.apply(v)
        c = [sum((toeplitz[i - j] * c[j] for j in range(max(0, i - r - 1), min(i, r) + 1)),
                 Fraction(0))
             for i in range(r + 2)]
    return Poly(reversed(c))


@dataclass(frozen=True)
class AdjugateCoeffs:
    """``adj(λI - B) = Σ_k λ^{n-1-k} coeffs[k]``; ``coeffs[0]`` is the identity."""

    n: int
    coeffs: tuple[Mat, ...]

    def matrix_poly(self) -> list[Mat]:
        """Coefficients in ascending powers of λ."""
        return list(reversed(self.coeffs))

    def at(self, lam) -> Mat:
        out = Mat.zeros(self.n)
        for bk in self.coeffs:
            out = out.scale(lam) + bk
        return out


def adjugate_char_coeffs(m: Mat) -> AdjugateCoeffs:
    """B_0 = I, B_k = B_{k-1} m + d_k I with d_k the λ^{n-k} coefficient of Δ_m."""
    _require_square(m)
    n = m.rows
    delta = char_poly(m)
    eye = Mat.identity(n)
    coeffs = [eye]
    for k in range(1, n):
        coeffs.append(coeffs[-1] @ m + eye.scale(delta.coeff(n - k)))
    return AdjugateCoeffs(n, tuple(coeffs))


class ScalarSpace:
    """The field itself viewed as a vector space; lets column-replacement
    routines run on plain rational columns."""

    def zero(self):
        return Fraction(0)

    def add(self, u, v):
        return u + v

    def scale(self, c, u):
        return c * u

    def equal(self, u, v):
        return u == v


SCALARS = ScalarSpace()


def delta_minor_sum(b: Mat, i: int, k: int, v: Sequence, vspace=SCALARS):
    """Sum of the order-``k`` principal minors containing column ``i`` of ``b``
    after column ``i`` is replaced by ``v`` (0-based ``i``).

    Each minor is expanded along the replaced column, so ``v`` may hold
    elements of any vector space exposing ``zero``/``add``/``scale``.
    """
    _require_square(b)
    n = b.rows
    if not 0 <= i < n:
        raise IndexError("column index %d out of range for n=%d" % (i, n))
    if not 1 <= k <= n:
        raise IndexError("minor order %d out of range for n=%d" % (k, n))
    if len(v) != n:
        raise DimensionError("replacement column has length %d, expected %d" % (len(v), n))
    others = [j for j in range(n) if j != i]
    total = None
    for rest in combinations(others, k - 1):
        idx = sorted(rest + (i,))
        ci = idx.index(i)
        cols = [c for c in idx if c != i]
        for pos, r in enumerate(idx):
            rows = [x for x in idx if x != r]
            cof = det(b.submatrix(rows, cols)) if rows else Fraction(1)
            if cof:
                term = vspace.scale((-1) ** (pos + ci) * cof, v[r])
                total = term if total is None else vspace.add(total, term)
    return vspace.scale(0, v[i]) if total is None else total
