"""Concrete vector spaces with a linear operator, used to check reductions by
substitution.

Two realizations are provided:

* :class:`ShiftOracle` -- truncated rational sequences, ``A(s)_k = s_{k+1}``;
* :class:`DerivativeOracle` -- functions ``Σ p_j(t) e^{r_j t}`` with rational
  polynomial coefficients and rational rates, ``A = d/dt``.

Equality inside an oracle is structural and exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_linalg import DimensionError, Mat, Poly, as_rational, format_poly


class ValidityError(ValueError):
    """A shifted sequence ran out of trustworthy entries."""


class InconclusiveError(ValidityError):
    """A comparison could not be decided; lengthen the input sequences."""


@dataclass(frozen=True)
class SequenceVec:
    values: tuple[Fraction, ...]
    valid_length: int

    def __init__(self, values: Sequence, valid_length: int | None = None):
        values = tuple(as_rational(v) for v in values)
        if valid_length is None:
            valid_length = len(values)
        if not 0 <= valid_length <= len(values):
            raise ValueError("valid_length %d outside [0, %d]" % (valid_length, len(values)))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "valid_length", valid_length)

    def trimmed(self) -> tuple[Fraction, ...]:
        return self.values[:self.valid_length]


class ShiftOracle:
    kind = "shift"

    def __init__(self, length: int = 32):
        self.length = length

    def zero(self) -> SequenceVec:
        return SequenceVec([0] * self.length)

    def add(self, u: SequenceVec, v: SequenceVec) -> SequenceVec:
        k = min(u.valid_length, v.valid_length)
        return SequenceVec([a + b for a, b in zip(u.values[:k], v.values[:k])], k)

    def scale(self, c, u: SequenceVec) -> SequenceVec:
        c = as_rational(c)
        return SequenceVec([c * a for a in u.trimmed()])

    def apply(self, u: SequenceVec) -> SequenceVec:
        if u.valid_length < 1:
            raise ValidityError("cannot shift a sequence with no valid entries")
        return SequenceVec(u.values[1:u.valid_length])

    def equal(self, u: SequenceVec, v: SequenceVec) -> bool:
        k = min(u.valid_length, v.valid_length)
        if k == 0:
            raise InconclusiveError("no overlapping valid entries to compare")
        return u.values[:k] == v.values[:k]

    def check_power(self, m: int, u: SequenceVec):
        if u.valid_length <= m:
            raise ValidityError(
                "shift power %d needs more than %d valid entries" % (m, u.valid_length))


class PolyExpFunction:
    """``Σ poly_j(t) · exp(rate_j · t)`` with distinct rates and nonzero polys."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        acc: dict[Fraction, Poly] = {}
        for poly, rate in terms:
            poly = poly if isinstance(poly, Poly) else Poly(poly)
            rate = as_rational(rate)
            acc[rate] = acc.get(rate, Poly()) + poly
        self.terms: tuple[tuple[Poly, Fraction], ...] = tuple(
            (acc[r], r) for r in sorted(acc) if not acc[r].is_zero())

    @classmethod
    def from_poly(cls, p) -> PolyExpFunction:
        return cls([(p, 0)])

    def derivative(self) -> PolyExpFunction:
        # (p e^{rt})' = (p' + r p) e^{rt}
        return PolyExpFunction((p.derivative() + p * Poly([r]), r) for p, r in self.terms)

    def __add__(self, other: PolyExpFunction) -> PolyExpFunction:
        return PolyExpFunction(self.terms + other.terms)

    def scale(self, c) -> PolyExpFunction:
        c = as_rational(c)
        return PolyExpFunction((p * Poly([c]), r) for p, r in self.terms)

    def is_polynomial(self) -> bool:
        return all(r == 0 for _, r in self.terms)

    def value_at(self, t):
        """Exact :class:`Fraction` when every exponential factor is 1, else float."""
        t_exact = not isinstance(t, float)
        if t_exact:
            t = as_rational(t)
        if t_exact and all(r == 0 or t == 0 for _, r in self.terms):
            return sum((p(t) for p, _ in self.terms), Fraction(0))
        tf = float(t)
        return sum(_horner_float(p, tf) * math.exp(float(r) * tf) for p, r in self.terms)

    def census(self) -> tuple[tuple[Fraction, float], ...]:
        return tuple((r, p.degree) for p, r in self.terms)

    def __eq__(self, other):
        if not isinstance(other, PolyExpFunction):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        if not self.terms:
            return "PolyExpFunction(0)"
        parts = []
        for p, r in self.terms:
            s = "(%s)" % format_poly(p, "t")
            if r != 0:
                s += "*exp(%s t)" % r
            parts.append(s)
        return "PolyExpFunction(%s)" % " + ".join(parts)


def _horner_float(p: Poly, t: float) -> float:
    acc = 0.0
    for c in reversed(p.coeffs):
        acc = acc * t + float(c)
    return acc


def poly_function(coeffs) -> PolyExpFunction:
    """Polynomial in t, ascending coefficients."""
    return PolyExpFunction.from_poly(Poly(coeffs))


class DerivativeOracle:
    kind = "derivative"

    def zero(self) -> PolyExpFunction:
        return PolyExpFunction()

    def add(self, u, v):
        return _as_fn(u) + _as_fn(v)

    def scale(self, c, u):
        return _as_fn(u).scale(c)

    def apply(self, u):
        return _as_fn(u).derivative()

    def equal(self, u, v) -> bool:
        return _as_fn(u) == _as_fn(v)

    def check_power(self, m: int, u):
        pass


def _as_fn(u) -> PolyExpFunction:
    if isinstance(u, PolyExpFunction):
        return u
    if isinstance(u, Poly):
        return PolyExpFunction.from_poly(u)
    raise TypeError("expected PolyExpFunction or Poly, got %r" % type(u).__name__)


def apply_power(oracle, m: int, v):
    if m < 0:
        raise ValueError("negative operator power")
    oracle.check_power(m, v)
    for _ in range(m):
        v = oracle.apply(v)
    return v


def eval_poly_in_A(oracle, p: Poly, v):
    """``p(A) v = Σ_k p_k A^k v``."""
    if p.is_zero():
        return oracle.scale(0, v)
    oracle.check_power(p.degree, v)
    total = None
    power = v
    for k, c in enumerate(p.coeffs):
        if k:
            power = oracle.apply(power)
        if c:
            term = oracle.scale(c, power)
            total = term if total is None else oracle.add(total, term)
    return total if total is not None else oracle.scale(0, v)


def linear_combination(oracle, coeffs: Sequence, vectors: Sequence):
    total = None
    for c, v in zip(coeffs, vectors):
        if c:
            term = oracle.scale(c, v)
            total = term if total is None else oracle.add(total, term)
    if total is None:
        # keep the validity window of the inputs for sequence spaces
        return oracle.scale(0, vectors[0]) if len(vectors) else oracle.zero()
    return total


def apply_matrix(oracle, m: Mat, vectors: Sequence) -> list:
    """Row-wise ``m @ vectors`` for a column of V-elements."""
    if len(vectors) != m.cols:
        raise DimensionError("column of length %d, matrix has %d columns"
                             % (len(vectors), m.cols))
    return [linear_combination(oracle, m.row(i), vectors) for i in range(m.rows)]


def synthesize_instance(b: Mat, x: Sequence, oracle) -> list:
    """Forcing ``φ = A(x) - B x`` so that ``x`` solves ``A(x) = B x + φ``."""
    if not b.is_square or b.rows != len(x):
        raise DimensionError("matrix %s does not match %d unknowns" % (b.shape, len(x)))
    bx = apply_matrix(oracle, b, x)
    return [oracle.add(oracle.apply(xi), oracle.scale(-1, bxi)) for xi, bxi in zip(x, bx)]


@dataclass
class CheckResult:
    ok: bool
    checked: int
    failure: str | None = None

    def __bool__(self):
        return self.ok


def check_reduced(reduced: Sequence, x: Sequence, phi: Sequence, oracle) -> CheckResult:
    """Substitute ``x`` and ``φ`` into every equation and compare exactly.

    ``x`` is the column of unknowns the equations are written in (the
    transformed unknowns for a partially reduced system).
    """
    for count, eq in enumerate(reduced):
        lhs = eq.lhs_value(x, oracle)
        rhs = eq.rhs_value(phi, oracle)
        if not oracle.equal(lhs, rhs):
            return CheckResult(False, count, "equation %d (%s): lhs %r != rhs %r"
                               % (count + 1, eq, lhs, rhs))
    return CheckResult(True, len(reduced))
