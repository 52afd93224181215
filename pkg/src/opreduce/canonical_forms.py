"""Jordan and rational canonical forms of the rank-one family.

``Hat`` is the matrix whose i-th row is constant ``b_i``; ``Check`` is its
transpose (every row equals ``b``). Both are similar to

* ``diag(0, ..., 0, Σb)`` and the rational form with ``C[n-2, n-1] = 1``,
  ``C[n-1, n-1] = Σb`` when ``Σb != 0``;
* a single nilpotent Jordan block of size 2 in the lower-right corner when
  ``Σb == 0`` (then both canonical forms coincide).

All index arithmetic is 0-based.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact_linalg import Mat, Poly, as_rational, inverse, rank


class Orientation(enum.Enum):
    HAT = "hat"
    CHECK = "check"


class DecompositionKind(enum.Enum):
    JORDAN = "jordan"
    RATIONAL = "rational"


class ZeroSpecError(ValueError):
    """All-zero ``b``: the system matrix is O and there is nothing to reduce."""


class DegenerateError(ValueError):
    """The requested form needs ``Σb != 0``."""


@dataclass(frozen=True)
class RankOneSpec:
    b: tuple[Fraction, ...]
    orientation: Orientation = Orientation.HAT

    def __init__(self, b: Sequence, orientation=Orientation.HAT):
        b = tuple(as_rational(x) for x in b)
        if len(b) < 2:
            raise ValueError("rank-one spec needs n >= 2, got %d" % len(b))
        if not any(b):
            raise ZeroSpecError("b is identically zero")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "orientation", Orientation(orientation))

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def total(self) -> Fraction:
        return sum(self.b, Fraction(0))

    @property
    def degenerate(self) -> bool:
        return self.total == 0

    def transposed(self) -> RankOneSpec:
        other = Orientation.CHECK if self.orientation is Orientation.HAT else Orientation.HAT
        return RankOneSpec(self.b, other)


@dataclass(frozen=True)
class Decomposition:
    """``transition_inverse @ B @ transition == canonical``.

    ``pivot`` is the index used in place of ``b_1`` by the Check-orientation
    transition (nonzero when ``b_1 == 0``). ``product_order`` records which
    of ``R·G`` / ``G·R`` produced the Check rational transition.
    """

    canonical: Mat
    transition: Mat
    transition_inverse: Mat
    kind: DecompositionKind
    degenerate: bool
    pivot: int = 0
    product_order: str | None = field(default=None, compare=False)

    def verify(self, matrix: Mat) -> bool:
        n = matrix.rows
        return (self.transition @ self.transition_inverse == Mat.identity(n)
                and self.transition_inverse @ matrix @ self.transition == self.canonical)


def build_matrix(spec: RankOneSpec) -> Mat:
    n, b = spec.n, spec.b
    if spec.orientation is Orientation.HAT:
        return Mat(n, n, [b[i] for i in range(n) for _ in range(n)])
    return Mat(n, n, [b[j] for _ in range(n) for j in range(n)])


def rank_one_char_poly(spec: RankOneSpec) -> Poly:
    """λ^{n-1}(λ - Σb)."""
    return Poly.monomial(spec.n - 1) * Poly([-spec.total, 1])


def rank_one_min_poly(spec: RankOneSpec) -> Poly:
    """λ(λ - Σb); equals λ² in the nilpotent case."""
    return Poly([0, -spec.total, 1])


def invariant_factors(spec: RankOneSpec) -> list[Poly]:
    """Nontrivial invariant factors in divisibility order.

    ``n-2`` copies of λ followed by λ(λ - Σb). With ``Σb == 0`` the last one
    is λ², read off the nilpotent canonical form.
    """
    lam = Poly([0, 1])
    return [lam] * (spec.n - 2) + [rank_one_min_poly(spec)]


def elementary_divisors(spec: RankOneSpec) -> list[Poly]:
    lam = Poly([0, 1])
    if spec.degenerate:
        return [lam] * (spec.n - 2) + [lam ** 2]
    return [lam] * (spec.n - 1) + [Poly([-spec.total, 1])]


def jordan_form(spec: RankOneSpec) -> Mat:
    n = spec.n
    if spec.degenerate:
        return nilpotent_form(n)
    return Mat.diag([0] * (n - 1) + [spec.total])


def rational_form(spec: RankOneSpec) -> Mat:
    n = spec.n
    if spec.degenerate:
        return nilpotent_form(n)
    return Mat.zeros(n).with_entry(n - 2, n - 1, 1).with_entry(n - 1, n - 1, spec.total)


def nilpotent_form(n: int) -> Mat:
    return Mat.zeros(n).with_entry(n - 2, n - 1, 1)


def corrector(spec: RankOneSpec) -> Mat:
    """Identity with ``-1/Σb`` at ``(n-2, n-1)``; maps J to C by conjugation."""
    n = spec.n
    return Mat.identity(n).with_entry(n - 2, n - 1, -1 / spec.total)


def corrector_inverse(spec: RankOneSpec) -> Mat:
    n = spec.n
    return Mat.identity(n).with_entry(n - 2, n - 1, 1 / spec.total)


def _unit(n: int, k: int) -> list[Fraction]:
    return [Fraction(int(i == k)) for i in range(n)]


def _kernel_basis(spec: RankOneSpec) -> tuple[int, list[list[Fraction]]]:
    """Basis of the 0-eigenspace as in the doubly companion transitions.

    Hat: the hyperplane Σx = 0, spanned by ``e_{j} - e_0``.
    Check: the hyperplane b·x = 0, spanned by ``e_j - (b_j / b_p) e_p`` with
    ``p`` the first index where ``b_p != 0``.
    """
    n, b = spec.n, spec.b
    if spec.orientation is Orientation.HAT:
        p = 0
        vecs = []
        for j in range(1, n):
            v = _unit(n, j)
            v[0] = Fraction(-1)
            vecs.append(v)
        return p, vecs
    p = next(i for i, x in enumerate(b) if x != 0)
    vecs = []
    for j in range(n):
        if j == p:
            continue
        v = _unit(n, j)
        v[p] = -b[j] / b[p]
        vecs.append(v)
    return p, vecs


def _eigenvector_total(spec: RankOneSpec) -> list[Fraction]:
    """Eigenvector for the eigenvalue Σb: ``b`` for Hat, all-ones for Check."""
    if spec.orientation is Orientation.HAT:
        return list(spec.b)
    return [Fraction(1)] * spec.n


def modal_inverse_closed_form(spec: RankOneSpec) -> Mat:
    """Closed-form inverse of the Hat modal matrix (requires ``Σb != 0``).

    Row j < n-1 is ``b_{j+1}`` everywhere except ``b_{j+1} - Σb`` in column
    j+1; the last row is all ``-1``; everything is scaled by ``-1/Σb``.
    """
    n, b, s = spec.n, spec.b, spec.total
    rows = []
    for j in range(n - 1):
        r = [b[j + 1]] * n
        r[j + 1] = b[j + 1] - s
        rows.append(r)
    rows.append([-1] * n)
    return Mat.from_rows(rows).scale(-1 / s)


def _complete_basis(fixed: list[list[Fraction]], candidates: list[list[Fraction]],
                    count: int) -> list[list[Fraction]]:
    chosen: list[list[Fraction]] = []
    for v in candidates:
        if len(chosen) == count:
            break
        if rank(fixed + chosen + [v]) == len(fixed) + len(chosen) + 1:
            chosen.append(v)
    if len(chosen) != count:
        raise ArithmeticError("could not complete eigenspace basis")
    return chosen


def _degenerate_decomposition(spec: RankOneSpec, kind: DecompositionKind) -> Decomposition:
    n = spec.n
    m = build_matrix(spec)
    pivot, kernel = _kernel_basis(spec)
    if spec.orientation is Orientation.HAT:
        u = _unit(n, 0)
    else:
        u = _unit(n, pivot)
    v = m.apply(u)
    eig = _complete_basis([v], kernel, n - 2)
    t = Mat.from_columns(eig + [v, u])
    return Decomposition(nilpotent_form(n), t, inverse(t), kind, True, pivot)


def jordan_decomposition(spec: RankOneSpec) -> Decomposition:
    if spec.degenerate:
        return _degenerate_decomposition(spec, DecompositionKind.JORDAN)
    pivot, kernel = _kernel_basis(spec)
    s = Mat.from_columns(kernel + [_eigenvector_total(spec)])
    if spec.orientation is Orientation.HAT:
        s_inv = modal_inverse_closed_form(spec)
    else:
        s_inv = inverse(s)
    return Decomposition(jordan_form(spec), s, s_inv, DecompositionKind.JORDAN, False, pivot)


def rational_decomposition(spec: RankOneSpec) -> Decomposition:
    if spec.degenerate:
        # both canonical forms coincide; reuse the Jordan chain verbatim
        jd = jordan_decomposition(spec)
        return Decomposition(jd.canonical, jd.transition, jd.transition_inverse,
                             DecompositionKind.RATIONAL, True, jd.pivot)
    jd = jordan_decomposition(spec)
    r, r_inv = corrector(spec), corrector_inverse(spec)
    c = rational_form(spec)
    m = build_matrix(spec)
    if spec.orientation is Orientation.HAT:
        t, t_inv, order = jd.transition @ r, r_inv @ jd.transition_inverse, "SR"
        return Decomposition(c, t, t_inv, DecompositionKind.RATIONAL, False, jd.pivot, order)
    # R·G is tried first; G·R is the product that follows from C = R^{-1} J R
    for order, h in (("RG", r @ jd.transition), ("GR", jd.transition @ r)):
        h_inv = inverse(h)
        if h_inv @ m @ h == c:
            return Decomposition(c, h, h_inv, DecompositionKind.RATIONAL, False,
                                 jd.pivot, order)
    raise ArithmeticError("no transition order reproduces the rational form")
