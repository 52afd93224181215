"""Partial and total reduction of ``A(x) = B x + φ`` into scalar equations.

Reduced systems are symbolic values: each right-hand side is a
:class:`ForcingExpr`, a linear combination of ``A^m(φ_j)``. Evaluating them
against a concrete operator is left to :mod:`opreduce.oracle`.

Indices are 0-based in code; rendered names (``x1``, ``phi1``) are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .canonical_forms import (
    DegenerateError,
    Decomposition,
    Orientation,
    RankOneSpec,
    jordan_decomposition,
    rational_decomposition,
    rank_one_char_poly,
)
from .exact_linalg import (
    DimensionError,
    Mat,
    Poly,
    adjugate_char_coeffs,
    as_rational,
    block_diag,
    char_poly,
    companion,
    delta_minor_sum,
    format_poly,
)
from .oracle import apply_matrix, apply_power, eval_poly_in_A


class ConsistencyError(ValueError):
    """A supplied transition does not conjugate B to the claimed canonical form."""


class ForcingExpr:
    """``Σ coef · A^order(φ_index)``.

    Terms keep first-insertion order for display; equality ignores order.
    Like terms are merged and zero coefficients dropped.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[tuple] = ()):
        acc: dict[tuple[int, int], Fraction] = {}
        for coef, order, index in terms:
            if order < 0 or index < 0:
                raise ValueError("negative order or forcing index")
            key = (int(order), int(index))
            acc[key] = acc.get(key, Fraction(0)) + as_rational(coef)
        self._terms = {k: c for k, c in acc.items() if c != 0}

    @classmethod
    def single(cls, index: int, coef=1, order: int = 0) -> ForcingExpr:
        return cls([(coef, order, index)])

    @property
    def terms(self) -> list[tuple[Fraction, int, int]]:
        return [(c, o, i) for (o, i), c in self._terms.items()]

    def coefficient(self, order: int, index: int) -> Fraction:
        return self._terms.get((order, index), Fraction(0))

    def max_order(self) -> int:
        return max((o for o, _ in self._terms), default=-1)

    def orders(self) -> set[int]:
        return {o for o, _ in self._terms}

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other: ForcingExpr) -> ForcingExpr:
        return ForcingExpr(self.terms + other.terms)

    def __neg__(self) -> ForcingExpr:
        return self.scale(-1)

    def __sub__(self, other: ForcingExpr) -> ForcingExpr:
        return self + (-other)

    def scale(self, c) -> ForcingExpr:
        c = as_rational(c)
        return ForcingExpr((c * k, o, i) for k, o, i in self.terms)

    def raised(self, m: int = 1) -> ForcingExpr:
        """``A^m`` applied formally."""
        return ForcingExpr((k, o + m, i) for k, o, i in self.terms)

    def evaluate(self, phi: Sequence, oracle):
        total = None
        for c, o, i in self.terms:
            term = oracle.scale(c, apply_power(oracle, o, phi[i]))
            total = term if total is None else oracle.add(total, term)
        if total is None:
            return oracle.scale(0, phi[0]) if len(phi) else oracle.zero()
        return total

    def __eq__(self, other):
        if not isinstance(other, ForcingExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def format(self, name: str = "phi") -> str:
        if not self._terms:
            return "0"
        out = ""
        for n, (c, o, i) in enumerate(self.terms):
            atom = "%s%d" % (name, i + 1)
            if o == 1:
                atom = "A(%s)" % atom
            elif o > 1:
                atom = "A^%d(%s)" % (o, atom)
            mag = abs(c)
            if mag != 1:
                coef = str(mag) if mag.denominator == 1 else "(%s)" % mag
                atom = coef + " " + atom
            if n == 0:
                out = ("-" if c < 0 else "") + atom
            else:
                out += (" - " if c < 0 else " + ") + atom
        return out

    def __repr__(self):
        return "ForcingExpr(%s)" % self.format()


class FormalSpace:
    """ForcingExpr values as a vector space with ``A`` acting on orders."""

    def zero(self):
        return ForcingExpr()

    def add(self, u, v):
        return u + v

    def scale(self, c, u):
        return u.scale(c)

    def apply(self, u):
        return u.raised(1)

    def equal(self, u, v):
        return u == v

    def check_power(self, m, u):
        pass


FORMAL = FormalSpace()


@dataclass(frozen=True)
class ReducedEquation:
    """``lhs_poly(A)(var_target) = rhs``."""

    lhs_poly: Poly
    target: int
    rhs: ForcingExpr
    var: str = "x"

    def __post_init__(self):
        if not self.lhs_poly.is_monic() or self.lhs_poly.degree < 1:
            raise ValueError("left-hand operator must be monic of degree >= 1")

    def lhs_value(self, unknowns: Sequence, oracle):
        return eval_poly_in_A(oracle, self.lhs_poly, unknowns[self.target])

    def rhs_value(self, phi: Sequence, oracle):
        return self.rhs.evaluate(phi, oracle)

    def __str__(self):
        p = self.lhs_poly
        op = format_poly(p)
        if sum(1 for c in p.coeffs if c) > 1:
            op = "(%s)" % op
        return "%s %s%d = %s" % (op, self.var, self.target + 1, self.rhs.format())


@dataclass(frozen=True)
class CouplingEquation:
    """``var_target = operator(A)(var_source) + forcing``."""

    target: int
    source: int
    operator: Poly
    forcing: ForcingExpr
    var: str = "y"

    def lhs_value(self, unknowns: Sequence, oracle):
        moved = eval_poly_in_A(oracle, self.operator, unknowns[self.source])
        return oracle.add(unknowns[self.target], oracle.scale(-1, moved))

    def rhs_value(self, phi: Sequence, oracle):
        return self.forcing.evaluate(phi, oracle)

    def __str__(self):
        src = "%s%d" % (self.var, self.source + 1)
        op = format_poly(self.operator)
        head = "A(%s)" % src if op == "A" else "(%s)(%s)" % (op, src)
        rhs = self.forcing.format()
        if rhs == "0":
            tail = ""
        elif rhs.startswith("-"):
            tail = " - " + rhs[1:]
        else:
            tail = " + " + rhs
        return "%s%d = %s%s" % (self.var, self.target + 1, head, tail)


@dataclass(frozen=True)
class OperatorSystem:
    matrix: Mat
    forcing: tuple[str, ...] = ()
    variables: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.matrix.is_square:
            raise DimensionError("system matrix must be square")
        n = self.matrix.rows
        if not self.forcing:
            object.__setattr__(self, "forcing", tuple("phi%d" % (i + 1) for i in range(n)))
        if not self.variables:
            object.__setattr__(self, "variables", tuple("x%d" % (i + 1) for i in range(n)))
        if len(self.forcing) != n or len(self.variables) != n:
            raise DimensionError("forcing/variable count does not match n=%d" % n)

    @property
    def n(self) -> int:
        return self.matrix.rows


@dataclass(frozen=True)
class PartialSystem:
    equations: tuple
    decomposition: Decomposition
    transformed_forcing: tuple[ForcingExpr, ...]
    var: str = "y"
    blocks: tuple[int, ...] = field(default=())

    def transform_unknowns(self, x: Sequence, oracle) -> list:
        """Unknowns of the reduced system: ``transition_inverse @ x``."""
        return apply_matrix(oracle, self.decomposition.transition_inverse, x)

    def __str__(self):
        return "\n".join(str(e) for e in self.equations)


def _as_system(sys) -> OperatorSystem:
    return sys if isinstance(sys, OperatorSystem) else OperatorSystem(sys)


def total_reduce_adjugate(sys) -> list[ReducedEquation]:
    """``Δ_B(A)(x) = Σ_k B_{k-1} A^{n-k}(φ)`` row by row."""
    sys = _as_system(sys)
    n = sys.n
    delta = char_poly(sys.matrix)
    coeffs = adjugate_char_coeffs(sys.matrix).coeffs
    out = []
    for i in range(n):
        terms = []
        for k in range(1, n + 1):
            row = coeffs[k - 1].row(i)
            terms.extend((c, n - k, j) for j, c in enumerate(row) if c)
        out.append(ReducedEquation(delta, i, ForcingExpr(terms)))
    return out


def total_reduce_minors(sys, oracle, concrete_forcing: Sequence) -> list:
    """Evaluated right-hand sides ``Σ_k (-1)^{k-1} δ_k^i(B; A^{n-k}(φ))``."""
    sys = _as_system(sys)
    n = sys.n
    if len(concrete_forcing) != n:
        raise DimensionError("expected %d forcing terms" % n)
    columns = {k: [apply_power(oracle, n - k, f) for f in concrete_forcing]
               for k in range(1, n + 1)}
    out = []
    for i in range(n):
        total = None
        for k in range(1, n + 1):
            d = delta_minor_sum(sys.matrix, i, k, columns[k], oracle)
            if k % 2 == 0:
                d = oracle.scale(-1, d)
            total = d if total is None else oracle.add(total, d)
        out.append(total)
    return out


def total_reduce_rank_one(spec: RankOneSpec, n_vars: int | None = None) -> list[ReducedEquation]:
    """Closed-form total reduction for the rank-one family.

    Hat, equation i:   ``A^{n-1}(φ_i) + Σ_{j≠i} (b_i A^{n-2}(φ_j) - b_j A^{n-2}(φ_i))``
    Check, equation i: ``A^{n-1}(φ_i) + Σ_{j≠i} b_j (A^{n-2}(φ_j) - A^{n-2}(φ_i))``
    """
    n, b = spec.n, spec.b
    if n_vars is not None and n_vars != n:
        raise DimensionError("spec has %d entries but %d variables requested" % (n, n_vars))
    lhs = rank_one_char_poly(spec)
    hat = spec.orientation is Orientation.HAT
    out = []
    for i in range(n):
        terms = [(1, n - 1, i)]
        for j in range(n):
            if j == i:
                continue
            terms.append((b[i] if hat else b[j], n - 2, j))
            terms.append((-b[j], n - 2, i))
        out.append(ReducedEquation(lhs, i, ForcingExpr(terms)))
    return out


def _rows_as_forcing(m: Mat) -> tuple[ForcingExpr, ...]:
    return tuple(ForcingExpr((c, 0, j) for j, c in enumerate(m.row(i)))
                 for i in range(m.rows))


def partial_reduce_jordan(spec: RankOneSpec) -> PartialSystem:
    """``A(y_j) = ψ_j`` for j < n-1 and ``A(y_n) - Σb y_n = ψ_n`` with ``ψ = S^{-1} φ``."""
    if spec.degenerate:
        raise DegenerateError(
            "Σb = 0: the Jordan form is not diagonal; use partial_reduce_rational")
    dec = jordan_decomposition(spec)
    psi = _rows_as_forcing(dec.transition_inverse)
    n = spec.n
    lam = Poly([0, 1])
    eqs = [ReducedEquation(lam, j, psi[j], "y") for j in range(n - 1)]
    eqs.append(ReducedEquation(Poly([-spec.total, 1]), n - 1, psi[n - 1], "y"))
    return PartialSystem(tuple(eqs), dec, psi, "y")


def partial_reduce_rational(spec: RankOneSpec) -> PartialSystem:
    """Rational-form reduction with ``ν = T^{-1} φ``.

    The penultimate unknown gets ``(A² - Σb A) z = ν_n + A(ν_{n-1}) - Σb ν_{n-1}``,
    the last ``A(z_n) - Σb z_n = ν_n``; the rest are ``A(z_j) = ν_j``.
    """
    dec = rational_decomposition(spec)
    nu = _rows_as_forcing(dec.transition_inverse)
    n, s = spec.n, spec.total
    lam = Poly([0, 1])
    eqs = [ReducedEquation(lam, j, nu[j], "z") for j in range(n - 2)]
    second = nu[n - 1] + nu[n - 2].raised(1) - nu[n - 2].scale(s)
    eqs.append(ReducedEquation(Poly([0, -s, 1]), n - 2, second, "z"))
    eqs.append(ReducedEquation(Poly([-s, 1]), n - 1, nu[n - 1], "z"))
    return PartialSystem(tuple(eqs), dec, nu, "z")


def partial_reduce_companion_blocks(canonical_blocks: Sequence[Mat], transition: Decomposition,
                                    sys) -> PartialSystem:
    """Block-wise partial reduction from a rational canonical form.

    Each companion block ``C_i`` of size ``n_i`` starting at offset ``l`` gives

    * ``Δ_{C_i}(A)(y_{l}) = Σ_k (-1)^{k-1} δ_k^1(C_i; A^{n_i-k}(ψ_l .. ψ_{l+n_i-1}))``
    * ``y_{l+m} = A(y_{l+m-1}) - ψ_{l+m-1}`` for ``1 <= m < n_i``

    where ``ψ = T^{-1} φ``. The transition is supplied by the caller.
    """
    sys = _as_system(sys)
    blocks = list(canonical_blocks)
    polys = []
    for blk in blocks:
        p = char_poly(blk)
        if companion(p) != blk:
            raise ValueError("block %r is not in companion form" % (blk,))
        polys.append(p)
    c = block_diag(blocks)
    if c.rows != sys.n:
        raise DimensionError("blocks cover %d unknowns, system has %d" % (c.rows, sys.n))
    t, t_inv = transition.transition, transition.transition_inverse
    if t @ t_inv != Mat.identity(sys.n) or t_inv @ sys.matrix @ t != c:
        raise ConsistencyError("transition does not conjugate B to the block companion form")
    psi = _rows_as_forcing(t_inv)
    eqs: list = []
    offset = 0
    lam = Poly([0, 1])
    for blk, p in zip(blocks, polys):
        size = blk.rows
        local = psi[offset:offset + size]
        rhs = ForcingExpr()
        for k in range(1, size + 1):
            col = [f.raised(size - k) for f in local]
            d = delta_minor_sum(blk, 0, k, col, FORMAL)
            rhs = rhs + (d if k % 2 == 1 else -d)
        eqs.append(ReducedEquation(p, offset, rhs, "y"))
        for m in range(1, size):
            eqs.append(CouplingEquation(offset + m, offset + m - 1, lam, -psi[offset + m - 1]))
        offset += size
    dec = Decomposition(c, t, t_inv, transition.kind, transition.degenerate,
                        transition.pivot, transition.product_order)
    return PartialSystem(tuple(eqs), dec, psi, "y", tuple(b.rows for b in blocks))
