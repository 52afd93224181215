"""Cauchy problems for ``x' = B x + φ(t)``, ``x(t0) = c``.

The coupled first-order system and the decoupled order-n scalar equations
from total reduction are integrated side by side with classical RK4. This is
the only module that uses floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .canonical_forms import RankOneSpec, build_matrix
from .exact_linalg import DimensionError, Mat, as_rational
from .oracle import DerivativeOracle, PolyExpFunction
from .reduction import ReducedEquation, total_reduce_adjugate, total_reduce_rank_one


class ProblemError(ValueError):
    """Inconsistent or out-of-range Cauchy problem data."""


@dataclass(frozen=True)
class CauchyProblem:
    matrix: Mat
    forcing: tuple[PolyExpFunction, ...]
    t0: Fraction
    c: tuple[Fraction, ...]
    horizon: Fraction
    step: Fraction
    spec: RankOneSpec | None = None

    def __post_init__(self):
        n = self.matrix.rows
        if not self.matrix.is_square:
            raise ProblemError("system matrix must be square")
        if len(self.forcing) != n or len(self.c) != n:
            raise ProblemError("forcing and initial values must both have %d entries" % n)
        if self.step <= 0:
            raise ProblemError("step must be positive")
        if self.horizon <= self.t0:
            raise ProblemError("horizon must exceed t0")
        if ((self.horizon - self.t0) / self.step).denominator != 1:
            raise ProblemError("(horizon - t0) / step must be a whole number of steps")

    @classmethod
    def create(cls, matrix, forcing: Sequence, t0, c: Sequence, horizon, step) -> CauchyProblem:
        spec = None
        if isinstance(matrix, RankOneSpec):
            spec, matrix = matrix, build_matrix(matrix)
        fns = tuple(f if isinstance(f, PolyExpFunction) else PolyExpFunction.from_poly(f)
                    for f in forcing)
        return cls(matrix, fns, as_rational(t0), tuple(as_rational(x) for x in c),
                   as_rational(horizon), as_rational(step), spec)

    @property
    def n(self) -> int:
        return self.matrix.rows

    @property
    def n_steps(self) -> int:
        return int((self.horizon - self.t0) / self.step)

    def reduced_equations(self) -> list[ReducedEquation]:
        if self.spec is not None:
            return total_reduce_rank_one(self.spec)
        return total_reduce_adjugate(self.matrix)


@dataclass(frozen=True)
class DerivedInitialConditions:
    """``table[i][m]`` is the m-th derivative of ``x_i`` at ``t0``."""

    table: tuple[tuple, ...]

    def row(self, i: int) -> tuple:
        return self.table[i]


def derive_initial_conditions(p: CauchyProblem) -> DerivedInitialConditions:
    """Substitute the initial values into the system repeatedly:
    ``x^{(m+1)}(t0) = B x^{(m)}(t0) + φ^{(m)}(t0)``.

    Entries stay exact unless a forcing term has ``exp(r t0)`` with ``r t0 != 0``,
    in which case those entries are floats.
    """
    n = p.n
    cols = [list(p.c)]
    derivs = list(p.forcing)
    for m in range(n - 1):
        prev = cols[-1]
        nxt = []
        for i in range(n):
            acc = sum((p.matrix[i, j] * prev[j] for j in range(n)), Fraction(0))
            nxt.append(acc + derivs[i].value_at(p.t0))
        cols.append(nxt)
        derivs = [f.derivative() for f in derivs]
    return DerivedInitialConditions(tuple(tuple(cols[m][i] for m in range(n)) for i in range(n)))


def compile_function(fn: PolyExpFunction):
    """Float evaluator for a poly-exp function."""
    parts = [([float(c) for c in reversed(poly.coeffs)], float(rate)) for poly, rate in fn.terms]

    def f(t: float) -> float:
        total = 0.0
        for coeffs, rate in parts:
            v = np.polyval(coeffs, t)
            total += v if rate == 0.0 else v * math.exp(rate * t)
        return total

    return f


def rk4(rhs, y0, t0: float, h: float, n_steps: int) -> np.ndarray:
    """Classical fourth-order Runge-Kutta on a fixed grid."""
    y = np.array(y0, dtype=float)
    out = np.empty((n_steps + 1, y.size))
    out[0] = y
    t = t0
    for k in range(n_steps):
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (k + 1) * h
        out[k + 1] = y
    return out


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    x: np.ndarray  # shape (len(t), n)


def _grid(p: CauchyProblem) -> np.ndarray:
    return float(p.t0) + float(p.step) * np.arange(p.n_steps + 1)


def solve_coupled(p: CauchyProblem) -> Trajectory:
    b = np.array([[float(v) for v in p.matrix.row(i)] for i in range(p.n)])
    phi = [compile_function(f) for f in p.forcing]

    def rhs(t, x):
        return b @ x + np.array([f(t) for f in phi])

    xs = rk4(rhs, [float(v) for v in p.c], float(p.t0), float(p.step), p.n_steps)
    return Trajectory(_grid(p), xs)


def _evaluated_rhs(eq: ReducedEquation, forcing: Sequence[PolyExpFunction]) -> PolyExpFunction:
    return eq.rhs.evaluate(list(forcing), DerivativeOracle())


def solve_decoupled(p: CauchyProblem) -> Trajectory:
    """Integrate each ``Δ(d/dt) x_i = rhs_i(t)`` in companion first-order form,
    seeded with the derived initial conditions."""
    n = p.n
    ics = derive_initial_conditions(p)
    cols = []
    for eq in p.reduced_equations():
        lower = np.array([float(eq.lhs_poly.coeff(k)) for k in range(n)])
        forcing = compile_function(_evaluated_rhs(eq, p.forcing))

        def rhs(t, y, lower=lower, forcing=forcing):
            dy = np.empty_like(y)
            dy[:-1] = y[1:]
            dy[-1] = forcing(t) - lower @ y
            return dy

        y0 = [float(v) for v in ics.row(eq.target)]
        states = rk4(rhs, y0, float(p.t0), float(p.step), p.n_steps)
        cols.append((eq.target, states[:, 0]))
    xs = np.empty((p.n_steps + 1, n))
    for i, col in cols:
        xs[:, i] = col
    return Trajectory(_grid(p), xs)


def max_deviation(a: Trajectory, b: Trajectory) -> float:
    if a.x.shape != b.x.shape:
        raise DimensionError("trajectories on different grids")
    return float(np.max(np.abs(a.x - b.x)))
