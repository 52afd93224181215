"""Exit criteria. Each test prints one PASS/FAIL line (shown in the terminal
summary) and asserts its own runtime budget."""

import random
import time
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE_LINES, matpoly_mul
from opreduce.canonical_forms import (
    Orientation,
    RankOneSpec,
    build_matrix,
    jordan_decomposition,
    rational_decomposition,
)
from opreduce.cauchy import CauchyProblem, max_deviation, solve_coupled, solve_decoupled
from opreduce.exact_linalg import Mat, Poly, adjugate_char_coeffs, char_poly, det
from opreduce.oracle import (
    DerivativeOracle,
    ShiftOracle,
    check_reduced,
    eval_poly_in_A,
    poly_function,
    synthesize_instance,
)
from opreduce.reduction import (
    partial_reduce_jordan,
    partial_reduce_rational,
    total_reduce_adjugate,
    total_reduce_minors,
    total_reduce_rank_one,
)
from opreduce.verify import random_matrix, random_polyexp, random_spec, random_unknowns

SEED = 20240601


class Criterion:
    def __init__(self, number: int, title: str, budget: float):
        self.number, self.title, self.budget = number, title, budget
        self.failures: list[str] = []
        self.checked = 0

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def check(self, ok: bool, detail: str = ""):
        self.checked += 1
        if not ok and len(self.failures) < 3:
            self.failures.append(detail)

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        ok = exc_type is None and not self.failures and elapsed < self.budget
        ACCEPTANCE_LINES.append("%s [%d] %s: %d checks, %.2fs (budget %gs)%s" % (
            "PASS" if ok else "FAIL", self.number, self.title, self.checked, elapsed,
            self.budget, "" if not self.failures else " -- " + "; ".join(self.failures)))
        if exc_type is None:
            assert not self.failures, self.failures
            assert elapsed < self.budget, "took %.2fs, budget %gs" % (elapsed, self.budget)
        return False


def specs(count: int, **kw):
    rng = random.Random(SEED + count)
    return [random_spec(rng, 2, 8, **kw) for _ in range(count)]


def both(spec_list):
    for s in spec_list:
        yield s
        yield s.transposed()


def test_1_char_poly_closed_form():
    with Criterion(1, "char_poly(B) = λ^(n-1)(λ - Σb)", 5) as c:
        for spec in both(specs(200)):
            expected = Poly.monomial(spec.n - 1) * Poly([-spec.total, 1])
            c.check(char_poly(build_matrix(spec)) == expected, str(spec.b))


def test_2_minimal_polynomial():
    with Criterion(2, "B(B - Σb I) = O", 5) as c:
        for spec in both(specs(200)):
            m = build_matrix(spec)
            c.check((m @ (m - Mat.identity(spec.n).scale(spec.total))).is_zero(), str(spec.b))


def test_3_adjugate_coefficients():
    with Criterion(3, "adjugate coefficients B_1 = B - Σb I, B_k = O; (λI-B)adj = ΔI", 10) as c:
        for spec in specs(200):
            m = build_matrix(spec)
            coeffs = adjugate_char_coeffs(m).coeffs
            c.check(coeffs[0] == Mat.identity(spec.n))
            c.check(coeffs[1] == m - Mat.identity(spec.n).scale(spec.total), str(spec.b))
            c.check(all(bk.is_zero() for bk in coeffs[2:]), str(spec.b))
        rng = random.Random(SEED)
        for _ in range(100):
            n = rng.randint(3, 6)
            m = random_matrix(rng, n)
            eye = Mat.identity(n)
            delta = char_poly(m)
            product = matpoly_mul([-m, eye], adjugate_char_coeffs(m).matrix_poly())
            c.check(product == [eye.scale(delta.coeff(k)) for k in range(n + 1)], repr(m))


def test_4_decomposition_identities():
    with Criterion(4, "S^-1 B S = J, T^-1 B T = C, det S, T T^-1 = I", 10) as c:
        cases = list(both(specs(200, degenerate=False))) + list(both(specs(50, degenerate=True)))
        assert sum(s.degenerate for s in cases) == 100
        for spec in cases:
            m = build_matrix(spec)
            n = spec.n
            jd, rd = jordan_decomposition(spec), rational_decomposition(spec)
            eye = Mat.identity(n)
            c.check(jd.transition @ jd.transition_inverse == eye)
            c.check(jd.transition_inverse @ m @ jd.transition == jd.canonical, str(spec))
            c.check(rd.transition @ rd.transition_inverse == eye)
            c.check(rd.transition_inverse @ m @ rd.transition == rd.canonical, str(spec))
            if spec.degenerate:
                c.check(jd.canonical == rd.canonical == Mat.zeros(n).with_entry(n - 2, n - 1, 1))
            else:
                c.check(jd.canonical == Mat.diag([0] * (n - 1) + [spec.total]))
                c.check(rd.canonical == Mat.zeros(n).with_entry(n - 2, n - 1, 1)
                        .with_entry(n - 1, n - 1, spec.total))
                if spec.orientation is Orientation.HAT:
                    c.check(det(jd.transition) == (-1) ** (n - 1) * spec.total, str(spec))


def test_5_route_agreement():
    oracle = DerivativeOracle()
    with Criterion(5, "adjugate route = principal-minor route", 30) as c:
        rng = random.Random(SEED + 5)
        for _ in range(50):
            n = rng.randint(1, 5)
            m = random_matrix(rng, n)
            phi = [random_polyexp(rng, with_exp=False) for _ in range(n)]
            symbolic = [eq.rhs.evaluate(phi, oracle) for eq in total_reduce_adjugate(m)]
            minors = total_reduce_minors(m, oracle, phi)
            c.check(all(oracle.equal(u, v) for u, v in zip(symbolic, minors)), repr(m))


def test_6_closed_form_agreement():
    with Criterion(6, "closed-form total reduction = adjugate route, term for term", 5) as c:
        for spec in both(specs(200)):
            closed = total_reduce_rank_one(spec)
            general = total_reduce_adjugate(build_matrix(spec))
            c.check(closed == general, str(spec))


@pytest.mark.parametrize("oracle", [ShiftOracle(), DerivativeOracle()], ids=["shift", "derivative"])
def test_7_implication_soundness(oracle):
    with Criterion(7, "implication soundness, %s oracle" % oracle.kind, 30) as c:
        rng = random.Random(SEED + 7)
        for _ in range(100):
            spec = random_spec(rng, 2, 6)
            m = build_matrix(spec)
            x = random_unknowns(rng, oracle, spec.n)
            phi = synthesize_instance(m, x, oracle)
            res = check_reduced(total_reduce_rank_one(spec), x, phi, oracle)
            c.check(res.ok, "total %s: %s" % (spec, res.failure))
            partials = [partial_reduce_rational(spec)]
            if not spec.degenerate:
                partials.append(partial_reduce_jordan(spec))
            for ps in partials:
                res = check_reduced(ps.equations, ps.transform_unknowns(x, oracle), phi, oracle)
                c.check(res.ok, "partial %s %s: %s" % (ps.var, spec, res.failure))


def test_8_cauchy_reproduction():
    with Criterion(8, "Cauchy n=3 b=(1,2,3): deviation <= 1e-6, halving ratio in [8, 32]", 5) as c:
        forcing = [poly_function([0, 1]), poly_function([1]), poly_function([0, 0, 1])]
        devs = []
        for step in (Fraction(1, 100), Fraction(1, 200)):
            p = CauchyProblem.create(RankOneSpec([1, 2, 3]), forcing, 0, [1, 1, 1], 1, step)
            devs.append(max_deviation(solve_coupled(p), solve_decoupled(p)))
        ratio = devs[0] / devs[1]
        c.check(devs[0] <= 1e-6, "deviation %.3e" % devs[0])
        c.check(8 <= ratio <= 32, "ratio %.2f" % ratio)


def test_9_worked_example():
    with Criterion(9, "worked example (A^2 - 2A)x1 = -2 = A(phi1) + phi2 - phi1", 1) as c:
        d = DerivativeOracle()
        x = [poly_function([0, 1]), poly_function([1])]
        phi = [poly_function([0, -1]), poly_function([-1, -1])]
        spec = RankOneSpec([1, 1])
        c.check(synthesize_instance(build_matrix(spec), x, d) == phi)
        lhs = eval_poly_in_A(d, Poly([0, -2, 1]), x[0])
        rhs = d.add(d.add(d.apply(phi[0]), phi[1]), d.scale(-1, phi[0]))
        c.check(lhs == poly_function([-2]) == rhs, "%r %r" % (lhs, rhs))
        c.check(check_reduced(total_reduce_rank_one(spec), x, phi, d).ok)
