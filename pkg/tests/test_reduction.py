import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import b_vectors
from opreduce.canonical_forms import (
    DegenerateError,
    Orientation,
    RankOneSpec,
    build_matrix,
    jordan_decomposition,
    rational_decomposition,
)
from opreduce.exact_linalg import Mat, Poly, companion
from opreduce.oracle import (
    DerivativeOracle,
    SequenceVec,
    ShiftOracle,
    check_reduced,
    poly_function,
    synthesize_instance,
)
from opreduce.reduction import (
    ConsistencyError,
    CouplingEquation,
    ForcingExpr,
    OperatorSystem,
    ReducedEquation,
    partial_reduce_companion_blocks,
    partial_reduce_jordan,
    partial_reduce_rational,
    total_reduce_adjugate,
    total_reduce_minors,
    total_reduce_rank_one,
)
from opreduce.verify import random_matrix, random_polyexp, random_sequence

F = Fraction
D, S = DerivativeOracle(), ShiftOracle()


def fx(*terms):
    """terms as (coef, order, 1-based forcing index)."""
    return ForcingExpr((c, o, i - 1) for c, o, i in terms)


class TestForcingExpr:
    def test_merges_and_drops_zero(self):
        e = fx((1, 0, 1), (2, 0, 1), (-3, 0, 1), (1, 1, 2))
        assert e.terms == [(1, 1, 1)]

    def test_equality_ignores_order(self):
        assert fx((1, 0, 1), (2, 1, 2)) == fx((2, 1, 2), (1, 0, 1))

    def test_format(self):
        assert fx((1, 1, 1), (1, 0, 2), (-1, 0, 1)).format() == "A(phi1) + phi2 - phi1"
        assert fx((F(-1, 2), 2, 3)).format() == "-(1/2) A^2(phi3)"
        assert ForcingExpr().format() == "0"


class TestAdjugateRoute:
    def test_hat_11(self):
        eqs = total_reduce_adjugate(build_matrix(RankOneSpec([1, 1])))
        assert eqs[0].lhs_poly == Poly([0, -2, 1])
        assert eqs[0].rhs == fx((1, 1, 1), (-1, 0, 1), (1, 0, 2))

    def test_zero_matrix(self):
        eqs = total_reduce_adjugate(Mat.zeros(3))
        for i, eq in enumerate(eqs):
            assert eq.lhs_poly == Poly.monomial(3)
            assert eq.rhs == ForcingExpr.single(i, 1, 2)

    def test_hat_123(self):
        eq = total_reduce_adjugate(build_matrix(RankOneSpec([1, 2, 3])))[0]
        assert eq.rhs == fx((1, 2, 1), (-5, 1, 1), (1, 1, 2), (1, 1, 3))

    def test_accepts_operator_system(self):
        sys = OperatorSystem(Mat.identity(2))
        assert sys.variables == ("x1", "x2")
        assert total_reduce_adjugate(sys) == total_reduce_adjugate(Mat.identity(2))

    def test_orders_bounded(self):
        rng = random.Random(3)
        for _ in range(20):
            n = rng.randint(1, 6)
            for eq in total_reduce_adjugate(random_matrix(rng, n)):
                assert eq.rhs.max_order() <= n - 1


class TestMinorsRoute:
    def test_shift_example(self):
        b = build_matrix(RankOneSpec([1, 1]))
        phi = [SequenceVec([1, 0, 0, 0, 0]), SequenceVec([0] * 5)]
        rhs = total_reduce_minors(b, S, phi)
        assert S.equal(rhs[0], SequenceVec([-1, 0, 0, 0]))

    def test_one_by_one(self):
        phi = [poly_function([1, 2])]
        assert total_reduce_minors(Mat.from_rows([[7]]), D, phi) == phi

    @settings(max_examples=25, deadline=None)
    @given(b_vectors(n_max=5))
    def test_agrees_with_adjugate(self, b):
        rng = random.Random(sum(b))
        n = len(b)
        m = Mat(n, n, [rng.randint(-5, 5) for _ in range(n * n)])
        phi = [random_polyexp(rng, with_exp=False) for _ in range(n)]
        symbolic = [eq.rhs.evaluate(phi, D) for eq in total_reduce_adjugate(m)]
        assert symbolic == total_reduce_minors(m, D, phi)


class TestRankOneClosedForm:
    def test_hat_n2(self):
        eq = total_reduce_rank_one(RankOneSpec([1, 1]))[0]
        assert str(eq) == "(A^2 - 2A) x1 = A(phi1) + phi2 - phi1"

    def test_check_n2(self):
        eq = total_reduce_rank_one(RankOneSpec([1, 1], Orientation.CHECK))[0]
        assert eq.lhs_poly == Poly([0, -2, 1])
        assert eq.rhs == fx((1, 1, 1), (1, 0, 2), (-1, 0, 1))

    def test_hat_last_row(self):
        eq = total_reduce_rank_one(RankOneSpec([0, 0, 1]))[2]
        assert eq.lhs_poly == Poly([0, 0, -1, 1])
        assert eq.rhs == fx((1, 2, 3), (1, 1, 1), (1, 1, 2))

    @settings(max_examples=60)
    @given(b_vectors())
    def test_term_for_term(self, b):
        for o in Orientation:
            spec = RankOneSpec(b, o)
            n = spec.n
            closed = total_reduce_rank_one(spec)
            assert closed == total_reduce_adjugate(build_matrix(spec))
            for eq in closed:
                assert eq.rhs.orders() <= {n - 1, n - 2}


class TestPartialJordan:
    def test_n2(self):
        ps = partial_reduce_jordan(RankOneSpec([1, 1]))
        assert ps.equations[0] == ReducedEquation(Poly([0, 1]), 0, fx((F(-1, 2), 0, 1), (F(1, 2), 0, 2)), "y")
        assert ps.equations[1] == ReducedEquation(Poly([-2, 1]), 1, fx((F(1, 2), 0, 1), (F(1, 2), 0, 2)), "y")

    def test_n3_last(self):
        assert partial_reduce_jordan(RankOneSpec([1, 2, 3])).equations[2].lhs_poly == Poly([-6, 1])

    def test_zero_forcing(self):
        ps = partial_reduce_jordan(RankOneSpec([2, 1, 1]))
        zero = [D.zero()] * 3
        assert all(D.equal(eq.rhs_value(zero, D), D.zero()) for eq in ps.equations)

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateError):
            partial_reduce_jordan(RankOneSpec([1, -1]))


class TestPartialRational:
    def test_n2(self):
        ps = partial_reduce_rational(RankOneSpec([1, 1]))
        nu = ps.transformed_forcing
        assert ps.equations[0].lhs_poly == Poly([0, -2, 1])
        assert ps.equations[0].rhs == nu[1] + nu[0].raised() - nu[0].scale(2)
        assert ps.equations[1] == ReducedEquation(Poly([-2, 1]), 1, nu[1], "z")

    def test_degenerate(self):
        ps = partial_reduce_rational(RankOneSpec([1, -1]))
        nu = ps.transformed_forcing
        assert ps.equations[0].lhs_poly == Poly([0, 0, 1])
        assert ps.equations[0].rhs == nu[1] + nu[0].raised()
        assert ps.equations[1].lhs_poly == Poly([0, 1])

    @settings(max_examples=40, deadline=None)
    @given(b_vectors(n_max=6))
    def test_soundness_after_basis_change(self, b):
        rng = random.Random(len(b) * 31 + sum(b))
        for o in Orientation:
            spec = RankOneSpec(b, o)
            x = [random_polyexp(rng) for _ in b]
            phi = synthesize_instance(build_matrix(spec), x, D)
            systems = [partial_reduce_rational(spec)]
            if not spec.degenerate:
                systems.append(partial_reduce_jordan(spec))
            for ps in systems:
                assert check_reduced(ps.equations, ps.transform_unknowns(x, D), phi, D)


class TestCompanionBlocks:
    def test_single_block_reproduces_rational(self):
        spec = RankOneSpec([1, 1])
        dec = rational_decomposition(spec)
        ps = partial_reduce_companion_blocks([companion(Poly([0, -2, 1]))], dec, build_matrix(spec))
        assert ps.equations[0].lhs_poly == partial_reduce_rational(spec).equations[0].lhs_poly
        assert ps.equations[0].rhs == partial_reduce_rational(spec).equations[0].rhs
        assert isinstance(ps.equations[1], CouplingEquation)

    def test_one_by_one_block(self):
        c = Fraction(5)
        blk = companion(Poly([-c, 1]))
        m = Mat.from_rows([[c]])
        from opreduce.canonical_forms import Decomposition, DecompositionKind
        dec = Decomposition(m, Mat.identity(1), Mat.identity(1), DecompositionKind.RATIONAL, False)
        ps = partial_reduce_companion_blocks([blk], dec, m)
        assert ps.equations == (ReducedEquation(Poly([-c, 1]), 0, fx((1, 0, 1)), "y"),)

    def test_two_blocks(self):
        spec = RankOneSpec([1, 2, 3])
        dec = rational_decomposition(spec)
        blocks = [companion(Poly([0, 1])), companion(Poly([0, -6, 1]))]
        ps = partial_reduce_companion_blocks(blocks, dec, build_matrix(spec))
        psi = ps.transformed_forcing
        lead1, lead2, coupling = ps.equations
        assert lead1 == ReducedEquation(Poly([0, 1]), 0, psi[0], "y")
        # δ_1 = A(ψ_2); δ_2 = det[[ψ_2, 1], [ψ_3, 6]] = 6ψ_2 - ψ_3
        assert lead2.rhs == psi[1].raised() - psi[1].scale(6) + psi[2]
        assert coupling == CouplingEquation(2, 1, Poly([0, 1]), -psi[1])

    def test_soundness(self):
        rng = random.Random(11)
        spec = RankOneSpec([4, -1, 2, 3])
        dec = rational_decomposition(spec)
        blocks = [companion(Poly([0, 1]))] * 2 + [companion(Poly([0, -8, 1]))]
        ps = partial_reduce_companion_blocks(blocks, dec, build_matrix(spec))
        for oracle in (D, S):
            if oracle is S:
                x = [random_sequence(rng, 12) for _ in range(4)]
            else:
                x = [random_polyexp(rng) for _ in range(4)]
            phi = synthesize_instance(build_matrix(spec), x, oracle)
            assert check_reduced(ps.equations, ps.transform_unknowns(x, oracle), phi, oracle)

    def test_inconsistent_transition(self):
        spec = RankOneSpec([1, 2, 3])
        dec = jordan_decomposition(spec)
        blocks = [companion(Poly([0, 1])), companion(Poly([0, -6, 1]))]
        with pytest.raises(ConsistencyError):
            partial_reduce_companion_blocks(blocks, dec, build_matrix(spec))


def test_implication_with_shift_oracle():
    rng = random.Random(5)
    for _ in range(20):
        b = [rng.randint(-4, 4) for _ in range(rng.randint(2, 5))]
        if not any(b):
            continue
        spec = RankOneSpec(b)
        x = [random_sequence(rng, spec.n + 8) for _ in b]
        phi = synthesize_instance(build_matrix(spec), x, S)
        assert check_reduced(total_reduce_rank_one(spec), x, phi, S)
