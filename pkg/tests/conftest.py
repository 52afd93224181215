from fractions import Fraction

import pytest
from hypothesis import strategies as st

from opreduce.exact_linalg import Mat, Poly, det


def interpolated_char_poly(m: Mat) -> Poly:
    """det(tI - m) sampled at n+1 integers and Lagrange-interpolated."""
    n = m.rows
    pts = list(range(n + 1))
    vals = [det(Mat.identity(n).scale(t) - m) for t in pts]
    out = Poly()
    for i, t in enumerate(pts):
        basis = Poly([1])
        for j, s in enumerate(pts):
            if j != i:
                basis = basis * Poly([Fraction(-s, t - s), Fraction(1, t - s)])
        out = out + basis * Poly([vals[i]])
    return out


def matpoly_mul(a: list, b: list) -> list:
    """Product of matrix polynomials given as ascending coefficient lists."""
    n = a[0].rows
    out = [Mat.zeros(n) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x @ y
    return out


@st.composite
def square_matrices(draw, n_min=1, n_max=6, bound=5):
    n = draw(st.integers(n_min, n_max))
    entries = draw(st.lists(st.integers(-bound, bound), min_size=n * n, max_size=n * n))
    return Mat(n, n, entries)


@st.composite
def b_vectors(draw, n_min=2, n_max=8, bound=9, total=None):
    n = draw(st.integers(n_min, n_max))
    b = draw(st.lists(st.integers(-bound, bound), min_size=n, max_size=n))
    if total == 0:
        b[-1] = -sum(b[:-1])
    elif total == "nonzero" and sum(b) == 0:
        b[-1] += 1
    if not any(b):
        b[0] = 1
        if total == 0:
            b[1] = -1
    return b


@pytest.fixture
def hat11():
    from opreduce.canonical_forms import RankOneSpec
    return RankOneSpec([1, 1])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
