"""Randomized property suites shared by the ``verify`` command and the tests."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .canonical_forms import (
    Orientation,
    RankOneSpec,
    build_matrix,
)
from .exact_linalg import Mat
from .oracle import (
    DerivativeOracle,
    PolyExpFunction,
    SequenceVec,
    ShiftOracle,
    check_reduced,
    synthesize_instance,
)
from .reduction import (
    partial_reduce_jordan,
    partial_reduce_rational,
    total_reduce_adjugate,
    total_reduce_minors,
    total_reduce_rank_one,
)

RATES = (Fraction(0), Fraction(-1), Fraction(1, 2), Fraction(2))


def random_spec(rng: random.Random, n_min: int = 2, n_max: int = 8,
                orientation: Orientation | None = None,
                degenerate: bool | None = None, bound: int = 9) -> RankOneSpec:
    """Integer ``b`` in ``[-bound, bound]``; ``degenerate`` forces Σb = 0 or Σb != 0."""
    if orientation is None:
        orientation = rng.choice(list(Orientation))
    while True:
        n = rng.randint(n_min, n_max)
        b = [rng.randint(-bound, bound) for _ in range(n)]
        if degenerate:
            b[-1] = -sum(b[:-1])
            if abs(b[-1]) > bound:
                continue
        if not any(b):
            continue
        if degenerate is False and sum(b) == 0:
            continue
        return RankOneSpec(b, orientation)


def random_matrix(rng: random.Random, n: int, bound: int = 5) -> Mat:
    return Mat(n, n, [rng.randint(-bound, bound) for _ in range(n * n)])


def random_polyexp(rng: random.Random, max_degree: int = 4, with_exp: bool = True) -> PolyExpFunction:
    terms = [([rng.randint(-5, 5) for _ in range(rng.randint(0, max_degree) + 1)], 0)]
    if with_exp and rng.random() < 0.5:
        rate = rng.choice(RATES[1:])
        terms.append(([rng.randint(-3, 3) for _ in range(rng.randint(1, 2))], rate))
    return PolyExpFunction(terms)


def random_sequence(rng: random.Random, length: int) -> SequenceVec:
    return SequenceVec([Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(length)])


def random_unknowns(rng: random.Random, oracle, n: int, extra: int = 6) -> list:
    if oracle.kind == "shift":
        return [random_sequence(rng, n + extra + rng.randint(0, 3)) for _ in range(n)]
    return [random_polyexp(rng) for _ in range(n)]


@dataclass
class SuiteReport:
    name: str
    passed: int = 0
    failed: int = 0
    failures: list[str] = field(default_factory=list)

    def record(self, ok: bool, detail: str = ""):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < 5:
                self.failures.append(detail)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return "%s %s: %d/%d" % (status, self.name, self.passed, self.passed + self.failed)


def soundness_trial(rng: random.Random, oracle, n_max: int = 6) -> tuple[bool, str]:
    """Synthesize ``(x, φ)`` and check the total and partial reductions."""
    spec = random_spec(rng, 2, n_max)
    b = build_matrix(spec)
    x = random_unknowns(rng, oracle, spec.n)
    phi = synthesize_instance(b, x, oracle)
    res = check_reduced(total_reduce_rank_one(spec), x, phi, oracle)
    if not res:
        return False, "total %s: %s" % (spec, res.failure)
    partials = [partial_reduce_rational(spec)]
    if not spec.degenerate:
        partials.append(partial_reduce_jordan(spec))
    for ps in partials:
        y = ps.transform_unknowns(x, oracle)
        res = check_reduced(ps.equations, y, phi, oracle)
        if not res:
            return False, "partial %s %s: %s" % (ps.var, spec, res.failure)
    return True, ""


def closed_form_trial(rng: random.Random, n_max: int = 8) -> tuple[bool, str]:
    spec = random_spec(rng, 2, n_max)
    a = total_reduce_rank_one(spec)
    b = total_reduce_adjugate(build_matrix(spec))
    ok = all(p.lhs_poly == q.lhs_poly and p.target == q.target and p.rhs == q.rhs
             for p, q in zip(a, b))
    return ok, "" if ok else "closed form differs for %s" % (spec,)


def route_agreement_trial(rng: random.Random, oracle, n_max: int = 5) -> tuple[bool, str]:
    n = rng.randint(1, n_max)
    b = random_matrix(rng, n)
    if oracle.kind == "derivative":
        phi = [random_polyexp(rng, with_exp=False) for _ in range(n)]
    else:
        phi = random_unknowns(rng, oracle, n)
    symbolic = [eq.rhs.evaluate(phi, oracle) for eq in total_reduce_adjugate(b)]
    minors = total_reduce_minors(b, oracle, phi)
    ok = all(oracle.equal(u, v) for u, v in zip(symbolic, minors))
    return ok, "" if ok else "routes disagree for %r" % (b,)


def run_suites(trials: int, seed: int) -> list[SuiteReport]:
    rng = random.Random(seed)
    reports = []
    for oracle in (ShiftOracle(), DerivativeOracle()):
        rep = SuiteReport("implication soundness (%s)" % oracle.kind)
        for _ in range(trials):
            rep.record(*soundness_trial(rng, oracle))
        reports.append(rep)
    rep = SuiteReport("closed form vs adjugate")
    for _ in range(trials):
        rep.record(*closed_form_trial(rng))
    reports.append(rep)
    for oracle in (ShiftOracle(), DerivativeOracle()):
        rep = SuiteReport("adjugate vs minors (%s)" % oracle.kind)
        for _ in range(max(1, trials // 2)):
            rep.record(*route_agreement_trial(rng, oracle))
        reports.append(rep)
    return reports
