from __future__ import annotations

import random

import pytest

from cochains import random_arguments, random_cochain, random_group_cochain
from gerbejlo.checks import Plan, morphism_checks, pipeline_checks, weighted_trace_cochain
from gerbejlo.cyclic import CyclicCochain, GroupCochain, homogeneous_delta, total_differential
from gerbejlo.exact import ULaurent
from gerbejlo.jlo import EndAlgebra
from gerbejlo.pipeline import NotInvariantError, column_differential, invariance_witness, psi1, psi2, regrade
from gerbejlo.sampling import trace_closing_arguments

POOL4 = [(g,) for g in range(4)]


def _odd(n: int) -> int:
    return -1 if n % 2 else 1


def test_regrading_exchanges_the_differentials(s1) -> None:
    """regrade((b+uB) + (-1)^n delta~) = ((-1)^k (b+uB) + delta~) regrade."""
    c = random_group_cochain(s1, "regrade", homogeneous=True)
    source = GroupCochain(
        s1.group,
        c.algebra,
        lambda t: total_differential(c.evaluate(t)) + homogeneous_delta(c).evaluate(t).degree_signed(_odd),
        homogeneous=True,
    )
    left = regrade(source)
    right = column_differential(regrade(c)) + homogeneous_delta(regrade(c))
    rng = random.Random(3)
    for _ in range(12):
        t = tuple(rng.choice(POOL4) for _ in range(rng.randint(1, 3)))
        args = random_arguments(rng, s1, rng.randint(0, 2), POOL4)
        assert left(*t)(*args) == right(*t)(*args)


def test_psi1_is_the_identity_on_invariant_degree_zero_cocycles(s1) -> None:
    invariant = weighted_trace_cochain(s1, "inv", invariant=True)
    zero = CyclicCochain(EndAlgebra(s1), lambda args: ULaurent())
    c = GroupCochain(s1.group, EndAlgebra(s1), lambda t: invariant if len(t) == 1 else zero, homogeneous=True)
    collapsed = psi1(c, 0)
    rng = random.Random(4)
    for _ in range(6):
        args = trace_closing_arguments(rng, s1, rng.randint(0, 2), POOL4)
        g = rng.choice(POOL4)
        assert collapsed(g)(*args) == invariant(*args)


def test_psi1_rejects_inhomogeneous_input(s1) -> None:
    with pytest.raises(ValueError):
        psi1(random_group_cochain(s1, "x", homogeneous=False), 1)


def test_psi2_refuses_a_non_invariant_cochain(s1) -> None:
    rng = random.Random(5)
    probes = [trace_closing_arguments(rng, s1, 1, POOL4) for _ in range(4)]
    moving = weighted_trace_cochain(s1, "moving", invariant=False)
    assert invariance_witness(moving, s1, probes) is not None
    with pytest.raises(NotInvariantError):
        psi2(moving, s1, probes)
    fixed = weighted_trace_cochain(s1, "fixed", invariant=True)
    assert invariance_witness(fixed, s1, probes) is None
    assert invariance_witness(random_cochain(s1, "generic"), s1, probes) is not None


@pytest.mark.parametrize("name", ["s1", "sz"])
def test_morphism_suite_on_a_small_plan(request, name: str) -> None:
    scenario = request.getfixturevalue(name)
    records = morphism_checks(scenario, Plan(seed=3, samples=6, psi2_samples=6), name)
    assert all(r.passed for r in records), [r.line() for r in records]


def test_small_end_to_end_run(s1) -> None:
    record = pipeline_checks(s1, Plan(seed=4, pipeline_samples=5), "s1")[0]
    assert record.passed, record.line()
    assert record.data["nonzero"] > 0


def test_end_to_end_needs_a_finite_group(sz) -> None:
    assert pipeline_checks(sz, Plan(), "sz")[0].status == "skip"

