from __future__ import annotations

import random

import pytest

from gerbejlo.checks import Plan, discrepancy_check, gerbe_checks
from gerbejlo.forms import Form
from gerbejlo.gerbe import EndSection, LSection, convolve, embed, end_action, end_product, end_trace
from gerbejlo.sampling import random_form, random_lsection
from gerbejlo.scenario import builtin_scenario


@pytest.mark.parametrize("name", ["trivial", "s1", "s2", "sz"])
def test_gerbe_suite_passes(name: str) -> None:
    sf = builtin_scenario(name)
    records = gerbe_checks(sf.build(), Plan(), sf.digest)
    assert [r.status for r in records] == ["pass"] * len(records), [r.line() for r in records]


def test_corrupted_cocycle_is_reported_with_a_triple() -> None:
    sf = builtin_scenario("s1-corrupt")
    scenario = sf.build()
    problems = scenario.validate()
    assert problems and "cocycle" in problems[0]
    cocycle = {r.check_id: r for r in gerbe_checks(scenario, Plan(), sf.digest)}["gerbe.mu-cocycle"]
    assert cocycle.status == "fail"
    assert cocycle.witness.startswith("(g,h,k)=((1,),(1,),(2,))")
    assert not sf.build(corrupted=False).validate()


def test_unit_section_is_a_two_sided_identity(s1) -> None:
    rng = random.Random(1)
    unit = LSection({(0,): Form.constant(1, 1)})
    for _ in range(10):
        a = random_lsection(rng, s1, rng.sample([(g,) for g in range(4)], 2))
        assert convolve(s1, unit, a) == a
        assert convolve(s1, a, unit) == a


def test_convolution_matches_matrix_product(s2) -> None:
    """E_{1,g}(a) . (g . E_{1,h}(b)) = E_{1,gh}(mu(g,h) a b^g): the algebra embeds into End E."""
    rng = random.Random(2)
    pool = [(g,) for g in range(4)]
    for _ in range(12):
        g, h = rng.choice(pool), rng.choice(pool)
        a = LSection({g: random_form(rng, s2, degree=rng.randint(0, 1))})
        b = LSection({h: random_form(rng, s2, degree=rng.randint(0, 1))})
        left = end_product(embed(s2, a), end_action(s2, g, embed(s2, b)))
        assert left == embed(s2, convolve(s2, a, b))


def test_end_action_is_a_homomorphism(s1) -> None:
    rng = random.Random(3)
    pool = [(g,) for g in range(4)]
    for _ in range(12):
        x, y, z = (rng.choice(pool) for _ in range(3))
        e1 = EndSection.elementary(x, y, random_form(rng, s1, modes=(-2, 2)))
        e2 = EndSection.elementary(y, z, random_form(rng, s1, degree=1))
        g, h = rng.choice(pool), rng.choice(pool)
        assert end_action(s1, g, end_product(e1, e2)) == end_product(end_action(s1, g, e1), end_action(s1, g, e2))
        gh = s1.group.multiply(g, h)
        assert end_action(s1, g, end_action(s1, h, e1)) == end_action(s1, gh, e1)


def test_graded_trace_of_commutator_vanishes(s2) -> None:
    rng = random.Random(4)
    pool = [(g,) for g in range(4)]
    for _ in range(20):
        p, q = rng.randint(0, 2), rng.randint(0, 2)
        e1 = EndSection({(rng.choice(pool), rng.choice(pool)): random_form(rng, s2, degree=p) for _ in range(3)})
        e2 = EndSection({(rng.choice(pool), rng.choice(pool)): random_form(rng, s2, degree=q) for _ in range(3)})
        sign = -1 if p * q % 2 else 1
        commutator = end_product(e1, e2) - end_product(e2, e1).scale(sign)
        assert not end_trace(commutator)
    assert end_trace(EndSection.elementary((1,), (2,), Form.constant(1, 2))) is None


def test_discrepancy_vanishes_for_trivial_data(trivial, s1) -> None:
    for g in [(0,), (1,)]:
        for y in [(0,), (1,)]:
            assert not trivial.discrepancy_A(g, y)
    for y in [(g,) for g in range(4)]:
        assert not s1.discrepancy_A((0,), y)


def test_discrepancy_identity_on_s1(s1) -> None:
    record = discrepancy_check(s1, Plan(), "s1")
    assert record.passed and record.checked == 4 * 4 * 8


def test_dual_negates_the_connection(s1) -> None:
    dual = s1.dual()
    for g in [(g,) for g in range(4)]:
        assert dual.omega(g) == -s1.omega(g)
        for h in [(h,) for h in range(4)]:
            assert dual.alpha(g, h) == -s1.alpha(g, h)
