from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cochains import random_arguments, random_cochain, random_group_cochain
from gerbejlo.cyclic import (
    GroupCochain,
    Unitized,
    connes_B,
    gamma,
    group_delta,
    hochschild_b,
    homogeneous_delta,
    homotopy_h,
    psi0,
    psi0_inverse,
    total_differential,
)
from gerbejlo.exact import ULaurent, field
from gerbejlo.forms import Form
from gerbejlo.gerbe import EndSection
from gerbejlo.jlo import EndAlgebra
from gerbejlo.sampling import element_pool

POOL4 = [(g,) for g in range(4)]


@given(st.integers(0, 10**6), st.integers(2, 4))
def test_b_squared_vanishes(s1, seed: int, n: int) -> None:
    rng = random.Random(seed)
    c = random_cochain(s1, seed)
    args = random_arguments(rng, s1, n, POOL4)
    assert hochschild_b(hochschild_b(c))(*args) == ULaurent()


@given(st.integers(0, 10**6), st.integers(0, 4))
def test_B_squared_and_anticommutator_vanish(s1, seed: int, n: int) -> None:
    rng = random.Random(seed)
    c = random_cochain(s1, seed)
    args = random_arguments(rng, s1, n, POOL4)
    assert connes_B(connes_B(c))(*args) == ULaurent()
    if n >= 1:
        assert (hochschild_b(connes_B(c)) + connes_B(hochschild_b(c)))(*args) == ULaurent()


def test_b_is_not_vacuous(s1) -> None:
    rng = random.Random(0)
    c = random_cochain(s1, "witness")
    values = [hochschild_b(c)(*random_arguments(rng, s1, 2, POOL4)) for _ in range(10)]
    assert any(values)


def test_total_differential_squares_to_zero(s1) -> None:
    rng = random.Random(1)
    c = random_cochain(s1, "total")
    for n in range(2, 5):
        args = random_arguments(rng, s1, n, POOL4)
        assert total_differential(total_differential(c))(*args) == ULaurent()


# ---------------------------------------------------------------------------------
# group cochains


def _pools():
    from gerbejlo.scenario import builtin_scenario

    for name in ("s1", "sz"):
        scenario = builtin_scenario(name).build()
        yield name, scenario, element_pool(scenario, 2)


@pytest.mark.parametrize("name,scenario,pool", list(_pools()))
def test_group_coboundaries_square_to_zero(name, scenario, pool) -> None:
    rng = random.Random(name)
    inhomogeneous = random_group_cochain(scenario, "inh", homogeneous=False)
    homogeneous = random_group_cochain(scenario, "hom", homogeneous=True)
    twice = group_delta(group_delta(inhomogeneous))
    twice_h = homogeneous_delta(homogeneous_delta(homogeneous))
    for _ in range(15):
        k = rng.randint(0, 2)
        args = random_arguments(rng, scenario, rng.randint(0, 2), pool)
        assert twice(*(rng.choice(pool) for _ in range(k + 2)))(*args) == ULaurent()
        assert twice_h(*(rng.choice(pool) for _ in range(k + 2)))(*args) == ULaurent()


@pytest.mark.parametrize("name,scenario,pool", list(_pools()))
def test_homotopy_contracts_in_every_degree(name, scenario, pool) -> None:
    """delta~ h + h delta~ = 1, degree 0 included through the augmentation slot."""
    rng = random.Random(name)
    phi = random_group_cochain(scenario, "phi", homogeneous=True)
    combined = homogeneous_delta(homotopy_h(phi)) + homotopy_h(homogeneous_delta(phi))
    for k in range(3):
        for _ in range(5):
            t = tuple(rng.choice(pool) for _ in range(k + 1))
            args = random_arguments(rng, scenario, rng.randint(0, 2), pool, elementary=True)
            assert combined(*t)(*args) == phi(*t)(*args)


def test_psi0_round_trip_and_equivariance(s1) -> None:
    rng = random.Random(5)
    c = random_group_cochain(s1, "c", homogeneous=False)
    back = psi0_inverse(psi0(c))
    hom = psi0(c)
    grp = s1.group
    for _ in range(10):
        k = rng.randint(0, 2)
        t = tuple(rng.choice(POOL4) for _ in range(k))
        args = random_arguments(rng, s1, rng.randint(0, 2), POOL4)
        assert back(*t)(*args) == c(*t)(*args)
        g = rng.choice(POOL4)
        tt = tuple(rng.choice(POOL4) for _ in range(k + 1))
        moved = tuple(grp.multiply(g, x) for x in tt)
        assert hom(*moved)(*args) == hom(*tt).acted(grp, g)(*args)


def test_psi0_intertwines_the_coboundaries(s1) -> None:
    rng = random.Random(6)
    c = random_group_cochain(s1, "c", homogeneous=False)
    left, right = psi0(group_delta(c)), homogeneous_delta(psi0(c))
    for _ in range(10):
        t = tuple(rng.choice(POOL4) for _ in range(rng.randint(2, 3)))
        args = random_arguments(rng, s1, rng.randint(0, 2), POOL4)
        assert left(*t)(*args) == right(*t)(*args)


def test_coboundary_of_an_invariant_zero_cochain(s1) -> None:
    alg = EndAlgebra(s1)
    const = random_cochain(s1, "const")
    invariant = GroupCochain(s1.group, alg, lambda t: const, homogeneous=True)
    varying = random_group_cochain(s1, "vary", homogeneous=True)
    rng = random.Random(2)
    args = random_arguments(rng, s1, 1, POOL4)
    assert homogeneous_delta(invariant)((0,), (3,))(*args) == ULaurent()
    assert any(homogeneous_delta(varying)(g, h)(*args) for g in POOL4 for h in POOL4)


def test_gamma_reads_the_first_row(s1) -> None:
    alg = EndAlgebra(s1)
    one = Form.constant(1, 1)
    a = EndSection.elementary((2,), (3,), one)
    b = EndSection.elementary((3,), (2,), one)
    unit = field(4).from_rational(1)
    assert gamma(alg, (Unitized(a, unit * 0), b)) == (2,)
    assert gamma(alg, (Unitized(None, unit), b)) == (3,)
    with pytest.raises(ValueError):
        gamma(alg, (Unitized(None, unit),))
