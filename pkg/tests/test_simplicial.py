from __future__ import annotations

from functools import reduce

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gerbejlo.simplicial import (
    DeltaMorphism,
    compose,
    cyclic_tau,
    degeneracy,
    face,
    identity,
    nerve_degeneracy,
    nerve_face,
    varpi,
)


def add_mod4(a: int, b: int) -> int:
    return (a + b) % 4


def test_documented_morphisms() -> None:
    assert compose(face(2, 1), face(1, 0)) == compose(face(2, 0), face(1, 0))
    for n in range(4):
        assert compose(degeneracy(n, 0), face(n + 1, 0)) == identity(n)
    assert face(2, 1) == DeltaMorphism(1, 2, (0, 2))


def test_malformed_morphisms_are_rejected() -> None:
    with pytest.raises(ValueError):
        DeltaMorphism(1, 2, (2, 1))
    with pytest.raises(ValueError):
        DeltaMorphism(1, 1, (0, 2))
    with pytest.raises(IndexError):
        face(2, 3)
    with pytest.raises(ValueError):
        compose(face(2, 0), face(2, 0))


@st.composite
def monotone_maps(draw):
    source = draw(st.integers(0, 5))
    target = draw(st.integers(0, 5))
    values = sorted(draw(st.lists(st.integers(0, target), min_size=source + 1, max_size=source + 1)))
    return DeltaMorphism(source, target, tuple(values))


@given(monotone_maps())
def test_epi_mono_factorization_recomposes(f: DeltaMorphism) -> None:
    degens, faces = f.epi_mono()
    # build d_{i_1} ... d_{i_s} s_{j_1} ... s_{j_t}, applied right to left
    current = identity(f.source)
    for j in reversed(degens):
        current = compose(degeneracy(current.target - 1, j), current)
    for i in reversed(faces):
        current = compose(face(current.target + 1, i), current)
    assert current == f


def test_nerve_faces_of_translation_groupoid() -> None:
    act = lambda x, g: x + g  # noqa: E731
    assert nerve_face(1, 0, 10, [3], add_mod4, act) == (13, ())
    assert nerve_face(2, 1, 10, [3, 2], add_mod4, act) == (10, (1,))
    assert nerve_face(2, 2, 10, [3, 2], add_mod4, act) == (10, (3,))
    assert nerve_degeneracy(0, 0, 10, [], 0) == (10, (0,))


@given(st.lists(st.integers(0, 3), min_size=2, max_size=5), st.data())
def test_nerve_simplicial_identity(elements, data) -> None:
    """d_i d_j = d_{j-1} d_i for i < j on the nerve."""
    act = add_mod4
    k = len(elements)
    j = data.draw(st.integers(1, k))
    i = data.draw(st.integers(0, j - 1))
    x1, t1 = nerve_face(k, j, 0, elements, add_mod4, act)
    left = nerve_face(k - 1, i, x1, t1, add_mod4, act)
    x2, t2 = nerve_face(k, i, 0, elements, add_mod4, act)
    right = nerve_face(k - 1, j - 1, x2, t2, add_mod4, act)
    assert left == right


def test_varpi_cases() -> None:
    g = (1, 2, 3)
    assert varpi(3, [0, 3], g, add_mod4, 0) == (2,)
    assert varpi(2, [1, 1], (1, 2), add_mod4, 0) == (0,)
    assert varpi(3, [0, 1, 2, 3], g, add_mod4, 0) == g
    assert varpi(3, [2, 0], g, add_mod4, 0, inverse=lambda a: (-a) % 4) == (1,)
    with pytest.raises(ValueError):
        varpi(3, [2, 0], g, add_mod4, 0)


@given(st.lists(st.integers(), min_size=1, max_size=7))
def test_cyclic_tau_has_order_n_plus_one(args) -> None:
    rotated = reduce(lambda a, _: cyclic_tau(a), range(len(args)), tuple(args))
    assert rotated == tuple(args)
    if len(args) > 1:
        assert cyclic_tau(args) == (args[-1],) + tuple(args[:-1])


def test_cyclic_tau_small_cases() -> None:
    assert cyclic_tau(("a", "b")) == ("b", "a")
    assert cyclic_tau(cyclic_tau(cyclic_tau(("a", "b", "c")))) == ("a", "b", "c")
