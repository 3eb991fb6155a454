from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from gerbejlo.exact import ULaurent, cyclotomic_polynomial, field, scalar, zeta
from gerbejlo.linalg import SparseMatrix, rank_kernel

ORDERS = (1, 2, 3, 4, 5, 6, 8, 12)

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def scalars(draw, order: int = 4):
    fld = field(order)
    return fld.from_coordinates([draw(fractions) for _ in range(fld.degree)])


def test_documented_values() -> None:
    z = zeta(4)
    assert z * z == -1
    assert (1 + z) * (1 - z) == 2
    assert scalar(2).inv() == Fraction(1, 2)


@pytest.mark.parametrize("order", ORDERS)
def test_cyclotomic_polynomial_matches_sympy(order: int) -> None:
    x = sympy.Symbol("x")
    expected = sympy.Poly(sympy.cyclotomic_poly(order, x), x).all_coeffs()[::-1]
    assert list(cyclotomic_polynomial(order)) == [int(c) for c in expected]


@pytest.mark.parametrize("order", ORDERS)
def test_zeta_has_exact_order(order: int) -> None:
    z = zeta(order)
    assert z**order == 1
    for p in range(1, order):
        assert z**p != 1


@given(scalars(), scalars(), scalars())
def test_field_axioms(a, b, c) -> None:
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == 0
    if a:
        assert a * a.inv() == 1
        assert (b / a) * a == b


@given(scalars(order=12), scalars(order=12))
def test_conjugation_is_a_field_automorphism(a, b) -> None:
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()
    assert a.conj().conj() == a
    assert (a * a.conj()).conj() == a * a.conj()


@given(scalars(order=5), scalars(order=5))
def test_multiplication_against_polynomial_remainder(a, b) -> None:
    """Oracle: multiply the coordinate polynomials and reduce modulo Phi_5 with sympy."""
    x = sympy.Symbol("x")
    pa = sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(a.coordinates()))
    pb = sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(b.coordinates()))
    reduced = sympy.Poly(sympy.rem(sympy.expand(pa * pb), sympy.cyclotomic_poly(5, x), x), x)
    coeffs = reduced.all_coeffs()[::-1] if not reduced.is_zero else []
    coeffs += [0] * (4 - len(coeffs))
    assert list((a * b).coordinates()) == [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in coeffs]


def test_scalar_hash_agrees_with_rationals() -> None:
    assert hash(scalar(Fraction(3, 2))) == hash(Fraction(3, 2))
    assert len({scalar(1), field(4).one, zeta(4) ** 4}) == 1


def test_laurent_arithmetic() -> None:
    one = field(4).one
    p = ULaurent({0: one, 2: zeta(4)})
    q = ULaurent({-1: one})
    assert (p * q).coefficient(1) == zeta(4)
    assert (p - p) == ULaurent()
    assert p.shift(1).coefficient(3) == zeta(4)
    assert not ULaurent({3: field(4).zero})


# ---------------------------------------------------------------------------------
# sparse linear algebra


def test_rank_kernel_documented_cases() -> None:
    rank, kernel = rank_kernel(SparseMatrix.identity(3))
    assert rank == 3 and kernel == []
    rank, kernel = rank_kernel(SparseMatrix(2, 5))
    assert rank == 0 and len(kernel) == 5
    rank, kernel = rank_kernel(SparseMatrix.from_rows([[1, 1], [1, 1]]))
    assert rank == 1
    assert kernel == [[scalar(-1), scalar(1)]]


@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=5))
def test_rank_kernel_against_sympy(rows) -> None:
    matrix = SparseMatrix.from_rows(rows, order=1)
    rank, kernel = rank_kernel(matrix)
    assert rank == sympy.Matrix(rows).rank()
    assert len(kernel) == 4 - rank
    for vec in kernel:
        assert all(v == 0 for v in matrix.apply(vec))


def test_rank_over_gaussian_integers() -> None:
    z = zeta(4)
    # rows (1, i) and (i, -1) are proportional over Q(i)
    matrix = SparseMatrix.from_rows([[scalar(1), z], [z, scalar(-1)]])
    rank, kernel = rank_kernel(matrix)
    assert rank == 1
    assert all(v == 0 for v in matrix.apply(kernel[0]))
