"""Exact scalars in the cyclotomic field Q(zeta_N) and Laurent polynomials in u.

A scalar is stored as integer numerators over one positive common denominator,
in the power basis 1, zeta, ..., zeta^(phi(N)-1) modulo the N-th cyclotomic
polynomial.  Arithmetic never leaves the field and never touches floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Callable, Generic, Iterable, Iterator, TypeVar, Union

__all__ = [
    "CyclotomicField",
    "Scalar",
    "ULaurent",
    "cyclotomic_polynomial",
    "field",
    "scalar",
    "zeta",
]


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Divide integer polynomials (low degree first) with monic divisor."""
    num = list(num)
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    quot = [0] * max(len(num) - len(den) + 1, 1)
    for shift in range(len(num) - len(den), -1, -1):
        coeff = num[shift + len(den) - 1]
        if coeff:
            quot[shift] = coeff
            for i, d in enumerate(den):
                num[shift + i] -= coeff * d
    rem = num[: len(den) - 1] or [0]
    return quot, rem


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError(f"cyclotomic order must be positive, got {n}")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_polynomial(d)))
            if any(rem):
                raise ArithmeticError("inexact cyclotomic division")
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


class CyclotomicField:
    """Multiplication tables for Q(zeta_N) in the power basis."""

    def __init__(self, order: int) -> None:
        self.order = order
        phi = cyclotomic_polynomial(order)
        self.degree = len(phi) - 1
        d = self.degree
        # power_table[e] = coordinates of zeta^e for 0 <= e < max(2d - 1, N)
        table: list[tuple[int, ...]] = []
        current = [0] * d
        current[0] = 1
        for _ in range(max(2 * d - 1, order, 1)):
            table.append(tuple(current))
            shifted = [0] + current
            top = shifted.pop()
            if top:
                for i in range(d):
                    shifted[i] -= top * phi[i]
            current = shifted
        self.power_table = tuple(table)
        self._zero = Scalar._raw(self, (0,) * d, 1)
        self._one = Scalar._raw(self, (1,) + (0,) * (d - 1), 1)

    def __repr__(self) -> str:
        return f"CyclotomicField({self.order})"

    @property
    def zero(self) -> Scalar:
        return self._zero

    @property
    def one(self) -> Scalar:
        return self._one

    def zeta_power(self, exponent: int) -> Scalar:
        return Scalar._raw(self, self.power_table[exponent % self.order], 1)

    def from_rational(self, value: Union[int, Fraction]) -> Scalar:
        value = Fraction(value)
        coords = (value.numerator,) + (0,) * (self.degree - 1)
        return Scalar._raw(self, coords, value.denominator)

    def from_coordinates(self, coords: Iterable[Union[int, Fraction]]) -> Scalar:
        fracs = [Fraction(c) for c in coords]
        if len(fracs) != self.degree:
            raise ValueError(f"expected {self.degree} coordinates, got {len(fracs)}")
        den = 1
        for f in fracs:
            den = den * f.denominator // gcd(den, f.denominator)
        nums = tuple(int(f * den) for f in fracs)
        return Scalar._normalized(self, nums, den)


@lru_cache(maxsize=None)
def field(order: int) -> CyclotomicField:
    return CyclotomicField(order)


class Scalar:
    """Immutable element of Q(zeta_N)."""

    __slots__ = ("field", "nums", "den", "_hash")

    field: CyclotomicField
    nums: tuple[int, ...]
    den: int

    def __init__(self, *_: object) -> None:
        raise TypeError("use scalar(), zeta() or CyclotomicField constructors")

    @classmethod
    def _raw(cls, fld: CyclotomicField, nums: tuple[int, ...], den: int) -> Scalar:
        obj = object.__new__(cls)
        obj.field = fld
        obj.nums = nums
        obj.den = den
        obj._hash = None
        return obj

    @classmethod
    def _normalized(cls, fld: CyclotomicField, nums: tuple[int, ...], den: int) -> Scalar:
        if den < 0:
            nums = tuple(-x for x in nums)
            den = -den
        g = den
        for x in nums:
            if x:
                g = gcd(g, x)
                if g == 1:
                    break
        if not any(nums):
            return cls._raw(fld, nums, 1)
        if g != 1:
            nums = tuple(x // g for x in nums)
            den //= g
        return cls._raw(fld, nums, den)

    # -- coercion -----------------------------------------------------------
    def _coerce(self, other: object) -> Scalar:
        if isinstance(other, Scalar):
            if other.field is not self.field:
                raise ValueError(f"mixing {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        return NotImplemented  # type: ignore[return-value]

    # -- queries -------------------------------------------------------------
    @property
    def order(self) -> int:
        return self.field.order

    def coordinates(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.den) for x in self.nums)

    def is_zero(self) -> bool:
        return not any(self.nums)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.nums[1:])

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.nums[0], self.den)

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other: object) -> Scalar:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.den == o.den:
            return Scalar._normalized(self.field, tuple(a + b for a, b in zip(self.nums, o.nums)), self.den)
        return Scalar._normalized(
            self.field,
            tuple(a * o.den + b * self.den for a, b in zip(self.nums, o.nums)),
            self.den * o.den,
        )

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar._raw(self.field, tuple(-a for a in self.nums), self.den)

    def __sub__(self, other: object) -> Scalar:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> Scalar:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: object) -> Scalar:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self.nums, o.nums
        d = len(a)
        if d == 1:
            return Scalar._normalized(self.field, (a[0] * b[0],), self.den * o.den)
        conv = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        conv[i + j] += x * y
        out = conv[:d]
        table = self.field.power_table
        for e in range(d, 2 * d - 1):
            c = conv[e]
            if c:
                for i, t in enumerate(table[e]):
                    if t:
                        out[i] += c * t
        return Scalar._normalized(self.field, tuple(out), self.den * o.den)

    __rmul__ = __mul__

    def inv(self) -> Scalar:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        d = self.field.degree
        # Solve (multiplication by self) x = 1 by exact elimination over Q.
        columns = [(self * self.field.zeta_power(j)).coordinates() for j in range(d)]
        rows = [[columns[j][i] for j in range(d)] + [Fraction(int(i == 0))] for i in range(d)]
        for col in range(d):
            pivot = next(r for r in range(col, d) if rows[r][col] != 0)
            rows[col], rows[pivot] = rows[pivot], rows[col]
            p = rows[col][col]
            rows[col] = [x / p for x in rows[col]]
            for r in range(d):
                if r != col and rows[r][col] != 0:
                    f = rows[r][col]
                    rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
        return self.field.from_coordinates(row[-1] for row in rows)

    def __truediv__(self, other: object) -> Scalar:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other: object) -> Scalar:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inv()

    def __pow__(self, exponent: int) -> Scalar:
        if exponent < 0:
            return self.inv() ** (-exponent)
        result, base = self.field.one, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conj(self) -> Scalar:
        """Complex conjugation, the automorphism zeta -> zeta^(N-1)."""
        fld = self.field
        total = [0] * fld.degree
        for i, x in enumerate(self.nums):
            if x:
                for j, t in enumerate(fld.power_table[(-i) % fld.order]):
                    total[j] += x * t
        return Scalar._normalized(fld, tuple(total), self.den)

    # -- comparison ----------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, Scalar):
            return self.field is other.field and self.nums == other.nums and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self.nums[0], self.den) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(Fraction(self.nums[0], self.den))
            else:
                self._hash = hash((self.field.order, self.nums, self.den))
        return self._hash

    def __repr__(self) -> str:
        if self.is_rational():
            return f"Scalar({Fraction(self.nums[0], self.den)})"
        return f"Scalar({self})"

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coordinates()):
            if c == 0:
                continue
            mono = "" if i == 0 else ("zeta" if i == 1 else f"zeta^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append(f"-{mono}")
            else:
                terms.append(f"({c})*{mono}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coordinates()]


def scalar(value: Union[int, Fraction, str, Scalar], order: int = 4) -> Scalar:
    if isinstance(value, Scalar):
        return value
    return field(order).from_rational(Fraction(value))


def zeta(order: int = 4, power: int = 1) -> Scalar:
    return field(order).zeta_power(power)


T = TypeVar("T")


class ULaurent(Generic[T]):
    """Finitely supported Laurent polynomial sum_j c_j u^j.

    Coefficients may be scalars or any module elements supporting +, unary -,
    scalar multiplication and a truthiness test that is False exactly for 0.
    The variable u is central and even, so multiplication never adds signs.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, T] | None = None) -> None:
        self.terms: dict[int, T] = {j: c for j, c in (terms or {}).items() if c}

    @classmethod
    def constant(cls, value: T, power: int = 0) -> ULaurent[T]:
        return cls({power: value})

    def __iter__(self) -> Iterator[tuple[int, T]]:
        return iter(sorted(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, power: int, default: T | None = None) -> T | None:
        return self.terms.get(power, default)

    def __add__(self, other: ULaurent[T]) -> ULaurent[T]:
        if not isinstance(other, ULaurent):
            return NotImplemented
        out = dict(self.terms)
        for j, c in other.terms.items():
            out[j] = out[j] + c if j in out else c
        return ULaurent(out)

    def __neg__(self) -> ULaurent[T]:
        return ULaurent({j: -c for j, c in self.terms.items()})

    def __sub__(self, other: ULaurent[T]) -> ULaurent[T]:
        return self + (-other)

    def __mul__(self, other: object) -> ULaurent[T]:
        if isinstance(other, ULaurent):
            out: dict[int, T] = {}
            for i, a in self.terms.items():
                for j, b in other.terms.items():
                    p = a * b
                    out[i + j] = out[i + j] + p if i + j in out else p
            return ULaurent(out)
        return ULaurent({j: c * other for j, c in self.terms.items()})

    def __rmul__(self, other: object) -> ULaurent[T]:
        return ULaurent({j: other * c for j, c in self.terms.items()})

    def shift(self, power: int) -> ULaurent[T]:
        """Multiply by u**power."""
        return ULaurent({j + power: c for j, c in self.terms.items()})

    def map(self, fn: Callable[[T], object]) -> ULaurent:
        return ULaurent({j: fn(c) for j, c in self.terms.items()})

    def degree(self, intrinsic: Callable[[T], int]) -> int:
        """Total degree of a homogeneous element: intrinsic + 2 * exponent."""
        degrees = {intrinsic(c) + 2 * j for j, c in self.terms.items()}
        if len(degrees) != 1:
            raise ValueError(f"not homogeneous: degrees {sorted(degrees)}")
        return degrees.pop()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ULaurent):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "ULaurent(0)"
        body = " + ".join(f"({c})*u^{j}" if j else f"({c})" for j, c in self)
        return f"ULaurent({body})"

    def to_json(self) -> dict[str, object]:
        return {str(j): (c.to_json() if hasattr(c, "to_json") else str(c)) for j, c in self}
