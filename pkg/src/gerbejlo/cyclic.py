"""Cyclic cochains (b, B) and group cochains with coefficients in them.

A cochain is an evaluator: it accepts an argument tuple (a~_0, a_1, ..., a_n)
of any length, whose first slot is an element of the unitization, and returns
a Laurent polynomial in u.  Operators act by precomposition, so cochains on
infinite-dimensional algebras never need to be tabulated.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Callable, Generic, Hashable, Iterator, Protocol, Sequence, TypeVar

from .exact import Scalar, ULaurent
from .groups import AbelianGroup, Element

__all__ = [
    "Algebra",
    "CyclicCochain",
    "GroupCochain",
    "Unitized",
    "connes_B",
    "gamma",
    "group_delta",
    "homogeneous_delta",
    "homotopy_h",
    "hochschild_b",
    "psi0",
    "psi0_inverse",
    "total_differential",
]

A = TypeVar("A")


class Algebra(Protocol[A]):
    """What the cochain operators need from an algebra."""

    def multiply(self, a: A, b: A) -> A: ...

    def add(self, a: A, b: A) -> A: ...

    def scale(self, c: Scalar, a: A) -> A: ...

    def act(self, g: Element, a: A) -> A: ...

    def elementary_parts(self, a: A) -> list[tuple[Element, A]]:
        """Decomposition a = sum of parts, each tagged with its row index."""
        ...


@dataclass(frozen=True)
class Unitized(Generic[A]):
    """An element (a, lambda) of the unitization A~ = A + k."""

    element: A | None
    unit: Scalar

    def parts(self) -> Iterator[Unitized[A]]:
        if self.element is not None:
            yield Unitized(self.element, self.unit * 0)
        if self.unit:
            yield Unitized(None, self.unit)


Arguments = tuple  # (Unitized, a_1, ..., a_n)
Evaluator = Callable[[Arguments], ULaurent]


@dataclass(frozen=True)
class CyclicCochain:
    """A cochain on A~ (x) A^(x) n for every n, valued in Laurent polynomials in u."""

    algebra: Algebra
    evaluate: Evaluator
    label: str = ""

    def __call__(self, *args: object) -> ULaurent:
        if not args:
            raise ValueError("a cochain needs at least the zeroth argument")
        first = args[0]
        if not isinstance(first, Unitized):
            raise TypeError("the zeroth argument must be a Unitized element")
        return self.evaluate(tuple(args))

    def __add__(self, other: CyclicCochain) -> CyclicCochain:
        return CyclicCochain(self.algebra, lambda args: self.evaluate(args) + other.evaluate(args))

    def __neg__(self) -> CyclicCochain:
        return CyclicCochain(self.algebra, lambda args: -self.evaluate(args))

    def __sub__(self, other: CyclicCochain) -> CyclicCochain:
        return self + (-other)

    def scale(self, c: object) -> CyclicCochain:
        return CyclicCochain(self.algebra, lambda args: self.evaluate(args) * c)

    def degree_signed(self, sign: Callable[[int], int]) -> CyclicCochain:
        """Multiply the component on n + 1 arguments by sign(n)."""

        def ev(args: Arguments) -> ULaurent:
            value = self.evaluate(args)
            return value if sign(len(args) - 1) > 0 else -value

        return CyclicCochain(self.algebra, ev)

    def shift_u(self, power: int) -> CyclicCochain:
        return CyclicCochain(self.algebra, lambda args: self.evaluate(args).shift(power))

    def acted(self, group: AbelianGroup, g: Element) -> CyclicCochain:
        """(g . c)(a~_0, ..., a_n) = c(g^-1 . a~_0, ..., g^-1 . a_n)."""
        alg = self.algebra
        g_inv = group.inverse(g)
        if g == group.identity:
            return self

        def ev(args: Arguments) -> ULaurent:
            first = args[0]
            moved_first = Unitized(None if first.element is None else alg.act(g_inv, first.element), first.unit)
            return self.evaluate((moved_first,) + tuple(alg.act(g_inv, a) for a in args[1:]))

        return CyclicCochain(alg, ev)


def _times_first(alg: Algebra, first: Unitized, a: object) -> Unitized:
    """a~_0 a as an element of A inside A~."""
    value = alg.scale(first.unit, a) if first.unit else None
    if first.element is not None:
        prod = alg.multiply(first.element, a)
        value = prod if value is None else alg.add(value, prod)
    if value is None:
        value = alg.scale(first.unit, a)
    return Unitized(value, first.unit * 0)


def _first_times(alg: Algebra, a: object, first: Unitized) -> Unitized:
    """a a~_0 as an element of A inside A~."""
    value = alg.scale(first.unit, a) if first.unit else None
    if first.element is not None:
        prod = alg.multiply(a, first.element)
        value = prod if value is None else alg.add(value, prod)
    if value is None:
        value = alg.scale(first.unit, a)
    return Unitized(value, first.unit * 0)


def hochschild_b(c: CyclicCochain) -> CyclicCochain:
    """(b c)(a_0, ..., a_{n+1}) = sum_i (-1)^i c(..., a_i a_{i+1}, ...) + (-1)^{n+1} c(a_{n+1} a_0, a_1, ..., a_n)."""
    alg = c.algebra

    def ev(args: Arguments) -> ULaurent:
        n1 = len(args) - 1  # this is n + 1
        if n1 < 1:
            return ULaurent()
        first = args[0]
        total = c.evaluate((_times_first(alg, first, args[1]),) + tuple(args[2:]))
        for i in range(1, n1):
            merged = alg.multiply(args[i], args[i + 1])
            term = c.evaluate(tuple(args[:i]) + (merged,) + tuple(args[i + 2 :]))
            total = total - term if i % 2 else total + term
        last = c.evaluate((_first_times(alg, args[-1], first),) + tuple(args[1:-1]))
        return total - last if n1 % 2 else total + last

    return CyclicCochain(alg, ev, f"b({c.label})")


def connes_B(c: CyclicCochain) -> CyclicCochain:
    """(B c)(a~_0, ..., a_n) = sum_i (-1)^{ni} c(1, a_i, ..., a_n, a_0, ..., a_{i-1}).

    Only the A-part of a~_0 enters: the unit component would land in a slot
    where normalized cochains vanish.
    """
    alg = c.algebra

    def ev(args: Arguments) -> ULaurent:
        first = args[0]
        if first.element is None:
            return ULaurent()
        n = len(args) - 1
        one = Unitized(None, first.unit * 0 + 1)
        rest = (first.element,) + tuple(args[1:])
        total = ULaurent()
        for i in range(n + 1):
            rotated = rest[i:] + rest[:i]
            term = c.evaluate((one,) + rotated)
            total = total - term if (n * i) % 2 else total + term
        return total

    return CyclicCochain(alg, ev, f"B({c.label})")


def total_differential(c: CyclicCochain, sign: int = 1) -> CyclicCochain:
    """sign * (b + uB) c."""
    out = hochschild_b(c) + connes_B(c).shift_u(1)
    return out if sign > 0 else -out


# ---------------------------------------------------------------------------------
# group cochains


@dataclass(frozen=True)
class GroupCochain:
    """Evaluator (g_1, ..., g_k) -> CyclicCochain for every k.

    Inhomogeneous cochains take k arguments in degree k; homogeneous ones take
    k + 1 arguments and satisfy g . f(g_0, ..., g_k) = f(g g_0, ..., g g_k).
    """

    group: AbelianGroup
    algebra: Algebra
    evaluate: Callable[[tuple[Element, ...]], CyclicCochain]
    homogeneous: bool = False

    def __call__(self, *elements: Element) -> CyclicCochain:
        return self.evaluate(tuple(elements))

    def map_values(self, fn: Callable[[CyclicCochain, tuple[Element, ...]], CyclicCochain]) -> GroupCochain:
        return GroupCochain(self.group, self.algebra, lambda t: fn(self.evaluate(t), t), self.homogeneous)

    def __add__(self, other: GroupCochain) -> GroupCochain:
        return GroupCochain(self.group, self.algebra, lambda t: self.evaluate(t) + other.evaluate(t), self.homogeneous)

    def __neg__(self) -> GroupCochain:
        return GroupCochain(self.group, self.algebra, lambda t: -self.evaluate(t), self.homogeneous)

    def __sub__(self, other: GroupCochain) -> GroupCochain:
        return self + (-other)


def group_delta(f: GroupCochain) -> GroupCochain:
    """(delta f)(g_1..g_{k+1}) = g_1 . f(g_2..) + sum_{i=1}^k (-1)^i f(.., g_i g_{i+1}, ..) + (-1)^{k+1} f(g_1..g_k)."""
    grp = f.group

    def ev(t: tuple[Element, ...]) -> CyclicCochain:
        k1 = len(t)
        if k1 < 1:
            raise ValueError("the coboundary of a cochain is evaluated on at least one element")
        total = f.evaluate(t[1:]).acted(grp, t[0])
        for i in range(1, k1):
            term = f.evaluate(t[: i - 1] + (grp.multiply(t[i - 1], t[i]),) + t[i + 1 :])
            total = total - term if i % 2 else total + term
        last = f.evaluate(t[:-1])
        return total - last if k1 % 2 else total + last

    return GroupCochain(grp, f.algebra, ev, homogeneous=False)


def signed_group_delta(f: GroupCochain) -> GroupCochain:
    """delta' = (-1)^n delta, n the cyclic degree of the evaluation."""
    return group_delta(f).map_values(lambda c, _t: c.degree_signed(lambda n: -1 if n % 2 else 1))


def homogeneous_delta(f: GroupCochain) -> GroupCochain:
    """(delta~ f)(g_0..g_{k+1}) = sum_i (-1)^i f(g_0, .., g_i omitted, .., g_{k+1}).

    On one element this reads f at the empty tuple, the augmentation slot of
    group degree -1 (the inclusion of invariant cochains).
    """

    def ev(t: tuple[Element, ...]) -> CyclicCochain:
        if not t:
            raise ValueError("the augmentation slot has no coboundary landing in it")
        total = None
        for i in range(len(t)):
            term = f.evaluate(t[:i] + t[i + 1 :])
            if i % 2:
                term = -term
            total = term if total is None else total + term
        return total

    return GroupCochain(f.group, f.algebra, ev, homogeneous=True)


def psi0(c: GroupCochain) -> GroupCochain:
    """Homogeneous form: (g_0, ..., g_k) -> g_0 . c(g_0^-1 g_1, g_1^-1 g_2, ..., g_{k-1}^-1 g_k).

    The augmentation slot (the empty tuple) is zero.
    """
    grp = c.group

    def ev(t: tuple[Element, ...]) -> CyclicCochain:
        if not t:
            return CyclicCochain(c.algebra, lambda _args: ULaurent())
        steps = tuple(grp.multiply(grp.inverse(a), b) for a, b in zip(t, t[1:]))
        return c.evaluate(steps).acted(grp, t[0])

    return GroupCochain(grp, c.algebra, ev, homogeneous=True)


def psi0_inverse(f: GroupCochain) -> GroupCochain:
    """(g_1, ..., g_k) -> f(1, g_1, g_1 g_2, ..., g_1 ... g_k)."""
    grp = f.group

    def ev(t: tuple[Element, ...]) -> CyclicCochain:
        partial = [grp.identity]
        for g in t:
            partial.append(grp.multiply(partial[-1], g))
        return f.evaluate(tuple(partial))

    return GroupCochain(grp, f.algebra, ev, homogeneous=False)


def gamma(alg: Algebra, args: Arguments) -> Element:
    """Row index of the first genuine algebra factor of an elementary tensor.

    For E_{g_0,g_1}(a_0) (x) ... this is g_0.  When the zeroth slot is the bare
    adjoined unit the first algebra argument supplies the index instead, which
    keeps the map equivariant.
    """
    first = args[0]
    candidates = ([first.element] if first.element is not None else []) + list(args[1:])
    for a in candidates:
        parts = alg.elementary_parts(a)
        if len(parts) != 1:
            raise ValueError("gamma needs an elementary tensor")
        return parts[0][0]
    raise ValueError("gamma is undefined on the bare unit with no further arguments")


def elementary_expansion(alg: Algebra, args: Arguments) -> Iterator[Arguments]:
    """Expand an argument tuple multilinearly into elementary tensors."""
    first = args[0]
    first_parts: list[Unitized] = []
    if first.element is not None:
        first_parts += [Unitized(p, first.unit * 0) for _, p in alg.elementary_parts(first.element)]
    if first.unit:
        first_parts.append(Unitized(None, first.unit))
    rest_parts = [[p for _, p in alg.elementary_parts(a)] for a in args[1:]]
    for combo in product(first_parts, *rest_parts):
        yield tuple(combo)


def homotopy_h(phi: GroupCochain) -> GroupCochain:
    """(h phi)(g_0, ..., g_k)(s) = (-1)^{k+1} phi(g_0, ..., g_k, gamma(s))(s), additively in s.

    On a degree-0 cochain h lands in the augmentation slot, where it is the
    evaluation phi(gamma(s))(s); with that, delta~ h + h delta~ = 1 in every
    degree k >= 0.
    """
    alg = phi.algebra

    def ev(t: tuple[Element, ...]) -> CyclicCochain:
        k = len(t) - 1

        def value(args: Arguments) -> ULaurent:
            total = ULaurent()
            for s in elementary_expansion(alg, args):
                total = total + phi.evaluate(t + (gamma(alg, s),)).evaluate(s)
            return total if k % 2 else -total

        return CyclicCochain(alg, value)

    return GroupCochain(phi.group, alg, ev, homogeneous=True)
