"""Trivialized gerbes with connection on a translation groupoid T^m x| Gamma.

Every line bundle L_g is trivial, so a section is a function on the torus, the
multiplication mu(g, h) is a unit monomial c e_k, and the connection on L_g is
d + omega_g.  The direct sum bundle E = sum_y L_y makes End E a matrix algebra
indexed by pairs of group elements; E_{x,y}(f) is the entry at (x, y) and
products are plain matrix products.  The group acts on End E through the
bundle isomorphisms built from mu:

    (g . f)_{gx, gy} = mu(g, y) f_{x,y}^g mu(g, x)^(-1).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping

from .exact import Scalar, field
from .forms import Form
from .groups import AbelianGroup, Element

__all__ = [
    "EndSection",
    "GerbeScenario",
    "LSection",
    "UnitFunction",
    "convolve",
]


@dataclass(frozen=True)
class UnitFunction:
    """The invertible monomial coefficient * e_lattice on the torus."""

    coefficient: Scalar
    lattice: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.coefficient:
            raise ValueError("a unit function needs a nonzero coefficient")

    def __mul__(self, other: UnitFunction) -> UnitFunction:
        return UnitFunction(self.coefficient * other.coefficient, tuple(a + b for a, b in zip(self.lattice, other.lattice)))

    def inverse(self) -> UnitFunction:
        return UnitFunction(self.coefficient.inv(), tuple(-a for a in self.lattice))

    def form(self, m: int, k: int = 0) -> Form:
        return Form.monomial(m, k, self.coefficient.order, self.coefficient, fourier=self.lattice)

    def dlog(self, m: int, k: int = 0) -> Form:
        order = self.coefficient.order
        out = Form.zero(m, k, order)
        for j, kj in enumerate(self.lattice):
            if kj:
                out = out + Form.monomial(m, k, order, kj, dx=[j + 1])
        return out

    def is_one(self) -> bool:
        return self.coefficient == 1 and not any(self.lattice)


class _Memo:
    """Lookup-or-compute cache, safe under concurrent use."""

    def __init__(self) -> None:
        self._data: dict[object, object] = {}
        self._lock = threading.Lock()

    def get(self, key: object, compute: Callable[[], object]) -> object:
        with self._lock:
            if key in self._data:
                return self._data[key]
        value = compute()
        with self._lock:
            return self._data.setdefault(key, value)


@dataclass(eq=False)
class GerbeScenario:
    """Gerbe data on T^m x| Gamma: connection forms omega_g and cocycle mu(g, h)."""

    dimension: int
    order: int
    group: AbelianGroup
    omega_rule: Callable[[Element], Form]
    mu_rule: Callable[[Element, Element], UnitFunction]
    name: str = "scenario"
    _memo: _Memo = dc_field(default_factory=_Memo, repr=False)

    @property
    def m(self) -> int:
        return self.dimension

    @property
    def field(self):
        return field(self.order)

    # -- raw data -----------------------------------------------------------------
    def omega(self, g: Element) -> Form:
        return self._memo.get(("omega", g), lambda: self._checked_omega(g))  # type: ignore[return-value]

    def _checked_omega(self, g: Element) -> Form:
        form = self.omega_rule(g)
        if form.m != self.m or form.k != 0 or form.order != self.order:
            raise ValueError(f"omega({g}) has the wrong shape")
        if form and form.bidegrees() != {(1, 0)}:
            raise ValueError(f"omega({g}) is not a 1-form")
        return form

    def mu(self, g: Element, h: Element) -> UnitFunction:
        return self._memo.get(("mu", g, h), lambda: self.mu_rule(g, h))  # type: ignore[return-value]

    def act(self, g: Element, form: Form) -> Form:
        """The pullback form^g along x -> x.g."""
        if g == self.group.identity:
            return form
        return form.pullback(self.group.action(g))

    def act_unit(self, g: Element, unit: UnitFunction) -> UnitFunction:
        image = self.act(g, unit.form(self.m))
        ((_, four, _, _), coeff), = image.terms.items()
        return UnitFunction(coeff, four)

    # -- derived data -------------------------------------------------------------
    def alpha(self, g: Element, h: Element) -> Form:
        """alpha(g,h) = omega_g + omega_h^g - omega_gh - dlog mu(g,h)."""

        def compute() -> Form:
            gh = self.group.multiply(g, h)
            return self.omega(g) + self.act(g, self.omega(h)) - self.omega(gh) - self.mu(g, h).dlog(self.m)

        return self._memo.get(("alpha", g, h), compute)  # type: ignore[return-value]

    def theta(self, g: Element) -> Form:
        return self._memo.get(("theta", g), lambda: self.omega(g).d())  # type: ignore[return-value]

    def discrepancy_A(self, g: Element, entry: Element) -> Form:
        """Diagonal entry of A(g) at ``entry``: alpha(g, g^-1 entry).

        A(g) is the difference between the direct sum connection and its
        transport by the bundle isomorphism attached to g.
        """
        return self.alpha(g, self.group.multiply(self.group.inverse(g), entry))

    def dual(self) -> GerbeScenario:
        """The dual gerbe: connection forms -omega_g and multiplication mu(g, h)^-1.

        The matrix entry E_{x,y} of End E is a section of L_x^-1 (x) L_y, so End E
        is the endomorphism algebra of the direct sum of the dual lines, composed
        left to right; connection and curvature of that bundle are those of the dual.
        """
        cached = self._memo.get(("dual",), lambda: GerbeScenario(
            self.dimension,
            self.order,
            self.group,
            lambda g: -self.omega(g),
            lambda g, h: self.mu(g, h).inverse(),
            f"{self.name}*",
        ))
        return cached  # type: ignore[return-value]

    # -- checks ---------------------------------------------------------------------
    def cocycle_defect(self, g: Element, h: Element, k: Element) -> tuple[UnitFunction, UnitFunction]:
        """Both sides of mu(g,h) mu(gh,k) = mu(g,hk) mu(h,k)^g."""
        grp = self.group
        left = self.mu(g, h) * self.mu(grp.multiply(g, h), k)
        right = self.mu(g, grp.multiply(h, k)) * self.act_unit(g, self.mu(h, k))
        return left, right

    def validate(self, elements: Iterable[Element] | None = None) -> list[str]:
        """Static checks on the sampled elements; returns a list of problems."""
        problems = []
        try:
            self.group.validate_action(self.order)
        except ValueError as exc:
            problems.append(str(exc))
            return problems
        one = self.group.identity
        if self.omega(one):
            problems.append("omega at the identity is not zero")
        pool = list(elements if elements is not None else self.group.elements(1))
        for g in pool:
            if not self.mu(one, g).is_one() or not self.mu(g, one).is_one():
                problems.append(f"mu is not normalized at {g}")
        for g in pool:
            for h in pool:
                for k in pool:
                    left, right = self.cocycle_defect(g, h, k)
                    if left != right:
                        problems.append(f"mu fails the cocycle identity at {(g, h, k)}")
                        return problems
        return problems


# ---------------------------------------------------------------------------------
# sections of L and of End E


def _add_entry(out: dict, key: object, value: Form) -> None:
    if key in out:
        s = out[key] + value
        if s:
            out[key] = s
        else:
            del out[key]
    elif value:
        out[key] = value


@dataclass(frozen=True)
class LSection:
    """Finitely supported section of L over the arrow space: g -> function."""

    values: Mapping[Element, Form]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", {g: f for g, f in self.values.items() if f})

    def support(self) -> list[Element]:
        return sorted(self.values)

    def __add__(self, other: LSection) -> LSection:
        out = dict(self.values)
        for g, f in other.values.items():
            _add_entry(out, g, f)
        return LSection(out)

    def scale(self, c: Scalar) -> LSection:
        return LSection({g: f.scale(c) for g, f in self.values.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LSection) and dict(self.values) == dict(other.values)

    def __hash__(self) -> int:
        return hash(frozenset(self.values.items()))

    def components(self) -> Iterator[tuple[Element, Form]]:
        return iter(sorted(self.values.items()))


def convolve(s: GerbeScenario, f1: LSection, f2: LSection) -> LSection:
    """(f1 * f2)(g) = sum over g1 g2 = g of mu(g1,g2) f1(g1) f2(g2)^g1."""
    out: dict[Element, Form] = {}
    for g1, a in f1.values.items():
        for g2, b in f2.values.items():
            term = s.mu(g1, g2).form(s.m).wedge(a).wedge(s.act(g1, b))
            _add_entry(out, s.group.multiply(g1, g2), term)
    return LSection(out)


@dataclass(frozen=True)
class EndSection:
    """Finitely supported matrix (x, y) -> form; E_{x,y}(f) has the single entry f at (x, y)."""

    entries: Mapping[tuple[Element, Element], Form]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", {xy: f for xy, f in self.entries.items() if f})

    @classmethod
    def elementary(cls, row: Element, col: Element, value: Form) -> EndSection:
        return cls({(row, col): value})

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __add__(self, other: EndSection) -> EndSection:
        out = dict(self.entries)
        for xy, f in other.entries.items():
            _add_entry(out, xy, f)
        return EndSection(out)

    def __neg__(self) -> EndSection:
        return EndSection({xy: -f for xy, f in self.entries.items()})

    def __sub__(self, other: EndSection) -> EndSection:
        return self + (-other)

    def scale(self, c: Scalar | int | Fraction) -> EndSection:
        return EndSection({xy: f.scale(c) for xy, f in self.entries.items()})

    def map(self, fn: Callable[[Form], Form]) -> EndSection:
        return EndSection({xy: fn(f) for xy, f in self.entries.items()})

    def __mul__(self, other: EndSection) -> EndSection:
        return end_product(self, other)

    def rows(self) -> set[Element]:
        return {x for x, _ in self.entries}

    def columns(self) -> set[Element]:
        return {y for _, y in self.entries}

    def components(self) -> Iterator[tuple[tuple[Element, Element], Form]]:
        return iter(sorted(self.entries.items(), key=lambda kv: kv[0]))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EndSection) and dict(self.entries) == dict(other.entries)

    def __hash__(self) -> int:
        return hash(frozenset(self.entries.items()))

    def __repr__(self) -> str:
        return "EndSection(" + ", ".join(f"{xy}: {f!r}" for xy, f in self.components()) + ")"


def end_product(e1: EndSection, e2: EndSection) -> EndSection:
    by_row: dict[Element, list[tuple[Element, Form]]] = {}
    for (y, z), f in e2.entries.items():
        by_row.setdefault(y, []).append((z, f))
    out: dict[tuple[Element, Element], Form] = {}
    for (x, y), f in e1.entries.items():
        for z, g in by_row.get(y, ()):
            _add_entry(out, (x, z), f.wedge(g))
    return EndSection(out)


def end_trace(e: EndSection) -> Form | None:
    total = None
    for (x, y), f in e.entries.items():
        if x == y:
            total = f if total is None else total + f
    return total


def end_action(s: GerbeScenario, g: Element, e: EndSection) -> EndSection:
    """(g . e)_{gx, gy} = mu(g, y) e_{x,y}^g mu(g, x)^-1."""
    grp = s.group
    out: dict[tuple[Element, Element], Form] = {}
    for (x, y), f in e.entries.items():
        if not f:
            continue
        level = f.k
        twist = s.mu(g, y) * s.mu(g, x).inverse()
        moved = twist.form(s.m, level).wedge(s.act(g, f))
        _add_entry(out, (grp.multiply(g, x), grp.multiply(g, y)), moved)
    return EndSection(out)


def embed(s: GerbeScenario, a: LSection) -> EndSection:
    """A section of L as the element sum_g E_{1,g}(a_g) of End E."""
    one = s.group.identity
    return EndSection({(one, g): f for g, f in a.values.items()})
