"""From group cochains over End E to cyclic cochains of the twisted convolution algebra.

The composite is Phi = Psi_2 o Psi_1 o regrade o Psi_0 o tau:

* ``psi0`` (module cyclic) turns inhomogeneous cochains into homogeneous ones;
* ``regrade`` multiplies the (k, n) component by (-1)^{kn}, exchanging the
  differential (b + uB) + (-1)^n delta~ for (-1)^k (b + uB) + delta~;
* ``psi1`` collapses the group degree with the zig-zag through the homotopy h;
* ``psi2`` evaluates a Gamma-invariant cochain on chains of matrix entries
  E_{1,g_0}(a_0), g_0 . E_{1,g_1}(a_1), (g_0 g_1) . E_{1,g_2}(a_2), ...
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Sequence

from .compatible import CompatibleForm
from .cyclic import (
    CyclicCochain,
    GroupCochain,
    Unitized,
    homogeneous_delta,
    homotopy_h,
    psi0,
    total_differential,
)
from .exact import Scalar, ULaurent
from .gerbe import EndSection, GerbeScenario, LSection, convolve, end_action
from .groups import Element
from .jlo import EndAlgebra, group_degree_sign, jlo_cochain, twisted_source

__all__ = [
    "ConvolutionAlgebra",
    "NotInvariantError",
    "PipelineRecord",
    "ZigZag",
    "column_differential",
    "full_pipeline",
    "invariance_witness",
    "phi",
    "psi1",
    "psi2",
    "regrade",
]


class ConvolutionAlgebra:
    """C_c(T^m x| Gamma, L) with the mu-twisted convolution product."""

    def __init__(self, scenario: GerbeScenario) -> None:
        self.scenario = scenario

    def multiply(self, a: LSection, b: LSection) -> LSection:
        return convolve(self.scenario, a, b)

    def add(self, a: LSection, b: LSection) -> LSection:
        return a + b

    def scale(self, c: Scalar, a: LSection) -> LSection:
        return a.scale(c)

    def act(self, g: Element, a: LSection) -> LSection:
        raise NotImplementedError("the convolution algebra carries no Gamma-action here")

    def elementary_parts(self, a: LSection) -> list[tuple[Element, LSection]]:
        return [(g, LSection({g: f})) for g, f in a.components()]


def _homogeneous_degree(t: tuple) -> int:
    return len(t) - 1


def regrade(c: GroupCochain) -> GroupCochain:
    """Multiply the component of group degree k and cyclic degree n by (-1)^{kn}."""

    def ev(t: tuple[Element, ...]) -> CyclicCochain:
        k = _homogeneous_degree(t)
        value = c.evaluate(t)
        return value if k % 2 == 0 else value.degree_signed(lambda n: -1 if n % 2 else 1)

    return GroupCochain(c.group, c.algebra, ev, c.homogeneous)


def column_differential(f: GroupCochain) -> GroupCochain:
    """D = (-1)^k (b + uB) on the column of homogeneous group degree k."""

    def ev(t: tuple[Element, ...]) -> CyclicCochain:
        return total_differential(f.evaluate(t), -1 if _homogeneous_degree(t) % 2 else 1)

    return GroupCochain(f.group, f.algebra, ev, homogeneous=True)


def _minus_d_h(f: GroupCochain) -> GroupCochain:
    """-D h: lowers group degree by one, raises cyclic degree by one."""
    return -column_differential(homotopy_h(f))


@dataclass(frozen=True)
class ZigZag:
    """The zig-zag collapsing a homogeneous cochain of group degree k into degree 0.

    Psi_1^k(c) = (-Dh)^k c - h (-Dh)^{k-1} (D c) - h (-Dh)^k (delta~ c).
    """

    degree: int

    def iterate(self, f: GroupCochain, times: int) -> GroupCochain:
        for _ in range(times):
            f = _minus_d_h(f)
        return f

    def apply(self, c: GroupCochain) -> GroupCochain:
        k = self.degree
        out = self.iterate(c, k)
        if k >= 1:
            out = out - homotopy_h(self.iterate(column_differential(c), k - 1))
        out = out - homotopy_h(self.iterate(homogeneous_delta(c), k))
        return out


def psi1(c: GroupCochain, max_degree: int) -> GroupCochain:
    """sum_{k <= max_degree} Psi_1^k(c_k), a homogeneous cochain of group degree 0.

    Each summand only reads c on tuples of length k + 1, so passing the full
    cochain is the same as passing its degree-k component.
    """
    if not c.homogeneous:
        raise ValueError("psi1 expects a homogeneous group cochain")
    parts = [ZigZag(k).apply(c) for k in range(max_degree + 1)]

    def ev(t: tuple[Element, ...]) -> CyclicCochain:
        if len(t) != 1:
            raise ValueError("psi1 produces a cochain of group degree 0")
        total = parts[0].evaluate(t)
        for p in parts[1:]:
            total = total + p.evaluate(t)
        return total

    return GroupCochain(c.group, c.algebra, ev, homogeneous=True)


class NotInvariantError(ValueError):
    pass


def invariance_witness(
    c: CyclicCochain,
    scenario: GerbeScenario,
    probes: Iterable[tuple],
    generators: Iterable[Element] | None = None,
) -> tuple | None:
    """First (g, args) with c(g . args) != c(args), or None."""
    algebra = c.algebra
    gens = list(generators) if generators is not None else _generators(scenario)
    for args in probes:
        for g in gens:
            first = args[0]
            moved_first = Unitized(None if first.element is None else algebra.act(g, first.element), first.unit)
            moved = (moved_first,) + tuple(algebra.act(g, a) for a in args[1:])
            if c.evaluate(moved) != c.evaluate(tuple(args)):
                return (g, tuple(args))
    return None


def _generators(scenario: GerbeScenario) -> list[Element]:
    r = scenario.group.rank
    return [tuple(int(i == j) for i in range(r)) for j in range(r)]


def psi2(
    c: CyclicCochain,
    scenario: GerbeScenario,
    probes: Iterable[tuple] = (),
) -> CyclicCochain:
    """Psi_2(c)(a~_0, ..., a_n) = c(E_{1,g_0}(a_0), g_0 . E_{1,g_1}(a_1), ...) summed over supports.

    ``probes`` are End E argument tuples on which Gamma-invariance of c is
    checked first; a failure raises NotInvariantError with the witness.
    """
    witness = invariance_witness(c, scenario, probes)
    if witness is not None:
        raise NotInvariantError(f"cochain is not Gamma-invariant: g = {witness[0]} moves its value")
    grp = scenario.group
    one = grp.identity

    def ev(args: tuple) -> ULaurent:
        first: Unitized = args[0]
        heads: list[tuple[Element, Unitized]] = []
        if first.element is not None:
            for g0, f in first.element.components():
                heads.append((g0, Unitized(EndSection.elementary(one, g0, f), first.unit * 0)))
        if first.unit:
            heads.append((one, Unitized(None, first.unit)))
        tails = [list(a.components()) for a in args[1:]]
        total = ULaurent()
        for g0, head in heads:
            for combo in product(*tails):
                prefix = g0
                chain = [head]
                for g, f in combo:
                    chain.append(end_action(scenario, prefix, EndSection.elementary(one, g, f)))
                    prefix = grp.multiply(prefix, g)
                total = total + c.evaluate(tuple(chain))
        return total

    return CyclicCochain(ConvolutionAlgebra(scenario), ev, f"psi2({c.label})")


# ---------------------------------------------------------------------------------
# the composite


def phi(omega: CompatibleForm, max_degree: int, window: Iterable[Element] | None = None) -> CyclicCochain:
    """Psi_2 o Psi_1 o regrade o Psi_0 o tau applied to omega."""
    s = omega.scenario
    tau_omega = jlo_cochain(omega, window, group_degree_sign)
    collapsed = psi1(regrade(psi0(tau_omega)), max_degree)
    return psi2(collapsed(s.group.identity), s)


@dataclass(frozen=True)
class PipelineRecord:
    args: tuple
    left: ULaurent
    right: ULaurent

    @property
    def passed(self) -> bool:
        return self.left == self.right


def full_pipeline(
    omega: CompatibleForm,
    samples: Sequence[tuple],
    max_form_degree: int,
    window: Iterable[Element] | None = None,
) -> list[PipelineRecord]:
    """(b + uB) Phi(omega) against Phi(twisted differential of omega) on convolution-algebra samples.

    ``max_form_degree`` bounds the degree of omega; tau vanishes above group
    degree m + degree, which fixes how far Psi_1 has to sum.
    """
    m = omega.scenario.m
    window_list = list(window) if window is not None else None
    phi_omega = phi(omega, m + max_form_degree + 1, window_list)
    phi_source = phi(twisted_source(omega), m + max_form_degree + 2, window_list)
    boundary = total_differential(phi_omega)
    return [PipelineRecord(tuple(a), boundary.evaluate(tuple(a)), phi_source.evaluate(tuple(a))) for a in samples]
