"""The simplicial connections nabla^k, the 2-form vartheta and the 3-form Theta.

For a tuple (g_1, ..., g_k) with prefixes P_i = g_1...g_i, nabla^k is the
direct sum connection plus sum_i t_i A(P_i) on E pulled back to T^m x Delta^k.
All its correction terms are diagonal, so the curvature is diagonal and
vartheta is stored as a scalar form plus a lazily evaluated diagonal.

Forms are written with manifold generators to the left of simplex generators
and the exterior derivative is the honest one on T^m x Delta^k.  With that
convention the alpha-term of vartheta is

    (t_i dt_j - t_j dt_i) ^ alpha(P_i, g_{i+1}...g_j)
        = - alpha(P_i, g_{i+1}...g_j) ^ (t_i dt_j - t_j dt_i),

which is the sign making vartheta face compatible and Theta = nabla vartheta
closed.  The sign is exposed as ``ALPHA_TERM_SIGN``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .forms import Form, popcount
from .gerbe import EndSection, GerbeScenario, _add_entry
from .groups import Element

__all__ = [
    "ALPHA_TERM_SIGN",
    "DiagonalForm",
    "NablaK",
    "dd_class_via_integration",
    "dd_form",
    "dd_form_closed",
    "graded_commutator",
    "rescale_theta",
    "rescale_vartheta",
    "vartheta",
]

ALPHA_TERM_SIGN = -1


def parity_twist(f: Form) -> Form:
    """The form sum (-1)^|term| term."""
    return f.map_terms(lambda key, v: -v if popcount(key[3]) & 1 else v)


def graded_commutator(a: Form, b: Form) -> Form:
    """[a, b] = a b - (-1)^{|a||b|} b a, extended bilinearly over homogeneous parts."""
    a_odd = a.map_terms(lambda key, v: v if popcount(key[3]) & 1 else 0)
    a_even = a - a_odd
    return a.wedge(b) - b.wedge(a_even) - parity_twist(b).wedge(a_odd)


@dataclass(eq=False)
class DiagonalForm:
    """Scalar form plus a lazily evaluated diagonal of End E-valued forms."""

    scalar: Form
    entry_rule: Callable[[Element], Form]
    _cache: dict = dc_field(default_factory=dict, repr=False)
    _lock: threading.Lock = dc_field(default_factory=threading.Lock, repr=False)

    def entry(self, y: Element) -> Form:
        with self._lock:
            if y in self._cache:
                return self._cache[y]
        value = self.entry_rule(y)
        with self._lock:
            return self._cache.setdefault(y, value)

    def value(self, y: Element) -> Form:
        return self.scalar + self.entry(y)

    def map(self, fn: Callable[[Form], Form], scalar_too: bool = True) -> DiagonalForm:
        return DiagonalForm(fn(self.scalar) if scalar_too else self.scalar, lambda y: fn(self.entry(y)))

    def as_section(self, entries: Iterable[Element]) -> EndSection:
        return EndSection({(y, y): self.value(y) for y in entries})


class NablaK:
    """The connection nabla^k(g_1, ..., g_k) on T^m x Delta^k."""

    def __init__(self, scenario: GerbeScenario, elements: Sequence[Element]) -> None:
        self.scenario = scenario
        self.elements = tuple(elements)
        self.k = len(self.elements)
        grp = scenario.group
        self.prefixes = []
        acc = grp.identity
        for g in self.elements:
            acc = grp.multiply(acc, g)
            self.prefixes.append(acc)
        self._cache: dict[Element, Form] = {}
        self._lock = threading.Lock()

    def t(self, i: int) -> Form:
        s = self.scenario
        return Form.monomial(s.m, self.k, s.order, 1, t_exponents=[int(j == i - 1) for j in range(self.k)])

    def dt(self, i: int) -> Form:
        s = self.scenario
        return Form.monomial(s.m, self.k, s.order, 1, dt=[i])

    def connection_entry(self, y: Element) -> Form:
        """omega_y + sum_i t_i A(P_i)_y as a 1-form on T^m x Delta^k."""
        with self._lock:
            if y in self._cache:
                return self._cache[y]
        s = self.scenario
        out = s.omega(y).extend_level(self.k)
        for i, p in enumerate(self.prefixes, start=1):
            out = out + self.t(i).wedge(s.discrepancy_A(p, y).extend_level(self.k))
        with self._lock:
            return self._cache.setdefault(y, out)

    def lift(self, f: Form) -> Form:
        return f if f.k == self.k else f.extend_level(self.k)

    def apply(self, eta: EndSection, u_scaled: bool = False) -> EndSection:
        """nabla^k eta, or the rescaled (nabla^k)^{1,0} + u^-1 d_Delta when ``u_scaled``."""
        out: dict = {}
        for (x, y), f in eta.entries.items():
            f = self.lift(f)
            simplex_part = f.d_simplex()
            if u_scaled:
                simplex_part = simplex_part.shift_u(-1)
            value = (
                f.d_manifold()
                + simplex_part
                + self.connection_entry(x).wedge(f)
                - parity_twist(f).wedge(self.connection_entry(y))
            )
            _add_entry(out, (x, y), value)
        return EndSection(out)

    def apply_twice(self, eta: EndSection) -> EndSection:
        return self.apply(self.apply(eta))

    def curvature_entry(self, y: Element) -> Form:
        # the connection is diagonal with 1-form entries, so Omega ^ Omega = 0
        return self.connection_entry(y).d()

    def scalar_correction(self) -> Form:
        """-sum t_i theta_{P_i} + ALPHA_TERM_SIGN * sum alpha(P_i, Q_ij) (t_i dt_j - t_j dt_i)."""
        s = self.scenario
        grp = s.group
        out = Form.zero(s.m, self.k, s.order)
        for i, p in enumerate(self.prefixes, start=1):
            out = out - self.t(i).wedge(s.theta(p).extend_level(self.k))
        for i in range(1, self.k + 1):
            for j in range(i + 1, self.k + 1):
                q = grp.product(self.elements[i:j])
                beta = self.t(i).wedge(self.dt(j)) - self.t(j).wedge(self.dt(i))
                a = s.alpha(self.prefixes[i - 1], q).extend_level(self.k)
                out = out + a.wedge(beta).scale(ALPHA_TERM_SIGN)
        return out


def vartheta(scenario: GerbeScenario, elements: Sequence[Element]) -> DiagonalForm:
    nabla = NablaK(scenario, elements)
    return DiagonalForm(nabla.scalar_correction(), nabla.curvature_entry)


def rescale_vartheta(theta: DiagonalForm) -> DiagonalForm:
    """u vartheta^{2,0} + vartheta^{1,1}; vartheta^{0,2} must vanish."""

    def rescale(f: Form) -> Form:
        if f.component(manifold_degree=0, simplex_degree=2):
            raise ValueError("vartheta has a (0,2) component")
        return f.component(2, 0).shift_u(1) + f.component(1, 1)

    return theta.map(rescale)


def dd_form_closed(scenario: GerbeScenario, elements: Sequence[Element]) -> Form:
    """Theta_(k) by its closed formula.

    -sum dt_i theta_{P_i} + ALPHA_TERM_SIGN * sum [dalpha ^ beta_ij - 2 alpha ^ dt_i dt_j]
    with beta_ij = t_i dt_j - t_j dt_i.
    """
    nabla = NablaK(scenario, elements)
    s, grp, k = scenario, scenario.group, nabla.k
    out = Form.zero(s.m, k, s.order)
    for i, p in enumerate(nabla.prefixes, start=1):
        out = out - nabla.dt(i).wedge(s.theta(p).extend_level(k))
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            q = grp.product(nabla.elements[i:j])
            a = s.alpha(nabla.prefixes[i - 1], q).extend_level(k)
            beta = nabla.t(i).wedge(nabla.dt(j)) - nabla.t(j).wedge(nabla.dt(i))
            term = a.d().wedge(beta) - a.wedge(nabla.dt(i).wedge(nabla.dt(j))).scale(2)
            out = out + term.scale(ALPHA_TERM_SIGN)
    return out


def dd_form_from_nabla(scenario: GerbeScenario, elements: Sequence[Element], entry: Element) -> Form:
    """The (entry, entry) component of nabla^k vartheta computed from the definitions."""
    nabla = NablaK(scenario, elements)
    value = vartheta(scenario, elements).value(entry)
    image = nabla.apply(EndSection.elementary(entry, entry, value))
    return image.entries.get((entry, entry), Form.zero(scenario.m, nabla.k, scenario.order))


class DDConsistencyError(AssertionError):
    pass


def dd_form(scenario: GerbeScenario, elements: Sequence[Element], entries: Iterable[Element] | None = None) -> Form:
    """Theta_(k) by the closed formula, cross-checked against nabla^k vartheta."""
    closed = dd_form_closed(scenario, elements)
    if closed.component(manifold_degree=0, simplex_degree=3):
        raise DDConsistencyError("Theta has a (0,3) component")
    probe = list(entries) if entries is not None else [scenario.group.identity, *elements]
    for y in probe:
        direct = dd_form_from_nabla(scenario, elements, y)
        if direct != closed:
            raise DDConsistencyError(f"closed Theta differs from nabla vartheta at entry {y} for {tuple(elements)}")
    return closed


def rescale_theta(theta: Form) -> Form:
    """u^2 Theta^{3,0} + u Theta^{2,1} + Theta^{1,2}."""
    return theta.component(3, 0).shift_u(2) + theta.component(2, 1).shift_u(1) + theta.component(1, 2)


def dd_class_via_integration(scenario: GerbeScenario, elements: Sequence[Element]) -> Form:
    """I_Delta(Theta_(k)): integrate the simplex factor of the level-k form."""
    return dd_form_closed(scenario, elements).integrate_simplex()
