"""Compatible forms on the nerve of T^m x| Gamma and the twisted differentials on them.

A compatible form is an evaluator: a tuple (g_1, ..., g_k) goes to a form on
T^m x Delta^k, and the faces of Delta^k must match the nerve faces,

    omega_(k)(g)|_{t_i = 0}     = omega_(k-1)(.., g_i g_{i+1}, ..)   (0 < i < k)
    omega_(k)(g)|_{t_k = 0}     = omega_(k-1)(g_1, .., g_{k-1})
    omega_(k)(g)|_{sum t = 1}   = omega_(k-1)(g_2, .., g_k)^{g_1}.

Whitney forms turn any family of manifold forms indexed by nerve simplices into
a compatible form, which gives a large supply of test inputs.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from itertools import combinations
from math import factorial
from typing import Callable, Iterable, Sequence

from .forms import Form, popcount
from .gerbe import GerbeScenario
from .groups import Element

__all__ = [
    "CompatibilityReport",
    "CompatibleForm",
    "check_compatibility",
    "honest_u_differential",
    "literal_bicomplex_differential",
    "literal_twisted_differential",
    "nerve_face",
    "whitney_form",
]

GroupTuple = tuple[Element, ...]


def nerve_face(scenario: GerbeScenario, elements: GroupTuple, i: int) -> GroupTuple:
    """The i-th face of a nerve simplex (the point moves only for i = 0)."""
    k = len(elements)
    if not 0 <= i <= k or k == 0:
        raise IndexError(f"face {i} of a {k}-simplex")
    if i == 0:
        return elements[1:]
    if i == k:
        return elements[:-1]
    merged = scenario.group.multiply(elements[i - 1], elements[i])
    return elements[: i - 1] + (merged,) + elements[i + 1 :]


class CompatibleForm:
    """Memoized evaluator GroupTuple -> Form at level len(tuple)."""

    def __init__(self, scenario: GerbeScenario, rule: Callable[[GroupTuple], Form], name: str = "omega") -> None:
        self.scenario = scenario
        self.rule = rule
        self.name = name
        self._cache: dict[GroupTuple, Form] = {}
        self._lock = threading.Lock()

    def at(self, elements: Sequence[Element]) -> Form:
        key = tuple(elements)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = self.rule(key)
        s = self.scenario
        if (value.m, value.k, value.order) != (s.m, len(key), s.order):
            raise ValueError(f"{self.name} at {key} has the wrong shape")
        with self._lock:
            return self._cache.setdefault(key, value)

    __call__ = at

    def map(self, fn: Callable[[Form, GroupTuple], Form], name: str | None = None) -> CompatibleForm:
        return CompatibleForm(self.scenario, lambda t: fn(self.at(t), t), name or self.name)

    def __add__(self, other: CompatibleForm) -> CompatibleForm:
        return CompatibleForm(self.scenario, lambda t: self.at(t) + other.at(t), f"({self.name}+{other.name})")

    def __sub__(self, other: CompatibleForm) -> CompatibleForm:
        return CompatibleForm(self.scenario, lambda t: self.at(t) - other.at(t), f"({self.name}-{other.name})")

    def scale(self, c: object) -> CompatibleForm:
        return CompatibleForm(self.scenario, lambda t: self.at(t).scale(c), self.name)

    def wedge(self, other: CompatibleForm) -> CompatibleForm:
        return CompatibleForm(self.scenario, lambda t: self.at(t).wedge(other.at(t)), f"{self.name}^{other.name}")

    def integrate_simplex(self, elements: Sequence[Element]) -> Form:
        """I_Delta at one tuple: the manifold form obtained by integrating over Delta^k."""
        return self.at(elements).integrate_simplex()

    @classmethod
    def constant(cls, scenario: GerbeScenario, value: Form) -> CompatibleForm:
        """The form equal to ``value`` (a level-0 form) at every level."""
        return cls(scenario, lambda t: value.extend_level(len(t)), "constant")

    @classmethod
    def from_simplices(
        cls,
        scenario: GerbeScenario,
        cochain: Callable[[GroupTuple], Form],
        max_dimension: int,
        name: str = "whitney",
    ) -> CompatibleForm:
        """sum over vertex subsets I of cochain(sub-simplex I)^{g_1...g_{i_0}} ^ W_I.

        ``cochain`` maps a tuple of length p <= max_dimension to a level-0 form.
        """

        def rule(t: GroupTuple) -> Form:
            s, grp, k = scenario, scenario.group, len(t)
            prefixes = [grp.identity]
            for g in t:
                prefixes.append(grp.multiply(prefixes[-1], g))
            out = Form.zero(s.m, k, s.order)
            for p in range(0, min(k, max_dimension) + 1):
                for vertices in combinations(range(k + 1), p + 1):
                    sub = tuple(
                        grp.multiply(grp.inverse(prefixes[a]), prefixes[b]) for a, b in zip(vertices, vertices[1:])
                    )
                    value = cochain(sub)
                    if not value:
                        continue
                    moved = scenario.act(prefixes[vertices[0]], value)
                    out = out + moved.extend_level(k).wedge(whitney_form(s.m, k, s.order, vertices))
            return out

        return cls(scenario, rule, name)


def _barycentric(m: int, k: int, order: int, j: int) -> Form:
    if j == 0:
        out = Form.constant(1, m, k, order)
        for i in range(1, k + 1):
            out = out - Form.monomial(m, k, order, 1, t_exponents=[int(a == i - 1) for a in range(k)])
        return out
    return Form.monomial(m, k, order, 1, t_exponents=[int(a == j - 1) for a in range(k)])


def whitney_form(m: int, k: int, order: int, vertices: Sequence[int]) -> Form:
    """p! sum_j (-1)^j lambda_{i_j} dlambda_{i_0} ... (omit i_j) ... dlambda_{i_p}."""
    lam = [_barycentric(m, k, order, j) for j in range(k + 1)]
    dlam = [x.d_simplex() for x in lam]
    p = len(vertices) - 1
    out = Form.zero(m, k, order)
    for j, vj in enumerate(vertices):
        term = lam[vj]
        for i, vi in enumerate(vertices):
            if i != j:
                term = term.wedge(dlam[vi])
        out = out + term if j % 2 == 0 else out - term
    return out.scale(factorial(p))


@dataclass(frozen=True)
class CompatibilityReport:
    passed: bool
    checked: int
    witness: tuple[int, int, GroupTuple] | None = None  # (level, face, tuple)

    def describe(self) -> str:
        if self.passed:
            return f"compatible on {self.checked} faces"
        level, face, t = self.witness  # type: ignore[misc]
        return f"face {face} of level {level} at {t} does not match"


def check_compatibility(form: CompatibleForm, samples: Iterable[Sequence[Element]]) -> CompatibilityReport:
    """Check every face of every sampled tuple; stop at the first mismatch."""
    s = form.scenario
    checked = 0
    for t in samples:
        t = tuple(t)
        k = len(t)
        if k == 0:
            continue
        full = form.at(t)
        for i in range(k + 1):
            lower = form.at(nerve_face(s, t, i))
            if i == 0:
                lower = s.act(t[0], lower)
            checked += 1
            if full.simplex_face(i) != lower:
                return CompatibilityReport(False, checked, (k, i, t))
    return CompatibilityReport(True, checked)


# ---------------------------------------------------------------------------------
# differentials on a single level


def honest_u_differential(f: Form) -> Form:
    """u d_M + d_Delta with the honest exterior derivative of T^m x Delta^k."""
    return f.d_manifold().shift_u(1) + f.d_simplex()


def _sign_by_mask(f: Form, sign: Callable[[int, int], int]) -> Form:
    """Multiply each term by sign(manifold_degree, simplex_degree)."""
    m = f.m
    low = (1 << m) - 1

    def fn(key, v):
        mask = key[3]
        return v if sign(popcount(mask & low), popcount(mask >> m)) > 0 else -v

    return f.map_terms(fn)


def literal_bicomplex_differential(f: Form) -> Form:
    """d_M + d_Delta with d_Delta = (-1)^s (id (x) d) read in tensor notation.

    Here id (x) d differentiates the simplex factor without a Koszul sign, so on
    (function) dx_S (x) dt_T it differs from the honest d_t by (-1)^{|S|}.
    """
    simplex = _sign_by_mask(f, lambda r, s: -1 if (r + s) % 2 else 1).d_simplex()
    return f.d_manifold() + simplex


def literal_twisted_differential(f: Form, theta_u: Form | None = None) -> Form:
    """(-1)^{r+s} u d (x) id + id (x) d - Theta_u ^ . with r the rescaled degree m - |S|."""
    m = f.m
    manifold = _sign_by_mask(f, lambda r, s: -1 if (m - r + s) % 2 else 1).d_manifold().shift_u(1)
    simplex = _sign_by_mask(f, lambda r, s: -1 if r % 2 else 1).d_simplex()
    out = manifold + simplex
    if theta_u is not None:
        out = out - theta_u.wedge(f)
    return out
