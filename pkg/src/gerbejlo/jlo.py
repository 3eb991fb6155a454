"""The JLO-type cochain tau built from vartheta_u and nabla_u.

For a tuple (g_1, ..., g_k), arguments (a~_0, a_1, ..., a_n) and a compatible
form omega,

    tau(omega)(g)(a~_0, ..., a_n)
        = int_M int_{Delta^k} omega_(k) ^ int_{Delta^n} tr(a~_0 e^{-s_0 vt} nabla_u a_1 ... e^{-s_n vt}) ds

with vt the rescaled curvature.  Every entry of vt has form degree 2, so the
exponentials are finite sums and the sigma-integral reduces to

    sum_p (-1)^{|p|} / (n + |p|)! tr(a~_0 vt^{p_0} nabla_u a_1 vt^{p_1} ... vt^{p_n}).

``jlo_integrand`` evaluates that sum with one pass over the diagonal of vt;
``jlo_integrand_by_sigma`` expands the exponentials as polynomials in the
barycentric coordinates and integrates them with a pluggable integrator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Mapping, Sequence

from .compatible import CompatibleForm
from .cyclic import CyclicCochain, GroupCochain, Unitized
from .dixmier_douady import DiagonalForm, NablaK, rescale_vartheta, vartheta
from .exact import Scalar, ULaurent
from .forms import Form
from .gerbe import EndSection, GerbeScenario, end_action, end_product, end_trace
from .groups import Element

__all__ = [
    "EndAlgebra",
    "JLOContext",
    "SigmaPolynomial",
    "exp_nilpotent",
    "integrate_sigma",
    "jlo_cochain",
    "jlo_integrand",
    "jlo_integrand_by_sigma",
    "quillen_identity_holds",
    "sigma_monomial_integral",
    "tau",
]

GroupTuple = tuple[Element, ...]


class EndAlgebra:
    """C_c(T^m, End E): finitely supported matrices of functions, with the twisted Gamma-action."""

    def __init__(self, scenario: GerbeScenario) -> None:
        self.scenario = scenario

    def multiply(self, a: EndSection, b: EndSection) -> EndSection:
        return end_product(a, b)

    def add(self, a: EndSection, b: EndSection) -> EndSection:
        return a + b

    def scale(self, c: Scalar, a: EndSection) -> EndSection:
        return a.scale(c)

    def act(self, g: Element, a: EndSection) -> EndSection:
        return end_action(self.scenario, g, a)

    def elementary_parts(self, a: EndSection) -> list[tuple[Element, EndSection]]:
        return [(xy[0], EndSection.elementary(xy[0], xy[1], f)) for xy, f in a.components()]


# ---------------------------------------------------------------------------------
# context shared by the evaluations at one tuple


class JLOContext:
    """vt = vartheta_u and nabla_u at a fixed tuple, with powers of vt cached per entry.

    The connection is the one of the bundle whose endomorphisms the matrices
    E_{x,y} are, namely the direct sum of the dual lines (see GerbeScenario.dual).
    """

    def __init__(self, scenario: GerbeScenario, elements: Sequence[Element]) -> None:
        self.scenario = scenario
        self.elements = tuple(elements)
        self.k = len(self.elements)
        bundle = scenario.dual()
        self.nabla = NablaK(bundle, self.elements)
        self.curvature: DiagonalForm = rescale_vartheta(vartheta(bundle, self.elements))
        self._powers: dict[tuple[Element, int], Form] = {}

    def power(self, y: Element, p: int) -> Form:
        key = (y, p)
        if key not in self._powers:
            s = self.scenario
            if p == 0:
                value = Form.constant(1, s.m, self.k, s.order)
            else:
                value = self.power(y, p - 1).wedge(self.curvature.value(y))
            self._powers[key] = value
        return self._powers[key]

    def lift(self, a: EndSection) -> EndSection:
        return a.map(lambda f: f if f.k == self.k else f.extend_level(self.k))

    def covariant(self, a: EndSection) -> EndSection:
        return self.nabla.apply(self.lift(a), u_scaled=True)

    def right_power(self, e: EndSection, p: int) -> EndSection:
        return EndSection({(x, y): f.wedge(self.power(y, p)) for (x, y), f in e.entries.items()}) if p else e

    def left_power(self, e: EndSection, p: int) -> EndSection:
        return EndSection({(x, y): self.power(x, p).wedge(f) for (x, y), f in e.entries.items()}) if p else e

    def degree_cap(self, n: int) -> int:
        """Largest total power of vt that can survive: 2 |p| + n <= m + k."""
        return (self.scenario.m + self.k - n) // 2


def _trace_window(scenario: GerbeScenario, window: Iterable[Element] | None) -> list[Element]:
    if window is not None:
        return list(window)
    if scenario.group.is_finite:
        return list(scenario.group.elements())
    raise ValueError("the trace of the bare unit needs a finite window on an infinite group")


def jlo_integrand(
    ctx: JLOContext,
    args: Sequence[object],
    window: Iterable[Element] | None = None,
) -> Form:
    """sum_p (-1)^{|p|}/(n+|p|)! tr(a~_0 vt^{p_0} nabla_u a_1 ... vt^{p_n}) at level k."""
    s = ctx.scenario
    first: Unitized = args[0]  # type: ignore[assignment]
    rest = [ctx.covariant(a) for a in args[1:]]  # type: ignore[arg-type]
    n = len(rest)
    cap = ctx.degree_cap(n)
    zero = Form.zero(s.m, ctx.k, s.order)
    if cap < 0:
        return zero
    total = zero
    if n == 0:
        for q in range(cap + 1):
            level_sum = zero
            if first.element is not None:
                tr = end_trace(ctx.right_power(ctx.lift(first.element), q))
                if tr is not None:
                    level_sum = level_sum + tr
            if first.unit:
                for y in _trace_window(s, window):
                    level_sum = level_sum + ctx.power(y, q).scale(first.unit)
            total = total + level_sum.scale(Fraction((-1) ** q, factorial(q)))
        return total
    # partial[q]: sums over compositions with total power q of a~_0 vt^{p_0} b_1 ... b_j
    partial: list[EndSection] = []
    for q in range(cap + 1):
        value = EndSection({})
        if first.element is not None:
            value = value + end_product(ctx.right_power(ctx.lift(first.element), q), rest[0])
        if first.unit:
            value = value + ctx.left_power(rest[0], q).scale(first.unit)
        partial.append(value)
    for b in rest[1:] + [None]:
        advanced = []
        for q in range(cap + 1):
            acc = EndSection({})
            for r in range(q + 1):
                if partial[q - r]:
                    acc = acc + ctx.right_power(partial[q - r], r)
            advanced.append(acc if b is None else end_product(acc, b))
        partial = advanced
    for q in range(cap + 1):
        tr = end_trace(partial[q])
        if tr is not None:
            total = total + tr.scale(Fraction((-1) ** q, factorial(n + q)))
    return total


def tau(
    omega: Form,
    ctx: JLOContext,
    args: Sequence[object],
    window: Iterable[Element] | None = None,
) -> ULaurent:
    """int_M int_{Delta^k} omega ^ (JLO integrand) for one level-k form omega."""
    if omega.k != ctx.k:
        raise ValueError("omega lives at a different level than the tuple")
    if not omega:
        return ULaurent()
    return omega.wedge(jlo_integrand(ctx, args, window)).integrate()


# ---------------------------------------------------------------------------------
# polynomials in the barycentric coordinates sigma_0, ..., sigma_n


@dataclass(frozen=True)
class SigmaPolynomial:
    """sum over exponent vectors (a_0..a_n) of sigma^a times a coefficient."""

    n: int
    terms: Mapping[tuple[int, ...], object]

    @classmethod
    def constant(cls, n: int, value: object) -> SigmaPolynomial:
        return cls(n, {(0,) * (n + 1): value})

    def multiply(self, other: SigmaPolynomial, product: Callable[[object, object], object]) -> SigmaPolynomial:
        out: dict[tuple[int, ...], object] = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                key = tuple(i + j for i, j in zip(a, b))
                value = product(x, y)
                out[key] = out[key] + value if key in out else value  # type: ignore[operator]
        return SigmaPolynomial(self.n, out)

    def map(self, fn: Callable[[object], object]) -> SigmaPolynomial:
        return SigmaPolynomial(self.n, {a: fn(x) for a, x in self.terms.items()})


def exp_nilpotent(
    x: object,
    index: int,
    n: int,
    power: Callable[[object, int], object],
    is_zero: Callable[[object], bool],
    scale: Callable[[object, Fraction], object],
    max_power: int = 64,
) -> SigmaPolynomial:
    """e^{-sigma_index x} = sum_p (-sigma_index)^p x^p / p!, stopping when x^p vanishes."""
    terms: dict[tuple[int, ...], object] = {}
    for p in range(max_power + 1):
        xp = power(x, p)
        if p and is_zero(xp):
            break
        exps = tuple(p if i == index else 0 for i in range(n + 1))
        terms[exps] = scale(xp, Fraction((-1) ** p, factorial(p)))
    else:
        raise ValueError("argument of the exponential is not nilpotent")
    return SigmaPolynomial(n, terms)


def exp_nilpotent_form(x: Form, index: int = 0, n: int = 0) -> SigmaPolynomial:
    """exp_nilpotent for a scalar form; a degree-zero component makes it non-nilpotent."""
    if any(not key[3] for key in x.terms):
        raise ValueError("argument of the exponential has a degree-zero part")
    return exp_nilpotent(x, index, n, lambda f, p: f.power(p), lambda f: not f, lambda f, c: f.scale(c))


def sigma_monomial_integral(exponents: tuple[int, ...]) -> Fraction:
    """int over Delta^n of sigma_0^a_0 ... sigma_n^a_n, i.e. prod a_i! / (n + sum a)!."""
    num = 1
    for a in exponents:
        num *= factorial(a)
    return Fraction(num, factorial(len(exponents) - 1 + sum(exponents)))


def integrate_sigma(
    poly: SigmaPolynomial,
    integrator: Callable[[tuple[int, ...]], Fraction] | None = None,
) -> object:
    """int over Delta^n of the polynomial, with sigma_0 = 1 - sigma_1 - ... - sigma_n.

    The default integrator is the monomial rule prod a_i! / (n + sum a)!.
    """
    rule = integrator or sigma_monomial_integral
    total = None
    for exps, value in poly.terms.items():
        piece = value.scale(rule(exps))  # type: ignore[attr-defined]
        total = piece if total is None else total + piece
    return total


def jlo_integrand_by_sigma(
    ctx: JLOContext,
    args: Sequence[object],
    integrator: Callable[[tuple[int, ...]], Fraction] | None = None,
    window: Iterable[Element] | None = None,
) -> Form:
    """The JLO integrand via explicit exponentials in the sigma-variables.

    vt is realized as a finite diagonal over every index the arguments touch.
    """
    s = ctx.scenario
    first: Unitized = args[0]  # type: ignore[assignment]
    rest = [ctx.covariant(a) for a in args[1:]]  # type: ignore[arg-type]
    n = len(rest)
    indices: set[Element] = set()
    pieces = list(rest) + ([ctx.lift(first.element)] if first.element is not None else [])
    for e in pieces:
        indices |= e.rows() | e.columns()
    if first.unit and n == 0:
        indices |= set(_trace_window(s, window))
    diagonal = EndSection({(y, y): ctx.curvature.value(y) for y in indices})
    unit = EndSection({(y, y): Form.constant(1, s.m, ctx.k, s.order) for y in indices})

    def power(e: EndSection, p: int) -> EndSection:
        out = unit
        for _ in range(p):
            out = end_product(out, e)
        return out

    def exp_at(i: int) -> SigmaPolynomial:
        return exp_nilpotent(diagonal, i, n, power, lambda e: not e, lambda e, c: e.scale(c))

    head = EndSection({})
    if first.element is not None:
        head = head + ctx.lift(first.element)
    if first.unit:
        head = head + unit.scale(first.unit)
    poly = SigmaPolynomial.constant(n, head).multiply(exp_at(0), end_product)
    for i, b in enumerate(rest, start=1):
        poly = poly.multiply(SigmaPolynomial.constant(n, b), end_product).multiply(exp_at(i), end_product)
    traced = poly.map(lambda e: end_trace(e) or Form.zero(s.m, ctx.k, s.order))
    value = integrate_sigma(traced, integrator)
    return value if value is not None else Form.zero(s.m, ctx.k, s.order)


def quillen_identity_holds(
    x: EndSection,
    a: EndSection,
    integrator: Callable[[tuple[int, ...]], Fraction] | None = None,
) -> bool:
    """[a, e^{-s x}] = s int_0^1 e^{-(1-r) s x} [x, a] e^{-r s x} dr for an even nilpotent x.

    Both sides are compared coefficientwise in s, the left from powers of x and
    the right from a two-variable sigma-polynomial integrated over Delta^1.
    """
    def power(e: EndSection, p: int) -> EndSection:
        out = None
        for _ in range(p):
            out = e if out is None else end_product(out, e)
        return out if out is not None else _identity_like(e, a)

    p_max = 0
    while power(x, p_max + 1):
        p_max += 1
        if p_max > 64:
            raise ValueError("x is not nilpotent")
    commutator = end_product(x, a) - end_product(a, x)
    for p in range(1, p_max + 2):
        xp = power(x, p)
        left = (end_product(a, xp) - end_product(xp, a)).scale(Fraction((-1) ** p, factorial(p)))
        # coefficient of s^p on the right: terms with i + j = p - 1
        right_poly: dict[tuple[int, int], EndSection] = {}
        for i in range(p):
            j = p - 1 - i
            sandwich = end_product(end_product(power(x, i), commutator), power(x, j))
            coeff = Fraction((-1) ** (i + j), factorial(i) * factorial(j))
            right_poly[(i, j)] = sandwich.scale(coeff)
        right = integrate_sigma(SigmaPolynomial(1, right_poly), integrator)
        if left != (right if right is not None else EndSection({})):
            return False
    return True


def _identity_like(x: EndSection, a: EndSection) -> EndSection:
    sample = next(iter(x.entries.values()), None) or next(iter(a.entries.values()))
    idx = x.rows() | x.columns() | a.rows() | a.columns()
    return EndSection({(y, y): Form.constant(1, sample.m, sample.k, sample.order) for y in idx})


# ---------------------------------------------------------------------------------
# tau as a group cochain


def jlo_cochain(
    omega: CompatibleForm,
    window: Iterable[Element] | None = None,
    sign: Callable[[int], int] | None = None,
) -> GroupCochain:
    """tau(omega) as an inhomogeneous group cochain; ``sign(k)`` rescales group degree k."""
    s = omega.scenario
    algebra = EndAlgebra(s)
    contexts: dict[GroupTuple, JLOContext] = {}
    window_list = list(window) if window is not None else None

    def at(t: GroupTuple) -> CyclicCochain:
        if t not in contexts:
            contexts[t] = JLOContext(s, t)
        ctx = contexts[t]
        form = omega.at(t)
        factor = sign(len(t)) if sign else 1
        cache: dict[tuple, ULaurent] = {}

        def evaluate(args: tuple) -> ULaurent:
            if args not in cache:
                value = tau(form, ctx, args, window_list)
                cache[args] = value if factor > 0 else -value
            return cache[args]

        return CyclicCochain(algebra, evaluate, f"tau({omega.name})")

    return GroupCochain(s.group, algebra, at)


# ---------------------------------------------------------------------------------
# the chain-map identity


def group_degree_sign(k: int) -> int:
    """Normalization (-1)^{k(k+1)/2} of tau on group degree k."""
    return -1 if (k * (k + 1) // 2) % 2 else 1


def bundle_dd_form(scenario: GerbeScenario) -> CompatibleForm:
    """Theta_u of the bundle carrying End E (the dual gerbe), as a compatible form."""
    from .dixmier_douady import dd_form_closed, rescale_theta

    bundle = scenario.dual()
    return CompatibleForm(scenario, lambda t: rescale_theta(dd_form_closed(bundle, t)), "Theta_u")


def _parity_sign(f: Form) -> Form:
    from .forms import popcount

    return f.map_terms(lambda key, v: -v if popcount(key[3]) & 1 else v)


def twisted_source(omega: CompatibleForm, theta_u: CompatibleForm | None = None) -> CompatibleForm:
    """The twisted differential applied to omega, in the convention under which tau is a chain map.

    Levelwise it is (-1)^{l+1} (u d_M + d_Delta - Theta_u ^ .) on forms of honest
    degree l, i.e. the parity sign of the output applied after the honest operator.
    """
    theta = theta_u if theta_u is not None else bundle_dd_form(omega.scenario)

    def rule(t: GroupTuple) -> Form:
        f = omega.at(t)
        honest = f.d_manifold().shift_u(1) + f.d_simplex() - theta.at(t).wedge(f)
        return _parity_sign(honest)

    return CompatibleForm(omega.scenario, rule, f"D({omega.name})")


SIGN_CONVENTIONS = {"theorem": 1, "proof": -1}


@dataclass(frozen=True)
class ChainSample:
    elements: GroupTuple
    args: tuple

    @property
    def k(self) -> int:
        return len(self.elements)

    @property
    def n(self) -> int:
        return len(self.args) - 1


@dataclass(frozen=True)
class ChainRecord:
    sample: ChainSample
    left: ULaurent
    right: ULaurent

    @property
    def passed(self) -> bool:
        return self.left == self.right


def chain_check(
    omega: CompatibleForm,
    samples: Iterable[ChainSample],
    convention: str = "theorem",
    window: Iterable[Element] | None = None,
) -> list[ChainRecord]:
    """Both sides of tau(D omega) = (kappa (b + uB) + delta') tau(omega) per sample.

    kappa is +1 for the "theorem" convention and -1 for the "proof" convention;
    delta' = (-1)^n delta_Gamma.
    """
    from .cyclic import signed_group_delta, total_differential

    if convention not in SIGN_CONVENTIONS:
        raise ValueError(f"unknown sign convention {convention!r}")
    kappa = SIGN_CONVENTIONS[convention]
    window_list = list(window) if window is not None else None
    tau_omega = jlo_cochain(omega, window_list, group_degree_sign)
    tau_source = jlo_cochain(twisted_source(omega), window_list, group_degree_sign)
    delta = signed_group_delta(tau_omega)
    records = []
    for sample in samples:
        t, args = sample.elements, sample.args
        left = tau_source(*t)(*args)
        right = total_differential(tau_omega(*t), kappa)(*args)
        if t:
            right = right + delta(*t)(*args)
        records.append(ChainRecord(sample, left, right))
    return records
