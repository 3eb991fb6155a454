from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy

from gerbejlo.checks import Plan, jlo_chain_checks
from gerbejlo.compatible import CompatibleForm, literal_twisted_differential
from gerbejlo.cyclic import Unitized, signed_group_delta, total_differential
from gerbejlo.exact import ULaurent, field
from gerbejlo.forms import Form
from gerbejlo.gerbe import EndSection
from gerbejlo.jlo import (
    JLOContext,
    SIGN_CONVENTIONS,
    SigmaPolynomial,
    bundle_dd_form,
    exp_nilpotent_form,
    group_degree_sign,
    integrate_sigma,
    jlo_cochain,
    jlo_integrand,
    jlo_integrand_by_sigma,
    quillen_identity_holds,
    tau,
)
from gerbejlo.sampling import chain_samples, random_form, random_whitney_form, trace_closing_arguments

POOL4 = [(g,) for g in range(4)]


def sympy_simplex_integrator(exps: tuple[int, ...]) -> Fraction:
    """Iterated integral of sigma_0^a_0 ... sigma_n^a_n over the standard n-simplex."""
    n = len(exps) - 1
    s = sympy.symbols(f"s1:{n + 1}") if n else ()
    expr = (1 - sum(s)) ** exps[0]
    for var, a in zip(s, exps[1:]):
        expr = expr * var**a
    bounds = []
    for i in reversed(range(n)):
        bounds.append((s[i], 0, 1 - sum(s[:i])))
    value = sympy.integrate(expr, *bounds) if bounds else sympy.Integer(1)
    return Fraction(int(value.p), int(value.q))


def test_sigma_integral_examples() -> None:
    one = Form.constant(1, 0)
    assert integrate_sigma(SigmaPolynomial.constant(0, one)) == one
    assert integrate_sigma(SigmaPolynomial(2, {(1, 1, 1): one})) == one.scale(Fraction(1, 120))
    assert integrate_sigma(SigmaPolynomial.constant(2, one)) == one.scale(Fraction(1, 2))


@pytest.mark.parametrize("exps", [(0,), (1, 0), (2, 1), (1, 1, 1), (0, 3, 1), (2, 0, 1, 1)])
def test_monomial_rule_matches_sympy(exps) -> None:
    one = Form.constant(1, 0)
    poly = SigmaPolynomial(len(exps) - 1, {exps: one})
    assert integrate_sigma(poly) == integrate_sigma(poly, sympy_simplex_integrator)


def test_exponential_of_zero_is_one_and_degree_zero_is_rejected() -> None:
    zero = Form.monomial(2, 0, 4, 0, dx=[1, 2])
    assert integrate_sigma(exp_nilpotent_form(zero)) == Form.constant(1, 2)
    two_form = Form.monomial(2, 0, 4, 3, dx=[1, 2])
    assert integrate_sigma(exp_nilpotent_form(two_form, 0, 1)) == Form.constant(1, 2) - two_form.scale(Fraction(1, 2))
    with pytest.raises(ValueError):
        exp_nilpotent_form(Form.constant(1, 2))


def test_quillen_identity(s2) -> None:
    rng = random.Random(3)
    for _ in range(6):
        x = EndSection({(y, y): random_form(rng, s2, degree=2) for y in rng.sample(POOL4, 2)})
        a = EndSection({(rng.choice(POOL4), rng.choice(POOL4)): random_form(rng, s2, degree=rng.randint(0, 1)) for _ in range(3)})
        assert quillen_identity_holds(x, a)
        assert quillen_identity_holds(x, a, sympy_simplex_integrator)


def test_quillen_identity_detects_a_wrong_integrator(s2) -> None:
    x = EndSection({((0,), (0,)): Form.monomial(2, 0, 4, 1, dx=[1, 2])})
    a = EndSection({((0,), (1,)): Form.constant(1, 2)})
    assert not quillen_identity_holds(x, a, lambda exps: Fraction(2))


@pytest.mark.parametrize("name,k,n", [("s1", 1, 1), ("s2", 1, 0), ("s2", 1, 1), ("s2", 2, 1), ("s2", 0, 2)])
def test_integrand_agrees_with_the_sigma_route(request, name: str, k: int, n: int) -> None:
    scenario = request.getfixturevalue(name)
    rng = random.Random(f"{name}{k}{n}")
    for _ in range(3):
        ctx = JLOContext(scenario, tuple(rng.choice(POOL4) for _ in range(k)))
        args = trace_closing_arguments(rng, scenario, n, POOL4)
        fast = jlo_integrand(ctx, args)
        assert fast == jlo_integrand_by_sigma(ctx, args, sympy_simplex_integrator)
    assert fast


def test_integrand_vanishes_beyond_the_degree_bound(s1) -> None:
    ctx = JLOContext(s1, ())
    args = trace_closing_arguments(random.Random(0), s1, 2, POOL4)
    assert ctx.degree_cap(2) < 0
    assert not jlo_integrand(ctx, args)


def test_volume_form_against_the_unit(trivial, s1) -> None:
    for scenario, size in ((trivial, 2), (s1, 4)):
        volume = Form.monomial(1, 0, scenario.order, 1, dx=[1])
        unit = Unitized(None, field(scenario.order).from_rational(1))
        assert tau(volume, JLOContext(scenario, ()), (unit,)) == ULaurent({0: field(scenario.order).from_rational(size)})


def test_chain_identity_on_the_trivial_gerbe(trivial) -> None:
    plan = Plan(seed=1, samples=12)
    records = jlo_chain_checks(trivial, plan, "trivial", ["theorem"])
    assert records[0].passed


def test_only_the_theorem_convention_is_a_chain_map(s1) -> None:
    plan = Plan(seed=2, samples=20)
    records = {r.check_id: r for r in jlo_chain_checks(s1, plan, "s1", list(SIGN_CONVENTIONS))}
    assert records["jlo.chain.theorem"].passed
    assert records["jlo.chain.theorem"].data["nonzero"] > 0
    assert not records["jlo.chain.proof"].passed
    assert records["jlo.chain.proof"].witness


def test_the_literal_twisted_differential_fits_neither_convention(s1) -> None:
    """With the rescaled-degree signs read literally, tau is not a chain map for either sign of b+uB."""
    rng = random.Random(9)
    theta = bundle_dd_form(s1)
    omega = random_whitney_form(rng, s1, 2, degrees=(0, 1))
    literal = CompatibleForm(s1, lambda t: literal_twisted_differential(omega.at(t), theta.at(t)), "literal")
    tau_omega = jlo_cochain(omega, None, group_degree_sign)
    tau_literal = jlo_cochain(literal, None, group_degree_sign)
    delta = signed_group_delta(tau_omega)
    samples = chain_samples(rng, s1, 2, 2, [0, 1, 2, 3], per_cell=3, pool=POOL4)
    for kappa in (1, -1):
        mismatches = 0
        for sample in samples:
            t, args = sample.elements, sample.args
            right = total_differential(tau_omega(*t), kappa)(*args)
            if t:
                right = right + delta(*t)(*args)
            mismatches += tau_literal(*t)(*args) != right
        assert mismatches > 0
