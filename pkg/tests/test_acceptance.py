"""One test per acceptance criterion; each prints a single pass/fail line."""

from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction

from sympy import QQ
from sympy.polys.rings import ring

from cochains import random_arguments, random_cochain, random_group_cochain
from conftest import record_acceptance
from gerbejlo.checks import (
    Plan,
    dd_checks,
    gerbe_checks,
    jlo_chain_checks,
    morphism_checks,
    pipeline_checks,
    vartheta_checks,
)
from gerbejlo.cyclic import connes_B, group_delta, hochschild_b, homogeneous_delta, homotopy_h
from gerbejlo.exact import ULaurent
from gerbejlo.forms import Form, simplex_monomial_integral
from gerbejlo.jlo import sigma_monomial_integral
from gerbejlo.sampling import element_pool
from gerbejlo.scenario import builtin_scenario
from gerbejlo.simplicial import DeltaMorphism, compose, degeneracy, face, identity

POOL4 = [(g,) for g in range(4)]


def _summary(records) -> str:
    return ", ".join(f"{r.check_id}={r.status}({r.checked})" for r in records)


def _failures(records) -> list[str]:
    return [f"{r.check_id}: {r.witness}" for r in records if r.status == "fail"]


# ---------------------------------------------------------------------------------
# 1: simplicial presentation


def _monotone_maps(p: int, q: int):
    for values in itertools.combinations_with_replacement(range(q + 1), p + 1):
        yield DeltaMorphism(p, q, values)


def _from_generators(f: DeltaMorphism) -> DeltaMorphism:
    degens, faces = f.epi_mono()
    current = identity(f.source)
    for j in reversed(degens):
        current = compose(degeneracy(current.target - 1, j), current)
    for i in reversed(faces):
        current = compose(face(current.target + 1, i), current)
    return current


def test_criterion_1_simplicial_relations() -> None:
    start = time.perf_counter()
    bad, relations, maps = [], 0, 0
    for n in range(2, 7):
        # d^j d^i = d^i d^{j-1}, i < j, as maps [n-2] -> [n]
        for j in range(n + 1):
            for i in range(j):
                relations += 1
                if compose(face(n, j), face(n - 1, i)) != compose(face(n, i), face(n - 1, j - 1)):
                    bad.append(("dd", n, i, j))
    for n in range(0, 5):
        # s^j s^i = s^i s^{j+1}, i <= j, as maps [n+2] -> [n]
        for j in range(n + 1):
            for i in range(j + 1):
                relations += 1
                if compose(degeneracy(n, j), degeneracy(n + 1, i)) != compose(degeneracy(n, i), degeneracy(n + 1, j + 1)):
                    bad.append(("ss", n, i, j))
    for n in range(1, 7):
        # s^j d^i on [n-1] -> [n] -> [n-1]
        for j in range(n):
            for i in range(n + 1):
                relations += 1
                left = compose(degeneracy(n - 1, j), face(n, i))
                if i in (j, j + 1):
                    right = identity(n - 1)
                elif i < j:
                    right = compose(face(n - 1, i), degeneracy(n - 2, j - 1))
                else:
                    right = compose(face(n - 1, i - 1), degeneracy(n - 2, j))
                if left != right:
                    bad.append(("sd", n, i, j))
    for p in range(7):
        for q in range(7):
            for f in _monotone_maps(p, q):
                maps += 1
                if _from_generators(f) != f:
                    bad.append(("generated", f))
    elapsed = time.perf_counter() - start
    ok = not bad
    record_acceptance(1, ok, f"{relations} relations and {maps} monotone maps for n <= 6 in {elapsed:.2f}s; first failure {bad[:1]}")
    assert ok


# ---------------------------------------------------------------------------------
# 2: simplex calculus


def _integrate_over_simplex(poly, variables) -> Fraction:
    """Iterated integral over {x_i >= 0, sum x_i <= 1}, innermost variable last, in sympy's polynomial ring."""
    ring_ = poly.ring
    for i in reversed(range(len(variables))):
        antiderivative = ring_.zero
        for monomial, coefficient in poly.terms():
            raised = list(monomial)
            raised[i] += 1
            antiderivative += ring_({tuple(raised): coefficient / QQ(raised[i])})
        poly = antiderivative.compose(variables[i], ring_.one - sum(variables[:i], ring_.zero))
    value = poly.coeff(1) if poly else QQ(0)
    return Fraction(int(value.numerator), int(value.denominator))


def _iterated_integral(exps: tuple[int, ...]) -> Fraction:
    """int over the standard k-simplex of prod t_i^a_i."""
    if not exps:
        return Fraction(1)
    R, *t = ring(",".join(f"t{i}" for i in range(1, len(exps) + 1)), QQ)
    poly = R.one
    for var, a in zip(t, exps):
        poly *= var**a
    return _integrate_over_simplex(poly, t)


def _barycentric_integral(exps: tuple[int, ...]) -> Fraction:
    """The same oracle with sigma_0 = 1 - sigma_1 - ... - sigma_n."""
    n = len(exps) - 1
    if not n:
        return Fraction(1)
    R, *s = ring(",".join(f"s{i}" for i in range(1, n + 1)), QQ)
    poly = (R.one - sum(s, R.zero)) ** exps[0]
    for var, a in zip(s, exps[1:]):
        poly *= var**a
    return _integrate_over_simplex(poly, s)


def _random_simplex_form(rng: random.Random) -> Form:
    k = rng.randint(1, 4)
    out = Form.zero(0, k, 4)
    for _ in range(rng.randint(1, 3)):
        degree = k - 1 if rng.random() < 0.8 else rng.randint(0, k)
        out = out + Form.monomial(
            0,
            k,
            4,
            rng.choice((-3, -2, -1, 1, 2, 3)),
            t_exponents=[rng.randint(0, 2) for _ in range(k)],
            dt=sorted(rng.sample(range(1, k + 1), degree)),
        )
    return out


def test_criterion_2_simplex_calculus() -> None:
    start = time.perf_counter()
    mismatches = []
    cases = 0
    for n in range(5):
        for exps in itertools.product(range(7), repeat=n):
            if sum(exps) > 6:
                continue
            cases += 1
            if simplex_monomial_integral(exps) != _iterated_integral(exps):
                mismatches.append(("t", exps))
        for exps in itertools.product(range(7), repeat=n + 1):
            if sum(exps) > 6:
                continue
            cases += 1
            if sigma_monomial_integral(exps) != _barycentric_integral(exps):
                mismatches.append(("sigma", exps))
    rng = random.Random(2)
    stokes_bad, nonzero = [], 0
    for _ in range(200):
        f = _random_simplex_form(rng)
        left = f.d_simplex().integrate_simplex()
        right = f.integrate_boundary()
        nonzero += bool(left)
        if left != right:
            stokes_bad.append(f)
    elapsed = time.perf_counter() - start
    ok = not mismatches and not stokes_bad and nonzero > 100
    record_acceptance(
        2,
        ok,
        f"{cases} monomials vs sympy, 200 Stokes forms ({nonzero} with nonzero integral) in {elapsed:.2f}s; "
        f"mismatches {mismatches[:1]}, Stokes failures {len(stokes_bad)}",
    )
    assert ok


# ---------------------------------------------------------------------------------
# 3: cyclic operators


def test_criterion_3_cyclic_operator_identities(s1) -> None:
    start = time.perf_counter()
    rng = random.Random(3)
    bad, nonzero = [], 0
    for case in range(100):
        c = random_cochain(s1, ("criterion3", case))
        n = rng.randint(0, 4)
        args = random_arguments(rng, s1, n, POOL4)
        values = {"BB": connes_B(connes_B(c))(*args)}
        if n >= 1:
            values["bB+Bb"] = (hochschild_b(connes_B(c)) + connes_B(hochschild_b(c)))(*args)
            nonzero += bool(hochschild_b(c)(*args))
        if n >= 2:
            values["bb"] = hochschild_b(hochschild_b(c))(*args)
        for name, v in values.items():
            if v != ULaurent():
                bad.append((case, name, n))
    elapsed = time.perf_counter() - start
    ok = not bad and nonzero > 0
    record_acceptance(3, ok, f"100 cochain/argument cases, n <= 4, b c nonzero on {nonzero}, in {elapsed:.2f}s; failures {bad[:1]}")
    assert ok


# ---------------------------------------------------------------------------------
# 4: group cohomology


def test_criterion_4_group_cohomology() -> None:
    start = time.perf_counter()
    bad = []
    cases = 0
    for name in ("s1", "sz"):
        scenario = builtin_scenario(name).build()
        pool = element_pool(scenario, 2)
        rng = random.Random(f"criterion4-{name}")
        for case in range(50):
            cases += 1
            k = rng.randint(0, 2)
            inhomogeneous = random_group_cochain(scenario, (name, case, "inh"), homogeneous=False)
            homogeneous = random_group_cochain(scenario, (name, case, "hom"), homogeneous=True)
            args = random_arguments(rng, scenario, rng.randint(0, 2), pool, elementary=True)
            t_inh = tuple(rng.choice(pool) for _ in range(k + 2))
            t_hom = tuple(rng.choice(pool) for _ in range(k + 2))
            t_deg = tuple(rng.choice(pool) for _ in range(k + 1))
            if group_delta(group_delta(inhomogeneous))(*t_inh)(*args) != ULaurent():
                bad.append((name, case, "delta^2"))
            if homogeneous_delta(homogeneous_delta(homogeneous))(*t_hom)(*args) != ULaurent():
                bad.append((name, case, "delta~^2"))
            homotopy = homogeneous_delta(homotopy_h(homogeneous)) + homotopy_h(homogeneous_delta(homogeneous))
            if homotopy(*t_deg)(*args) != homogeneous(*t_deg)(*args):
                bad.append((name, case, "delta~ h + h delta~"))
    elapsed = time.perf_counter() - start
    ok = not bad
    record_acceptance(4, ok, f"{cases} cases on Z/4 and Z (window radius 2), degrees <= 2, in {elapsed:.2f}s; failures {bad[:1]}")
    assert ok


# ---------------------------------------------------------------------------------
# 5-7: gerbe data, vartheta, Dixmier-Douady on S1


def test_criterion_5_gerbe_identities(s1) -> None:
    records = gerbe_checks(s1, Plan(), "s1")
    checked = {r.check_id: r.checked for r in records}
    ok = all(r.passed for r in records) and checked["gerbe.theta-alpha"] == 16 and checked["gerbe.discrepancy"] == 16 * 8
    record_acceptance(5, ok, f"{_summary(records)}; failures {_failures(records)}")
    assert ok


def test_criterion_6_simplicial_two_form(s1) -> None:
    records = vartheta_checks(s1, Plan(samples=20), "s1", kmax=3)
    ok = all(r.passed for r in records) and {r.check_id: r.checked for r in records}["vartheta.curvature"] == 20
    record_acceptance(6, ok, f"{_summary(records)}; failures {_failures(records)}")
    assert ok


def test_criterion_7_dixmier_douady(s1) -> None:
    records = dd_checks(s1, Plan(), "s1", kmax=3)
    ok = all(r.passed for r in records)
    record_acceptance(7, ok, f"{_summary(records)}; failures {_failures(records)}")
    assert ok


# ---------------------------------------------------------------------------------
# 8-10: chain maps


def test_criterion_8_jlo_chain_map(s1) -> None:
    plan = Plan(kmax=2, nmax=2, samples=20)
    records = {r.check_id: r for r in jlo_chain_checks(s1, plan, "s1", ["theorem", "proof"])}
    theorem, proof = records["jlo.chain.theorem"], records["jlo.chain.proof"]
    holding = [name for name, r in (("theorem", theorem), ("proof", proof)) if r.passed]
    ok = holding == ["theorem"] and theorem.checked >= 20 and theorem.data["nonzero"] > 0
    record_acceptance(
        8,
        ok,
        f"conventions holding: {holding}; theorem {theorem.checked} samples ({theorem.data['nonzero']} nonzero), "
        f"proof witness: {proof.witness}",
    )
    assert ok


def test_criterion_9_algebraic_morphisms(s1) -> None:
    records = morphism_checks(s1, Plan(samples=20, psi2_samples=50), "s1")
    checked = {r.check_id: r.checked for r in records}
    ok = all(r.passed for r in records) and checked["psi1.invariant"] == 20 and checked["psi2.b"] == 50
    record_acceptance(9, ok, f"{_summary(records)}; failures {_failures(records)}")
    assert ok


def test_criterion_10_end_to_end_and_negative_control(s1) -> None:
    plan = Plan(pipeline_samples=16)
    record = pipeline_checks(s1, plan, "s1", nmax=1)[0]
    corrupt_file = builtin_scenario("s1-corrupt")
    corrupt = corrupt_file.build()
    controls = (
        gerbe_checks(corrupt, plan, corrupt_file.digest)
        + jlo_chain_checks(corrupt, Plan(kmax=2, nmax=2, samples=20), corrupt_file.digest, ["theorem"])
        + pipeline_checks(corrupt, plan, corrupt_file.digest, nmax=1)
    )
    caught = [r for r in controls if r.status == "fail" and r.witness]
    ok = record.passed and record.checked >= 10 and record.data["nonzero"] > 0 and bool(caught)
    record_acceptance(
        10,
        ok,
        f"S1 pipeline {record.status} on {record.checked} samples ({record.data['nonzero']} nonzero); "
        f"corrupted mu caught by {[r.check_id for r in caught]}, e.g. {caught[0].check_id if caught else None}: "
        f"{caught[0].witness if caught else None}",
    )
    assert ok
