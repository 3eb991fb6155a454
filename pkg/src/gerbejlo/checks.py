"""Identity suites run against a scenario, each producing CheckRecords.

The suites are shared by the command line driver and the test-suite.  Every
record names the identity it checks, carries a digest of its inputs and, on
failure, a witness that pins the first offending input.
"""

from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .compatible import nerve_face
from .cyclic import (
    CyclicCochain,
    GroupCochain,
    Unitized,
    connes_B,
    hochschild_b,
    homogeneous_delta,
    psi0,
)
from .dixmier_douady import NablaK, dd_form_closed, dd_form_from_nabla, vartheta
from .exact import ULaurent, field
from .forms import Form
from .gerbe import EndSection, GerbeScenario, LSection, convolve, end_action, end_product, end_trace
from .groups import Element
from .jlo import SIGN_CONVENTIONS, EndAlgebra, chain_check
from .pipeline import column_differential, full_pipeline, psi1, psi2
from .sampling import (
    chain_samples,
    closing_section_tuple,
    element_pool,
    random_form,
    random_lsection,
    random_whitney_form,
    trace_closing_arguments,
)

__all__ = [
    "CheckRecord",
    "Plan",
    "dd_class_table",
    "dd_checks",
    "gerbe_checks",
    "jlo_chain_checks",
    "morphism_checks",
    "pipeline_checks",
    "trace_functional",
    "vartheta_checks",
    "weighted_trace_cochain",
]

PASS, FAIL, SKIP = "pass", "fail", "skip"


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    identity: str
    inputs_digest: str
    status: str
    checked: int = 0
    witness: str | None = None
    data: dict = dc_field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def line(self) -> str:
        text = f"[{self.status.upper()}] {self.check_id}: {self.identity} ({self.checked} cases)"
        return text + (f" witness: {self.witness}" if self.witness else "")

    def to_json(self, timings: bool = False) -> dict:
        out: dict = {
            "id": self.check_id,
            "identity": self.identity,
            "inputs_digest": self.inputs_digest,
            "status": self.status,
            "checked": self.checked,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.data:
            out["data"] = self.data
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out

    @classmethod
    def from_json(cls, data: dict) -> CheckRecord:
        return cls(
            data["id"],
            data["identity"],
            data["inputs_digest"],
            data["status"],
            data.get("checked", 0),
            data.get("witness"),
            data.get("data", {}),
            data.get("seconds", 0.0),
        )


@dataclass(frozen=True)
class Plan:
    """Sample sizes and switches for the suites."""

    seed: int = 0
    kmax: int = 2
    nmax: int = 2
    samples: int = 20
    convention: str = "theorem"
    window_radius: int = 1
    pipeline_samples: int = 16
    psi2_samples: int = 50

    def digest(self, *parts: object) -> str:
        text = repr((self.seed, self.kmax, self.nmax, self.samples, self.convention, self.window_radius, self.pipeline_samples, self.psi2_samples) + parts)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def rng(self, salt: str) -> random.Random:
        return random.Random(f"{self.seed}:{salt}")


class _Tally:
    """Counts cases and keeps the first failure."""

    def __init__(self) -> None:
        self.checked = 0
        self.witness: str | None = None

    def record(self, ok: bool, witness: Callable[[], str]) -> None:
        self.checked += 1
        if not ok and self.witness is None:
            self.witness = witness()

    def result(self, check_id: str, identity: str, digest: str, start: float, data: dict | None = None) -> CheckRecord:
        status = PASS if self.witness is None else FAIL
        if self.checked == 0:
            status = SKIP
        return CheckRecord(check_id, identity, digest, status, self.checked, self.witness, data or {}, time.perf_counter() - start)


def _pool(scenario: GerbeScenario, plan: Plan) -> list[Element]:
    return element_pool(scenario, plan.window_radius)


# ---------------------------------------------------------------------------------
# gerbe data


def gerbe_checks(scenario: GerbeScenario, plan: Plan, scenario_digest: str = "") -> list[CheckRecord]:
    pool = _pool(scenario, plan)
    grp = scenario.group
    one = grp.identity
    out = []

    start, tally = time.perf_counter(), _Tally()
    for g in pool:
        tally.record(scenario.mu(one, g).is_one() and scenario.mu(g, one).is_one(), lambda g=g: f"g={g}")
    out.append(tally.result("gerbe.mu-normalized", "mu(1,g) = mu(g,1) = 1", plan.digest(scenario_digest, "norm"), start))

    start, tally = time.perf_counter(), _Tally()
    for g in pool:
        for h in pool:
            for k in pool:
                left, right = scenario.cocycle_defect(g, h, k)
                tally.record(left == right, lambda g=g, h=h, k=k, l=left, r=right: f"(g,h,k)=({g},{h},{k}): {l} != {r}")
    out.append(tally.result("gerbe.mu-cocycle", "mu(g,h) mu(gh,k) = mu(g,hk) mu(h,k)^g", plan.digest(scenario_digest, "cocycle"), start))

    start, tally = time.perf_counter(), _Tally()
    rng = plan.rng("convolution")
    for _ in range(plan.samples):
        sections = [random_lsection(rng, scenario, rng.sample(pool, min(len(pool), rng.randint(1, 4)))) for _ in range(3)]
        a, b, c = sections
        left = convolve(scenario, convolve(scenario, a, b), c)
        right = convolve(scenario, a, convolve(scenario, b, c))
        tally.record(left == right, lambda a=a, b=b, c=c: f"supports {a.support()}, {b.support()}, {c.support()}")
    out.append(tally.result("gerbe.convolution-associative", "(a*b)*c = a*(b*c)", plan.digest(scenario_digest, "conv"), start))

    start, tally = time.perf_counter(), _Tally()
    for g in pool:
        for h in pool:
            gh = grp.multiply(g, h)
            left = scenario.theta(g) + scenario.act(g, scenario.theta(h)) - scenario.theta(gh)
            tally.record(left == scenario.alpha(g, h).d(), lambda g=g, h=h: f"(g,h)=({g},{h})")
    out.append(tally.result("gerbe.theta-alpha", "theta_g + theta_h^g - theta_gh = d alpha(g,h)", plan.digest(scenario_digest, "theta"), start))

    out.append(discrepancy_check(scenario, plan, scenario_digest))
    return out


def discrepancy_check(scenario: GerbeScenario, plan: Plan, scenario_digest: str = "", entries: int = 8) -> CheckRecord:
    """g . (nabla a) - nabla (g . a) = [A(g), g . a] on End E, A(g)_y = alpha(g, g^-1 y).

    The connection and A are those of the bundle carrying the matrices E_{x,y}.
    """
    pool = _pool(scenario, plan)
    bundle = scenario.dual()
    nabla = NablaK(bundle, ())
    rng = plan.rng("discrepancy")
    start, tally = time.perf_counter(), _Tally()
    for g in pool:
        for x in pool:
            for _ in range(entries):
                y = rng.choice(pool)
                a = EndSection.elementary(x, y, random_form(rng, scenario, modes=(-2, 2)))
                moved = end_action(scenario, g, a)
                left = end_action(scenario, g, nabla.apply(a)) - nabla.apply(moved)
                rows = moved.rows() | moved.columns()
                A = EndSection({(z, z): bundle.discrepancy_A(g, z) for z in rows})
                right = end_product(A, moved) - end_product(moved, A)
                tally.record(left == right, lambda g=g, x=x, y=y: f"g={g}, entry ({x},{y})")
    return tally.result(
        "gerbe.discrepancy",
        "g.(nabla a) - nabla(g.a) = [A(g), g.a]",
        plan.digest(scenario_digest, "discrepancy", entries),
        start,
    )


# ---------------------------------------------------------------------------------
# vartheta and Theta


def _sample_tuples(rng: random.Random, pool: Sequence[Element], count: int, kmin: int, kmax: int) -> list[tuple]:
    return [tuple(rng.choice(pool) for _ in range(rng.randint(kmin, kmax))) for _ in range(count)]


def vartheta_checks(scenario: GerbeScenario, plan: Plan, scenario_digest: str = "", kmax: int = 3) -> list[CheckRecord]:
    pool = _pool(scenario, plan)
    grp = scenario.group
    rng = plan.rng("vartheta")
    out = []

    start, tally = time.perf_counter(), _Tally()
    for t in _sample_tuples(rng, pool, plan.samples, 1, kmax):
        full = vartheta(scenario, t)
        for i in range(len(t) + 1):
            lower = vartheta(scenario, nerve_face(scenario, t, i))
            for y in pool:
                here = full.value(y).simplex_face(i)
                if i == 0:
                    there = scenario.act(t[0], lower.value(grp.multiply(grp.inverse(t[0]), y)))
                else:
                    there = lower.value(y)
                tally.record(here == there, lambda t=t, i=i, y=y: f"tuple {t}, face {i}, entry {y}")
    out.append(tally.result("vartheta.faces", "vartheta_(k) restricts to vartheta_(k-1) on every face", plan.digest(scenario_digest, "faces", kmax), start))

    start, tally = time.perf_counter(), _Tally()
    for _ in range(plan.samples):
        k = rng.randint(0, kmax)
        t = tuple(rng.choice(pool) for _ in range(k))
        x, y = rng.choice(pool), rng.choice(pool)
        f = random_form(rng, scenario, level=k, max_t_exponent=2, modes=(-2, 2))
        a = EndSection.elementary(x, y, f)
        th = vartheta(scenario, t).as_section({x, y})
        left = NablaK(scenario, t).apply_twice(a)
        right = end_product(th, a) - end_product(a, th)
        tally.record(left == right, lambda t=t, x=x, y=y: f"tuple {t}, entry ({x},{y})")
    out.append(tally.result("vartheta.curvature", "(nabla^k)^2 a = [vartheta_(k), a]", plan.digest(scenario_digest, "curv", kmax), start))
    return out


def dd_checks(scenario: GerbeScenario, plan: Plan, scenario_digest: str = "", kmax: int = 3) -> list[CheckRecord]:
    pool = _pool(scenario, plan)
    rng = plan.rng("dd")
    tuples = [()] + _sample_tuples(rng, pool, plan.samples, 1, kmax)
    out = []

    start, tally = time.perf_counter(), _Tally()
    for t in tuples:
        closed = dd_form_closed(scenario, t)
        for y in [scenario.group.identity, *t]:
            tally.record(dd_form_from_nabla(scenario, t, y) == closed, lambda t=t, y=y: f"tuple {t}, entry {y}")
    out.append(tally.result("dd.closed-formula", "closed Theta_(k) = nabla^k vartheta_(k)", plan.digest(scenario_digest, "closed", kmax), start))

    start, tally = time.perf_counter(), _Tally()
    for t in tuples:
        tally.record(not dd_form_closed(scenario, t).component(manifold_degree=0, simplex_degree=3), lambda t=t: f"tuple {t}")
    out.append(tally.result("dd.no-03-part", "Theta^{0,3} = 0", plan.digest(scenario_digest, "03", kmax), start))

    start, tally = time.perf_counter(), _Tally()
    table = dd_class_table(scenario, pool, kmax)
    for row in table:
        tally.record(row["value"] == row["expected"], lambda row=row: f"tuple {row['tuple']}: {row['value']} != {row['expected']}")
    out.append(tally.result(
        "dd.integrated",
        "I(Theta_1) = -theta_g, I(Theta_2) = alpha(g1,g2), I(Theta_k) = 0 for k >= 3",
        plan.digest(scenario_digest, "integrated", kmax),
        start,
    ))
    return out


def dd_class_table(scenario: GerbeScenario, pool: Sequence[Element], kmax: int = 3, full: bool = True) -> list[dict]:
    """Integrated Theta on every tuple of length 1 and 2 from ``pool`` and sampled longer ones."""
    rows = []
    zero = Form.zero(scenario.m, 0, scenario.order)
    tuples: list[tuple] = [(g,) for g in pool] + [(g, h) for g in pool for h in pool]
    if kmax >= 3:
        step = 1 if full else max(1, len(pool) // 2)
        tuples += [(g, h, pool[(i + 1) % len(pool)]) for i, g in enumerate(pool[::step]) for h in pool[::step]]
    for t in tuples:
        value = dd_form_closed(scenario, t).integrate_simplex()
        if len(t) == 1:
            expected = -scenario.theta(t[0])
        elif len(t) == 2:
            expected = scenario.alpha(t[0], t[1])
        else:
            expected = zero
        rows.append({"tuple": t, "value": value, "expected": expected})
    return rows


# ---------------------------------------------------------------------------------
# JLO chain identity


def jlo_chain_checks(
    scenario: GerbeScenario,
    plan: Plan,
    scenario_digest: str = "",
    conventions: Iterable[str] | None = None,
) -> list[CheckRecord]:
    """tau(D omega) = (kappa (b+uB) + delta') tau(omega) for random Whitney forms omega.

    One record per convention.  Two forms of mixed manifold degree 0..m live on
    nerve simplices of dimension up to kmax; every (k, n) cell of the grid gets
    at least two argument tuples per form.
    """
    rng = plan.rng("jlo")
    pool = _pool(scenario, plan)
    m = scenario.m
    degrees = tuple(range(m + 1))
    cells = (plan.kmax + 1) * (plan.nmax + 1)
    per_cell = max(2, -(-plan.samples // cells))
    grids = []
    for i in range(2):
        omega = random_whitney_form(rng, scenario, plan.kmax, degrees=degrees, name=f"omega{i}")
        total_degrees = [r + p for r in degrees for p in range(plan.kmax + 1)]
        grids.append((i, omega, chain_samples(rng, scenario, plan.kmax, plan.nmax, total_degrees, per_cell, pool)))
    window = pool if not scenario.group.is_finite else None
    out = []
    for conv in conventions if conventions is not None else [plan.convention]:
        if conv not in SIGN_CONVENTIONS:
            raise ValueError(f"unknown sign convention {conv!r}")
        start, tally = time.perf_counter(), _Tally()
        nonzero = 0
        for i, omega, samples in grids:
            for rec in chain_check(omega, samples, conv, window):
                nonzero += bool(rec.left or rec.right)
                tally.record(
                    rec.passed,
                    lambda rec=rec, i=i: f"omega{i}, tuple {rec.sample.elements}, n={rec.sample.n}: {rec.left} != {rec.right}",
                )
        out.append(tally.result(
            f"jlo.chain.{conv}",
            f"tau(D omega) = ({'+' if SIGN_CONVENTIONS[conv] > 0 else '-'}(b+uB) + delta') tau(omega)",
            plan.digest(scenario_digest, "jlo", conv),
            start,
            {"nonzero": nonzero, "convention": conv},
        ))
    return out


# ---------------------------------------------------------------------------------
# the algebraic morphisms


def trace_functional(form: Form) -> object:
    """Integral over the torus of the function part of a level-0 form."""
    return form.terms.get((0, (0,) * form.m, (), 0), field(form.order).zero)


def _weight(salt: object, n: int) -> Fraction:
    digest = hashlib.sha256(repr((salt, n)).encode()).digest()
    return Fraction(digest[0] % 7 - 3, 1 + digest[1] % 3)


def _trace_of_product(first: Unitized, rest: Sequence[EndSection], weight: Callable[[Element], object]) -> object:
    total = None

    def traced(seq: Sequence[EndSection]) -> object:
        prod = seq[0]
        for a in seq[1:]:
            prod = end_product(prod, a)
        acc = None
        for (x, y), f in prod.components():
            if x == y:
                term = trace_functional(f) * weight(y)
                acc = term if acc is None else acc + term
        return acc

    if first.element is not None:
        total = traced([first.element, *rest])
    if first.unit and rest:
        part = traced(list(rest))
        if part is not None:
            part = part * first.unit
            total = part if total is None else total + part
    return total


def weighted_trace_cochain(scenario: GerbeScenario, salt: object, invariant: bool = False) -> CyclicCochain:
    """c(a~_0, ..., a_n) = int sum_y w(y) tr(a~_0 a_1 ... a_n)_{y,y} with pseudo-random weights.

    With ``invariant`` the weights do not depend on y, which makes c invariant
    under the Gamma-action on End E.
    """
    algebra = EndAlgebra(scenario)

    def ev(args: tuple) -> ULaurent:
        n = len(args) - 1
        value = _trace_of_product(args[0], args[1:], lambda y: _weight((salt, None if invariant else y), n))
        return ULaurent({0: value}) if value else ULaurent()

    return CyclicCochain(algebra, ev, f"trace[{salt}]")


def _synthetic_group_cochain(scenario: GerbeScenario, max_degree: int, salt: str) -> GroupCochain:
    """Inhomogeneous cochain (g_1..g_k) -> weighted trace cochain, zero above max_degree."""
    algebra = EndAlgebra(scenario)

    def at(t: tuple) -> CyclicCochain:
        if len(t) > max_degree:
            return CyclicCochain(algebra, lambda _args: ULaurent())
        return weighted_trace_cochain(scenario, (salt, t))

    return GroupCochain(scenario.group, algebra, at)


def morphism_checks(scenario: GerbeScenario, plan: Plan, scenario_digest: str = "", max_degree: int = 2) -> list[CheckRecord]:
    """Psi_1 invariance and chain property; Psi_2 against b and B."""
    pool = _pool(scenario, plan)
    rng = plan.rng("morphisms")
    c = psi0(_synthetic_group_cochain(scenario, max_degree, f"seed{plan.seed}"))
    collapsed = psi1(c, max_degree)
    out = []

    start, tally = time.perf_counter(), _Tally()
    invariance = homogeneous_delta(collapsed)
    for _ in range(plan.samples):
        n = rng.randint(0, 2)
        args = trace_closing_arguments(rng, scenario, n, pool, noise=False)
        g0, g1 = rng.choice(pool), rng.choice(pool)
        value = invariance(g0, g1)(*args)
        tally.record(not value, lambda g0=g0, g1=g1, n=n: f"(g0,g1)=({g0},{g1}), n={n}: {value}")
    out.append(tally.result("psi1.invariant", "delta~ Psi_1(c) = 0", plan.digest(scenario_digest, "psi1inv", max_degree), start))

    start, tally = time.perf_counter(), _Tally()
    image_of_source = psi1(homogeneous_delta(c) + column_differential(c), max_degree + 1)
    image_differential = column_differential(collapsed)
    for _ in range(plan.samples):
        n = rng.randint(0, 2)
        args = trace_closing_arguments(rng, scenario, n, pool, noise=False)
        g = rng.choice(pool)
        left, right = image_of_source(g)(*args), image_differential(g)(*args)
        tally.record(left == right, lambda g=g, n=n, l=left, r=right: f"g0={g}, n={n}: {l} != {r}")
    out.append(tally.result("psi1.chain-map", "Psi_1((delta~ + D) c) = D Psi_1(c)", plan.digest(scenario_digest, "psi1chain", max_degree), start))

    invariant = weighted_trace_cochain(scenario, ("psi2", plan.seed), invariant=True)
    for name, op, shrink in (("b", hochschild_b, 0), ("B", connes_B, 1)):
        start, tally = time.perf_counter(), _Tally()
        rng_local = plan.rng(f"psi2-{name}")
        for _ in range(plan.psi2_samples):
            n = rng_local.randint(1, 3) - shrink
            args = _random_convolution_arguments(rng_local, scenario, n, pool)
            left = op(psi2(invariant, scenario)).evaluate(args)
            right = psi2(op(invariant), scenario).evaluate(args)
            tally.record(left == right, lambda n=n, l=left, r=right: f"n={n}: {l} != {r}")
        out.append(tally.result(f"psi2.{name}", f"{name} Psi_2(c) = Psi_2({name} c)", plan.digest(scenario_digest, f"psi2{name}"), start))
    return out


def _random_convolution_arguments(rng: random.Random, scenario: GerbeScenario, n: int, pool: Sequence[Element]) -> tuple:
    def section() -> LSection:
        out = {}
        for g in rng.sample(pool, min(2, len(pool))):
            f = Form.zero(scenario.m, 0, scenario.order)
            for _ in range(3):
                f = f + random_form(rng, scenario, terms=1, modes=(-8, 0))
            out[g] = f
        return LSection(out)

    unit = field(scenario.order).from_rational(rng.randint(0, 1) if n >= 1 else 0)
    return (Unitized(section(), unit),) + tuple(section() for _ in range(n))


# ---------------------------------------------------------------------------------
# end to end


def pipeline_checks(scenario: GerbeScenario, plan: Plan, scenario_digest: str = "", nmax: int = 1) -> list[CheckRecord]:
    """(b+uB) Phi(omega) = Phi(D omega) on closing convolution-algebra samples with n <= nmax."""
    if not scenario.group.is_finite:
        return [CheckRecord("pipeline.chain", "(b+uB) Phi(omega) = Phi(D omega)", plan.digest(scenario_digest, "pipeline"), SKIP,
                            witness=None, data={"reason": "the end-to-end check needs a finite group"})]
    rng = plan.rng("pipeline")
    pool = _pool(scenario, plan)
    omega = random_whitney_form(rng, scenario, 1, degrees=tuple(range(scenario.m + 1)), name="omega")
    samples = []
    for i in range(plan.pipeline_samples):
        # mostly n = nmax, where both sides see every stage of the composite
        n = nmax if i % 5 else 0
        samples.append(closing_section_tuple(rng, scenario, n, pool))
    start, tally = time.perf_counter(), _Tally()
    nonzero = 0
    for rec in full_pipeline(omega, samples, scenario.m + 1):
        nonzero += bool(rec.left or rec.right)
        tally.record(rec.passed, lambda rec=rec: f"n={len(rec.args) - 1}, supports {[_supports(a) for a in rec.args]}: {rec.left} != {rec.right}")
    return [tally.result("pipeline.chain", "(b+uB) Phi(omega) = Phi(D omega)", plan.digest(scenario_digest, "pipeline", nmax), start,
                         {"nonzero": nonzero})]


def _supports(a: object) -> list:
    if isinstance(a, Unitized):
        return ([] if a.element is None else a.element.support()) + (["1"] if a.unit else [])
    return a.support()  # type: ignore[attr-defined]
