"""Seeded random inputs: forms, sections, trace-closing argument tuples, compatible forms.

Every generator takes a :class:`random.Random`, so a report is reproducible
from the scenario and the seed alone.
"""

from __future__ import annotations

import random
from typing import Sequence

from .compatible import CompatibleForm
from .cyclic import Unitized
from .exact import field
from .forms import Form
from .gerbe import EndSection, GerbeScenario, LSection
from .groups import Element
from .jlo import ChainSample

__all__ = [
    "chain_samples",
    "closing_section_tuple",
    "element_pool",
    "random_end_section",
    "random_form",
    "random_lsection",
    "random_whitney_form",
    "trace_closing_arguments",
]


def element_pool(scenario: GerbeScenario, radius: int = 1) -> list[Element]:
    """All elements of a finite group, or the window of radius ``radius`` otherwise."""
    return list(scenario.group.elements(radius))


def random_form(
    rng: random.Random,
    scenario: GerbeScenario,
    degree: int = 0,
    terms: int = 2,
    modes: tuple[int, int] = (-1, 1),
    level: int = 0,
    max_t_exponent: int = 0,
) -> Form:
    """A sum of ``terms`` random monomial ``degree``-forms on the torus (times t-monomials at ``level``)."""
    m, order = scenario.m, scenario.order
    out = Form.zero(m, level, order)
    for _ in range(terms):
        dx = sorted(rng.sample(range(1, m + 1), degree))
        fourier = [rng.randint(*modes) for _ in range(m)]
        texp = [rng.randint(0, max_t_exponent) for _ in range(level)]
        out = out + Form.monomial(m, level, order, rng.choice((-2, -1, 1, 2)), fourier=fourier, t_exponents=texp, dx=dx)
    return out


def random_end_section(rng: random.Random, scenario: GerbeScenario, pool: Sequence[Element], entries: int = 2) -> EndSection:
    out: dict = {}
    for _ in range(entries):
        key = (rng.choice(pool), rng.choice(pool))
        out[key] = out.get(key, Form.zero(scenario.m, 0, scenario.order)) + random_form(rng, scenario)
    return EndSection(out)


def trace_closing_arguments(
    rng: random.Random,
    scenario: GerbeScenario,
    n: int,
    pool: Sequence[Element],
    with_unit: bool = True,
    noise: bool = True,
) -> tuple:
    """(a~_0, a_1, ..., a_n) whose entries contain a closed path x_0 -> x_1 -> ... -> x_0.

    Random extra entries are added when ``noise`` is set.  The zeroth slot
    gets a random unit component when ``with_unit`` is set and n >= 1 (the
    bare unit alone in degree 0 has no row index).
    """
    path = [rng.choice(pool) for _ in range(n + 1)]
    args = []
    for i in range(n + 1):
        entries = {(path[i], path[(i + 1) % (n + 1)]): random_form(rng, scenario, terms=3, modes=(-2, 2))}
        if noise:
            key = (rng.choice(pool), rng.choice(pool))
            entries[key] = entries.get(key, Form.zero(scenario.m, 0, scenario.order)) + random_form(rng, scenario)
        args.append(EndSection(entries))
    unit = field(scenario.order).from_rational(rng.randint(0, 1) if with_unit and n >= 1 else 0)
    return (Unitized(args[0], unit),) + tuple(args[1:])


def random_lsection(
    rng: random.Random,
    scenario: GerbeScenario,
    support: Sequence[Element],
    modes: tuple[int, int] = (-1, 1),
) -> LSection:
    return LSection({g: random_form(rng, scenario, modes=modes) for g in support})


def closing_section_tuple(
    rng: random.Random,
    scenario: GerbeScenario,
    n: int,
    pool: Sequence[Element],
    modes: tuple[int, int] = (-3, 0),
    with_unit: bool = True,
) -> tuple:
    """Convolution-algebra arguments with supports g_0, ..., g_n multiplying to 1.

    The multiplication mu shifts Fourier modes along a closed chain, so modes
    are drawn from a window wide enough to compensate and keep traces nonzero.
    """
    grp = scenario.group
    tail = [rng.choice(pool) for _ in range(n)]
    head = grp.inverse(grp.product(tail))
    unit = field(scenario.order).from_rational(rng.randint(0, 1) if with_unit and n >= 1 else 0)
    first = Unitized(random_lsection(rng, scenario, [head], modes), unit)
    return (first,) + tuple(random_lsection(rng, scenario, [g], modes) for g in tail)


def random_whitney_form(
    rng: random.Random,
    scenario: GerbeScenario,
    max_dimension: int,
    degrees: Sequence[int] = (0, 1),
    simplex_dimensions: Sequence[int] | None = None,
    name: str = "omega",
) -> CompatibleForm:
    """A compatible form built from random manifold forms on nerve simplices.

    Each simplex of dimension p in ``simplex_dimensions`` (default: all up to
    ``max_dimension``) gets a random form of each degree in ``degrees``.
    """
    dims = set(simplex_dimensions) if simplex_dimensions is not None else set(range(max_dimension + 1))
    memo: dict[tuple, Form] = {}
    seed = rng.getrandbits(64)

    def cochain(t: tuple) -> Form:
        if len(t) not in dims:
            return Form.zero(scenario.m, 0, scenario.order)
        if t not in memo:
            local = random.Random(f"{seed}:{t}")
            out = Form.zero(scenario.m, 0, scenario.order)
            for r in degrees:
                if r <= scenario.m:
                    out = out + random_form(local, scenario, degree=r, terms=2)
            memo[t] = out
        return memo[t]

    return CompatibleForm.from_simplices(scenario, cochain, max_dimension, name)


def chain_samples(
    rng: random.Random,
    scenario: GerbeScenario,
    kmax: int,
    nmax: int,
    form_degrees: Sequence[int],
    per_cell: int = 1,
    pool: Sequence[Element] | None = None,
) -> list[ChainSample]:
    """(tuple, arguments) pairs for every (k, n) where a form of total degree in ``form_degrees`` can contribute.

    tau pairs a form of degree l with n covariant derivatives and curvature
    powers, so either side of the chain identity can be nonzero only when
    l + n <= m + k + 1 (the source side carries one extra degree).
    """
    elements = list(pool) if pool is not None else element_pool(scenario)
    m = scenario.m
    out = []
    for k in range(kmax + 1):
        for n in range(nmax + 1):
            if not any(l + n <= m + k + 1 for l in form_degrees):
                continue
            for _ in range(per_cell):
                t = tuple(rng.choice(elements) for _ in range(k))
                out.append(ChainSample(t, trace_closing_arguments(rng, scenario, n, elements)))
    return out
