"""Command line driver: ``gerbejlo validate|dd-class|jlo-eval|chain-check|report``.

Every command prints one line per check (or writes the JSON report with
``--json``) and exits with status 0 iff no check failed.  Usage and scenario
errors exit with status 2.

Report JSON (schema ``gerbejlo.report``, version 1)::

    {
      "schema": "gerbejlo.report", "schema_version": 1,
      "tool_version": str, "command": str,
      "scenario": {"name": str, "digest": sha256 of the canonical text},
      "options": {"seed", "kmax", "nmax", "samples", "sign_convention", "suites"},
      "checks": [{"id", "identity", "inputs_digest", "status": "pass"|"fail"|"skip",
                  "checked", "witness"?, "data"?, "seconds"?}],
      "results": {...command specific...},
      "summary": {"pass": int, "fail": int, "skip": int, "ok": bool}
    }

Keys are sorted and timings are only present with ``--timings``, so a report
is byte-identical across runs for a fixed scenario, seed and option set.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .cache import DiskCache
from .checks import (
    FAIL,
    PASS,
    SKIP,
    CheckRecord,
    Plan,
    dd_checks,
    dd_class_table,
    gerbe_checks,
    jlo_chain_checks,
    morphism_checks,
    pipeline_checks,
    vartheta_checks,
)
from .compatible import CompatibleForm
from .cyclic import Unitized
from .dixmier_douady import dd_form_closed
from .exact import field
from .gerbe import EndSection, GerbeScenario
from .groups import Element
from .jlo import SIGN_CONVENTIONS, jlo_cochain, group_degree_sign
from .sampling import element_pool
from .scenario import BUILTIN_SCENARIOS, ScenarioError, ScenarioFile, builtin_scenario, load_scenario_file, parse_form

__all__ = ["main", "run"]

SCHEMA = "gerbejlo.report"
SCHEMA_VERSION = 1

# largest simplex and argument degrees the suites are sized for
MAX_K = 3
MAX_N = 3
# the end-to-end composite is only sampled up to this many arguments past a~_0
PIPELINE_MAX_N = 1

SUITES = ("gerbe", "vartheta", "dd", "jlo", "morphisms", "pipeline")
COMMAND_SUITES = {
    "validate": ("gerbe", "vartheta"),
    "dd-class": ("dd",),
    "chain-check": ("jlo", "morphisms", "pipeline"),
    "report": SUITES,
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------------
# suites


def _skip(check_id: str, identity: str, plan: Plan, digest: str, reason: str) -> CheckRecord:
    return CheckRecord(check_id, identity, plan.digest(digest, check_id), SKIP, data={"reason": reason})


def _jlo_suite(scenario: GerbeScenario, plan: Plan, digest: str) -> list[CheckRecord]:
    """The configured convention, plus a record that exactly one convention holds."""
    if plan.kmax > MAX_K or plan.nmax > MAX_N:
        reason = f"degree caps kmax={plan.kmax}, nmax={plan.nmax} exceed the supported {MAX_K}, {MAX_N}"
        return [
            _skip(f"jlo.chain.{plan.convention}", "tau(D omega) = (kappa(b+uB) + delta') tau(omega)", plan, digest, reason),
            _skip("jlo.unique-convention", "the chain identity holds under exactly one sign convention", plan, digest, reason),
        ]
    records = {r.data["convention"]: r for r in jlo_chain_checks(scenario, plan, digest, list(SIGN_CONVENTIONS))}
    holding = sorted(c for c, r in records.items() if r.passed)
    unique = CheckRecord(
        "jlo.unique-convention",
        "the chain identity holds under exactly one sign convention",
        plan.digest(digest, "unique"),
        PASS if len(holding) == 1 else FAIL,
        sum(r.checked for r in records.values()),
        None if len(holding) == 1 else f"conventions holding: {holding or 'none'}",
        {"holding": holding},
        sum(r.seconds for r in records.values()),
    )
    return [records[plan.convention], unique]


def _pipeline_suite(scenario: GerbeScenario, plan: Plan, digest: str) -> list[CheckRecord]:
    if plan.nmax < 0:
        return [_skip("pipeline.chain", "(b+uB) Phi(omega) = Phi(D omega)", plan, digest, "nmax < 0")]
    return pipeline_checks(scenario, plan, digest, min(plan.nmax, PIPELINE_MAX_N))


SUITE_FUNCTIONS: dict[str, Callable[[GerbeScenario, Plan, str], list[CheckRecord]]] = {
    "gerbe": gerbe_checks,
    "vartheta": lambda s, p, d: vartheta_checks(s, p, d, MAX_K),
    "dd": lambda s, p, d: dd_checks(s, p, d, MAX_K),
    "jlo": _jlo_suite,
    "morphisms": morphism_checks,
    "pipeline": _pipeline_suite,
}


def _run_suite_from_text(text: str, suite: str, plan: Plan) -> list[dict]:
    sf = load_scenario_file(text, check=False)
    return [r.to_json(timings=True) for r in SUITE_FUNCTIONS[suite](sf.build(), plan, sf.digest)]


def run_suites(
    sf: ScenarioFile,
    plan: Plan,
    suites: Sequence[str],
    cache: DiskCache,
    jobs: int = 1,
) -> list[CheckRecord]:
    """Run ``suites`` in order; results come from the cache when present.

    With ``jobs > 1`` uncached suites run in worker processes; the records are
    still assembled in suite order by this process alone.
    """
    digest = sf.digest
    ids = {suite: f"suite-{suite}-{__version__}-{plan.digest(suite)}" for suite in suites}
    found: dict[str, list[dict]] = {}
    for suite in suites:
        cached = cache.get(digest, ids[suite])
        if cached is not None:
            found[suite] = cached
    missing = [s for s in suites if s not in found]
    if jobs > 1 and len(missing) > 1:
        from .scenario import serialize

        text = serialize(sf)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {s: pool.submit(_run_suite_from_text, text, s, plan) for s in missing}
            for s, fut in futures.items():
                found[s] = fut.result()
    elif missing:
        scenario = sf.build()
        for s in missing:
            found[s] = [r.to_json(timings=True) for r in SUITE_FUNCTIONS[s](scenario, plan, digest)]
    for s in missing:
        cache.misses += 1
        cache.put(digest, ids[s], found[s])
    return [CheckRecord.from_json(r) for s in suites for r in found[s]]


# ---------------------------------------------------------------------------------
# command specific results


def _element_text(g: Element) -> str:
    return ",".join(str(c) for c in g)


def _tuple_text(t: tuple) -> str:
    return ";".join(_element_text(g) for g in t) or "()"


def theta_vanishes(sf: ScenarioFile, plan: Plan, cache: DiskCache) -> bool:
    """Whether the closed Theta vanishes on every tuple of length <= 2 over the sampling pool."""

    def compute() -> bool:
        scenario = sf.build()
        pool = element_pool(scenario, plan.window_radius)
        tuples = [()] + [(g,) for g in pool] + [(g, h) for g in pool for h in pool]
        return all(not dd_form_closed(scenario, t) for t in tuples)

    return bool(cache.memo(sf.digest, f"theta-vanishes-{__version__}-{plan.window_radius}", compute))


def dd_table(sf: ScenarioFile, plan: Plan, cache: DiskCache) -> list[dict]:
    """Integrated Theta per tuple as text, with the expected -theta / alpha / 0."""

    def compute() -> list[dict]:
        scenario = sf.build()
        pool = element_pool(scenario, plan.window_radius)
        return [
            {
                "tuple": _tuple_text(row["tuple"]),
                "level": len(row["tuple"]),
                "value": repr(row["value"]),
                "expected": repr(row["expected"]),
                "equal": row["value"] == row["expected"],
            }
            for row in dd_class_table(scenario, pool, MAX_K)
        ]

    return cache.memo(sf.digest, f"dd-table-{__version__}-{plan.window_radius}", compute)


def _parse_element(text: str, scenario: GerbeScenario) -> Element:
    try:
        coords = [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad group element {text!r}; write integer coordinates separated by commas") from None
    if len(coords) != scenario.group.rank:
        raise UsageError(f"group element {text!r} needs {scenario.group.rank} coordinates")
    return scenario.group.reduce(coords)


def _parse_tuple(text: str, scenario: GerbeScenario) -> tuple:
    text = text.strip()
    if text in ("", "()"):
        return ()
    return tuple(_parse_element(part.strip(), scenario) for part in text.split(";"))


def jlo_evaluate(sf: ScenarioFile, args: argparse.Namespace) -> dict:
    """tau(omega)(g_1..g_k)(a~_0, a_1, ..., a_n) for a constant omega and user-given matrix entries."""
    scenario = sf.build()
    m, order = scenario.m, scenario.order
    t = _parse_tuple(args.tuple, scenario)
    slots: dict[int, dict] = {}
    for entry_text in args.entry:
        parts = entry_text.split(":", 3)
        if len(parts) != 4:
            raise UsageError(f"bad --entry {entry_text!r}; expected SLOT:ROW:COL:EXPR")
        try:
            slot = int(parts[0])
        except ValueError:
            raise UsageError(f"bad slot in --entry {entry_text!r}") from None
        if slot < 0:
            raise UsageError("slots are numbered from 0")
        key = (_parse_element(parts[1], scenario), _parse_element(parts[2], scenario))
        value = parse_form(parts[3], m, order)
        entries = slots.setdefault(slot, {})
        entries[key] = entries[key] + value if key in entries else value
    n = max(slots, default=0)
    unit = field(order).from_rational(Fraction(args.unit))
    first = slots.get(0)
    arguments = (Unitized(EndSection(first) if first else None, unit),) + tuple(
        EndSection(slots.get(i, {})) for i in range(1, n + 1)
    )
    omega = CompatibleForm.constant(scenario, parse_form(args.omega, m, order))
    window = None if scenario.group.is_finite else element_pool(scenario, args.window_radius)
    value = jlo_cochain(omega, window, group_degree_sign)(*t)(*arguments)
    return {
        "tuple": _tuple_text(t),
        "n": n,
        "omega": args.omega,
        "unit": str(Fraction(args.unit)),
        "value": repr(value),
        "coefficients": value.to_json(),
    }


# ---------------------------------------------------------------------------------
# driver


def _load(name: str) -> ScenarioFile:
    path = Path(name)
    if path.is_file():
        return load_scenario_file(path.read_text(encoding="utf-8"))
    if name in BUILTIN_SCENARIOS:
        return builtin_scenario(name)
    raise UsageError(f"no scenario file {name!r} and no builtin of that name (builtins: {', '.join(BUILTIN_SCENARIOS)})")


def _plan(sf: ScenarioFile, args: argparse.Namespace) -> Plan:
    settings = sf.settings
    allowed = {"kmax", "nmax", "samples", "sign_convention", "seed", "suites", "window_radius"}
    unknown = sorted(set(settings) - allowed)
    if unknown:
        raise UsageError(f"unknown plan settings: {', '.join(unknown)}")

    def setting(name: str, given: object, default: int) -> int:
        if given is not None:
            return int(given)  # type: ignore[arg-type]
        try:
            return int(settings.get(name, default))
        except ValueError:
            raise UsageError(f"plan.{name} must be an integer") from None

    convention = args.sign_convention or settings.get("sign_convention", "theorem")
    if convention not in SIGN_CONVENTIONS:
        raise UsageError(f"unknown sign convention {convention!r}")
    plan = Plan(
        seed=setting("seed", args.seed, 0),
        kmax=setting("kmax", args.kmax, 2),
        nmax=setting("nmax", args.nmax, 2),
        samples=setting("samples", args.samples, 20),
        convention=convention,
        window_radius=setting("window_radius", None, 1),
    )
    if min(plan.kmax, plan.nmax, plan.samples) < 0 or plan.window_radius < 1:
        raise UsageError("kmax, nmax and samples must be non-negative and window_radius positive")
    return plan


def _suites(sf: ScenarioFile, command: str, args: argparse.Namespace) -> tuple[str, ...]:
    base = COMMAND_SUITES.get(command, ())
    chosen = args.suites or sf.settings.get("suites")
    if not chosen or command != "report":
        return base
    names = tuple(s.strip() for s in chosen.split(",") if s.strip())
    bad = [s for s in names if s not in SUITES]
    if bad:
        raise UsageError(f"unknown suites: {', '.join(bad)} (known: {', '.join(SUITES)})")
    return tuple(s for s in SUITES if s in names)


def run(args: argparse.Namespace) -> tuple[dict, list[CheckRecord]]:
    """Execute one command; returns the report document and its check records."""
    sf = _load(args.scenario)
    plan = _plan(sf, args)
    cache = DiskCache(args.cache_dir, enabled=not args.no_cache)
    suites = _suites(sf, args.command, args)
    records = run_suites(sf, plan, suites, cache, args.jobs) if suites else []
    results: dict = {}
    if args.command == "validate":
        results["theta_identically_zero"] = theta_vanishes(sf, plan, cache)
    elif args.command == "dd-class":
        results["integrated_theta"] = dd_table(sf, plan, cache)
    elif args.command == "jlo-eval":
        results["tau"] = jlo_evaluate(sf, args)
    counts = {status: sum(r.status == status for r in records) for status in (PASS, FAIL, SKIP)}
    report = {
        "schema": SCHEMA,
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": args.command,
        "scenario": {"name": sf.name, "digest": sf.digest},
        "options": {
            "seed": plan.seed,
            "kmax": plan.kmax,
            "nmax": plan.nmax,
            "samples": plan.samples,
            "sign_convention": plan.convention,
            "suites": list(suites),
        },
        "checks": [r.to_json(timings=args.timings) for r in records],
        "results": results,
        "summary": {**counts, "ok": counts[FAIL] == 0},
    }
    return report, records


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _human(report: dict, records: list[CheckRecord], timings: bool) -> str:
    lines = [f"scenario {report['scenario']['name']} ({report['scenario']['digest'][:12]}), seed {report['options']['seed']}"]
    for r in records:
        lines.append(r.line() + (f" [{r.seconds:.2f}s]" if timings else ""))
    results = report["results"]
    if "theta_identically_zero" in results:
        lines.append(f"Theta identically zero: {'yes' if results['theta_identically_zero'] else 'no'}")
    for row in results.get("integrated_theta", []):
        mark = "ok" if row["equal"] else "MISMATCH"
        lines.append(f"I(Theta) at ({row['tuple']}) = {row['value']}  [expected {row['expected']}: {mark}]")
    if "tau" in results:
        tau = results["tau"]
        lines.append(f"tau({tau['omega']}) at ({tau['tuple']}), n={tau['n']}: {tau['value']}")
    s = report["summary"]
    lines.append(f"{s['pass']} passed, {s['fail']} failed, {s['skip']} skipped")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gerbejlo", description="Exact gerbe, Dixmier-Douady and JLO checks on torus translation groupoids.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help=f"scenario file, or a builtin name ({', '.join(BUILTIN_SCENARIOS)})")
    common.add_argument("--seed", type=int, help="sampling seed (default: plan.seed or 0)")
    common.add_argument("--kmax", type=int, help="largest group degree k sampled")
    common.add_argument("--nmax", type=int, help="largest cochain degree n sampled")
    common.add_argument("--samples", type=int, help="sample count per check (default: plan.samples or 20)")
    common.add_argument("--sign-convention", choices=sorted(SIGN_CONVENTIONS), help="sign of (b+uB) in the chain identity")
    common.add_argument("--json", metavar="PATH", help="write the JSON report to PATH ('-' for standard output)")
    common.add_argument("--timings", action="store_true", help="include per-check timings (reports stop being byte-stable)")
    common.add_argument("--cache-dir", metavar="DIR", help="memoization directory (default: $XDG_CACHE_HOME/gerbejlo)")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for independent suites")

    sub.add_parser("validate", parents=[common], help="cocycle, associativity, connection and curvature identities")
    sub.add_parser("dd-class", parents=[common], help="closed Theta and its integrals over the simplex")
    ev = sub.add_parser("jlo-eval", parents=[common], help="evaluate tau on given arguments")
    ev.add_argument("--tuple", default="", help="group tuple, elements separated by ';' and coordinates by ','")
    ev.add_argument("--entry", action="append", default=[], metavar="SLOT:ROW:COL:EXPR",
                    help="add the form EXPR at matrix position (ROW, COL) of argument SLOT (repeatable)")
    ev.add_argument("--unit", default="0", help="unit component of argument 0 (rational)")
    ev.add_argument("--omega", default="1", help="manifold form, extended constantly over the simplex")
    ev.add_argument("--window-radius", type=int, default=1, help="trace window for infinite groups")
    sub.add_parser("chain-check", parents=[common], help="JLO chain identity, morphism identities and the end-to-end composite")
    rep = sub.add_parser("report", parents=[common], help="every suite, as a JSON report")
    rep.add_argument("--suites", help=f"comma separated subset of {', '.join(SUITES)}")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "suites"):
        args.suites = None
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        report, records = run(args)
    except (UsageError, ScenarioError) as exc:
        print(f"gerbejlo: error: {exc}", file=sys.stderr)
        return 2
    text = render_json(report)
    target = args.json if args.json is not None else ("-" if args.command == "report" else None)
    if target == "-":
        sys.stdout.write(text)
    else:
        if target is not None:
            Path(target).write_text(text, encoding="utf-8")
        sys.stdout.write(_human(report, records, args.timings))
    return 0 if report["summary"]["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
