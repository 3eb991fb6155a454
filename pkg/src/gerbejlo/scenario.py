"""Scenario files: a key-value format with a small expression language.

A scenario file holds one ``key = value`` pair per line; ``#`` starts a
comment.  Recognised keys::

    name, dimension, order
    group.free_rank, group.torsion               (comma separated, may be empty)
    action.<i>.matrix, action.<i>.shift          (generator i, 1-based)
    omega                                        (expression in g / g1..gr)
    mu                                           (expression in g, h / g1.., h1..)
    mu.corrupt                                   ([g], [h], unit): deliberate defect
    plan.<setting>                               (test-plan defaults; the CLI accepts seed, kmax,
                                                 nmax, samples, sign_convention, suites, window_radius)

Expressions are parsed with :mod:`ast` and may use integer and rational
literals, group coordinates, ``zeta`` and its powers, Fourier monomials
``e(k_1, .., k_m)``, coordinate 1-forms ``dx1 .. dxm``, ``+ - * / ** % //``,
``pick(i, v_0, .., v_{r-1})`` (the entry i mod r) and, inside ``mu``,
``act_g(expr)`` for the pullback of expr along the action of g.
"""

from __future__ import annotations

import ast
import hashlib
from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction
from importlib import resources
from typing import Callable, Mapping, Union

from .exact import Scalar, field
from .forms import Form
from .gerbe import GerbeScenario, UnitFunction
from .groups import AbelianGroup, AffineMap, Element

__all__ = [
    "BUILTIN_SCENARIOS",
    "ScenarioError",
    "ScenarioFile",
    "builtin_scenario",
    "load_scenario_file",
    "parse_form",
    "parse_scenario",
    "serialize",
]

BUILTIN_SCENARIOS = ("trivial", "s1", "s1-corrupt", "sz", "s2")

Value = Union[int, Fraction, Scalar, Form]


class ScenarioError(ValueError):
    """A located problem in a scenario file (line and column are 1-based)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


# ---------------------------------------------------------------------------------
# expressions


@dataclass(frozen=True)
class Expression:
    """A parsed expression together with where its text starts in the file."""

    source: str
    tree: ast.Expression
    line: int
    column: int

    @classmethod
    def parse(cls, text: str, line: int, column: int) -> Expression:
        try:
            tree = ast.parse(text.strip(), mode="eval")
        except SyntaxError as exc:
            offset = (exc.offset or 1) - 1
            raise ScenarioError(f"syntax error: {exc.msg}", line, column + offset) from None
        for node in ast.walk(tree):
            if not isinstance(node, _ALLOWED_NODES):
                raise ScenarioError(f"unsupported syntax {type(node).__name__}", line, column + getattr(node, "col_offset", 0))
            if isinstance(node, ast.Constant) and (isinstance(node.value, bool) or not isinstance(node.value, int)):
                raise ScenarioError(f"only integer literals are allowed, got {node.value!r}", line, column + node.col_offset)
        return cls(ast.unparse(tree), tree, line, column)

    def error(self, node: ast.AST, message: str) -> ScenarioError:
        return ScenarioError(message, self.line, self.column + getattr(node, "col_offset", 0))


_ALLOWED_NODES = (
    ast.Expression,
    ast.BinOp,
    ast.UnaryOp,
    ast.Constant,
    ast.Name,
    ast.Call,
    ast.List,
    ast.Tuple,
    ast.Load,
    ast.Add,
    ast.Sub,
    ast.Mult,
    ast.Div,
    ast.Pow,
    ast.Mod,
    ast.FloorDiv,
    ast.USub,
    ast.UAdd,
)


class _Evaluator:
    """Evaluates an Expression to an int, Fraction, Scalar, Form or list thereof."""

    def __init__(
        self,
        expr: Expression,
        m: int,
        order: int,
        names: Mapping[str, Value],
        act: Callable[[Form], Form] | None = None,
    ) -> None:
        self.expr = expr
        self.m = m
        self.order = order
        self.names = dict(names)
        self.act = act
        fld = field(order)
        self.names.setdefault("zeta", fld.zeta_power(1))
        for j in range(1, m + 1):
            self.names.setdefault(f"dx{j}", Form.monomial(m, 0, order, 1, dx=[j]))

    def run(self) -> object:
        return self.visit(self.expr.tree.body)

    # -- coercions --------------------------------------------------------------
    def _scalar(self, v: Value) -> Scalar:
        return v if isinstance(v, Scalar) else field(self.order).from_rational(v)  # type: ignore[arg-type]

    def _form(self, v: Value) -> Form:
        return v if isinstance(v, Form) else Form.constant(self._scalar(v), self.m, 0, self.order)

    def _integer(self, node: ast.AST, v: object) -> int:
        if isinstance(v, Scalar) and v.is_rational():
            v = v.rational()
        if isinstance(v, Fraction) and v.denominator == 1:
            v = int(v)
        if not isinstance(v, int):
            raise self.expr.error(node, f"expected an integer, got {v!r}")
        return v

    # -- nodes ------------------------------------------------------------------
    def visit(self, node: ast.AST) -> object:
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in self.names:
                raise self.expr.error(node, f"unknown name {node.id!r}")
            return self.names[node.id]
        if isinstance(node, (ast.List, ast.Tuple)):
            return [self.visit(x) for x in node.elts]
        if isinstance(node, ast.UnaryOp):
            v = self.visit(node.operand)
            return -v if isinstance(node.op, ast.USub) else v  # type: ignore[operator]
        if isinstance(node, ast.BinOp):
            return self._binop(node, self.visit(node.left), self.visit(node.right))
        if isinstance(node, ast.Call):
            return self._call(node)
        raise self.expr.error(node, f"unsupported syntax {type(node).__name__}")

    def _binop(self, node: ast.BinOp, a: object, b: object) -> object:
        op = node.op
        if isinstance(a, list) or isinstance(b, list):
            raise self.expr.error(node, "arithmetic on lists is not supported")
        numeric = (int, Fraction)
        if isinstance(op, (ast.Mod, ast.FloorDiv)):
            x, y = self._integer(node.left, a), self._integer(node.right, b)
            if y == 0:
                raise self.expr.error(node, "division by zero")
            return x % y if isinstance(op, ast.Mod) else x // y
        if isinstance(op, ast.Pow):
            n = self._integer(node.right, b)
            if isinstance(a, Form):
                if n < 0:
                    return self._form_power(self._invert_unit(node, a), -n)
                return self._form_power(a, n)
            if isinstance(a, numeric):
                if a == 0 and n < 0:
                    raise self.expr.error(node, "division by zero")
                return Fraction(a) ** n
            return a ** n  # type: ignore[operator]
        if isinstance(a, numeric) and isinstance(b, numeric):
            if isinstance(op, ast.Add):
                return a + b
            if isinstance(op, ast.Sub):
                return a - b
            if isinstance(op, ast.Mult):
                return a * b
            if b == 0:
                raise self.expr.error(node, "division by zero")
            out = Fraction(a) / Fraction(b)
            return int(out) if out.denominator == 1 else out
        if isinstance(a, Form) or isinstance(b, Form):
            if isinstance(op, ast.Div):
                if isinstance(b, Form):
                    return self._form(a) * self._invert_unit(node, b)
                s = self._scalar(b)
                if not s:
                    raise self.expr.error(node, "division by zero")
                return a.scale(s.inv())  # type: ignore[union-attr]
            fa, fb = self._form(a), self._form(b)
            if isinstance(op, ast.Add):
                return fa + fb
            if isinstance(op, ast.Sub):
                return fa - fb
            return fa.wedge(fb)
        sa, sb = self._scalar(a), self._scalar(b)  # type: ignore[arg-type]
        if isinstance(op, ast.Add):
            return sa + sb
        if isinstance(op, ast.Sub):
            return sa - sb
        if isinstance(op, ast.Mult):
            return sa * sb
        if not sb:
            raise self.expr.error(node, "division by zero")
        return sa / sb

    def _form_power(self, f: Form, n: int) -> Form:
        out = Form.constant(1, self.m, 0, self.order)
        for _ in range(n):
            out = out.wedge(f)
        return out

    def _invert_unit(self, node: ast.AST, f: Form) -> Form:
        unit = _as_unit(f)
        if unit is None:
            raise self.expr.error(node, "only unit monomials c*e(k) can be inverted")
        return unit.inverse().form(self.m)

    def _call(self, node: ast.Call) -> object:
        if not isinstance(node.func, ast.Name) or node.keywords:
            raise self.expr.error(node, "only plain calls of e, pick and act_g are allowed")
        name = node.func.id
        if name == "e":
            ks = [self._integer(a, self.visit(a)) for a in node.args]
            if len(ks) != self.m:
                raise self.expr.error(node, f"e(...) needs {self.m} Fourier indices, got {len(ks)}")
            return Form.monomial(self.m, 0, self.order, 1, fourier=ks)
        if name == "pick":
            if len(node.args) < 2:
                raise self.expr.error(node, "pick(i, v_0, ...) needs at least one value")
            i = self._integer(node.args[0], self.visit(node.args[0]))
            choices = node.args[1:]
            return self.visit(choices[i % len(choices)])
        if name == "act_g":
            if self.act is None:
                raise self.expr.error(node, "act_g is only available inside mu")
            if len(node.args) != 1:
                raise self.expr.error(node, "act_g takes one argument")
            return self.act(self._form(self.visit(node.args[0])))  # type: ignore[arg-type]
        raise self.expr.error(node, f"unknown function {name!r}")


def _as_unit(f: Form) -> UnitFunction | None:
    if len(f.terms) != 1:
        return None
    ((u, four, texp, mask), coeff), = f.terms.items()
    if u or mask or any(texp):
        return None
    return UnitFunction(coeff, four)


def _coordinate_names(prefix: str, g: Element) -> dict[str, int]:
    names = {f"{prefix}{i}": c for i, c in enumerate(g, start=1)}
    if len(g) == 1:
        names[prefix] = g[0]
    return names


# ---------------------------------------------------------------------------------
# the file


@dataclass(frozen=True)
class Corruption:
    """Multiply mu(g, h) by ``factor`` at a single pair."""

    g: Element
    h: Element
    factor: Expression

    def text(self) -> str:
        return f"{list(self.g)}, {list(self.h)}, {self.factor.source}"


@dataclass(frozen=True, eq=False)
class ScenarioFile:
    name: str
    dimension: int
    order: int
    free_rank: int
    torsion: tuple[int, ...]
    actions: tuple[AffineMap, ...]
    omega: Expression
    mu: Expression
    corruption: Corruption | None = None
    plan: tuple[tuple[str, str], ...] = ()
    lines: Mapping[str, int] = dc_field(default_factory=dict, repr=False)

    def _key(self) -> tuple:
        corrupt = None if self.corruption is None else self.corruption.text()
        return (
            self.name,
            self.dimension,
            self.order,
            self.free_rank,
            self.torsion,
            self.actions,
            self.omega.source,
            self.mu.source,
            corrupt,
            self.plan,
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ScenarioFile) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    @property
    def digest(self) -> str:
        return hashlib.sha256(serialize(self).encode()).hexdigest()

    @property
    def settings(self) -> dict[str, str]:
        return dict(self.plan)

    def group(self) -> AbelianGroup:
        return AbelianGroup(self.free_rank, self.torsion, self.dimension, self.actions)

    def build(self, corrupted: bool = True) -> GerbeScenario:
        """The GerbeScenario; ``corrupted=False`` ignores a declared corruption."""
        grp = self.group()
        m, order = self.dimension, self.order
        omega_expr, mu_expr = self.omega, self.mu

        def omega_rule(g: Element) -> Form:
            value = _Evaluator(omega_expr, m, order, _coordinate_names("g", g)).run()
            if isinstance(value, list):
                raise omega_expr.error(omega_expr.tree.body, "omega must be a form, not a list")
            return value if isinstance(value, Form) else Form.constant(value, m, 0, order)  # type: ignore[arg-type]

        scenario = GerbeScenario(m, order, grp, omega_rule, lambda g, h: UnitFunction(field(order).one, (0,) * m), self.name)

        def unit_at(expr: Expression, g: Element, h: Element) -> UnitFunction:
            names = {**_coordinate_names("g", g), **_coordinate_names("h", h)}
            value = _Evaluator(expr, m, order, names, act=lambda f: scenario.act(g, f)).run()
            if isinstance(value, list):
                raise expr.error(expr.tree.body, "mu must be a unit monomial, not a list")
            form = value if isinstance(value, Form) else Form.constant(value, m, 0, order)  # type: ignore[arg-type]
            unit = _as_unit(form)
            if unit is None:
                raise expr.error(expr.tree.body, f"mu({g}, {h}) is not a unit monomial c*e(k): {form!r}")
            return unit

        corruption = self.corruption if corrupted else None

        def mu_rule(g: Element, h: Element) -> UnitFunction:
            unit = unit_at(mu_expr, g, h)
            if corruption is not None and (g, h) == (corruption.g, corruption.h):
                unit = unit * unit_at(corruption.factor, g, h)
            return unit

        scenario.mu_rule = mu_rule
        return scenario


def _parse_int(text: str, line: int, column: int, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ScenarioError(f"{key} must be an integer, got {text!r}", line, column) from None


def _rational_list(value: object, expr: Expression, what: str) -> list[Fraction]:
    if not isinstance(value, list):
        raise expr.error(expr.tree.body, f"{what} must be a list")
    out = []
    for x in value:
        if isinstance(x, Scalar) and x.is_rational():
            x = x.rational()
        if not isinstance(x, (int, Fraction)):
            raise expr.error(expr.tree.body, f"{what} entries must be rational numbers")
        out.append(Fraction(x))
    return out


def _literal(text: str, line: int, column: int, m: int, order: int) -> tuple[object, Expression]:
    expr = Expression.parse(text, line, column)
    return _Evaluator(expr, m, max(order, 1), {}).run(), expr


def parse_form(text: str, m: int, order: int) -> Form:
    """A level-0 form written in the expression grammar (no group variables)."""
    value, expr = _literal(text, 1, 1, m, order)
    if isinstance(value, list):
        raise expr.error(expr.tree.body, "expected a form, not a list")
    return value if isinstance(value, Form) else Form.constant(value, m, 0, order)  # type: ignore[arg-type]


def load_scenario_file(text: str, check: bool = True) -> ScenarioFile:
    """Parse ``text`` into a ScenarioFile; ``check`` runs the semantic validation."""
    raw: dict[str, tuple[str, int, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            raise ScenarioError("expected 'key = value'", lineno, len(body) - len(body.lstrip()) + 1)
        key_text, value_text = body.split("=", 1)
        key = key_text.strip()
        if not key:
            raise ScenarioError("missing key", lineno, 1)
        if key in raw:
            raise ScenarioError(f"duplicate key {key!r} (first on line {raw[key][1]})", lineno, 1)
        column = len(key_text) + 2 + (len(value_text) - len(value_text.lstrip()))
        raw[key] = (value_text.strip(), lineno, column)

    def need(key: str) -> tuple[str, int, int]:
        if key not in raw:
            raise ScenarioError(f"missing required key {key!r}")
        return raw[key]

    known = {"name", "dimension", "order", "group.free_rank", "group.torsion", "omega", "mu", "mu.corrupt"}
    for key, (_, lineno, _) in raw.items():
        if key in known or key.startswith("plan.") or key.startswith("action."):
            continue
        raise ScenarioError(f"unknown key {key!r}", lineno, 1)

    name = raw.get("name", ("scenario", 0, 0))[0]
    dim_text, dim_line, dim_col = need("dimension")
    m = _parse_int(dim_text, dim_line, dim_col, "dimension")
    if m < 1:
        raise ScenarioError("dimension must be at least 1", dim_line, dim_col)
    order_text, order_line, order_col = need("order")
    order = _parse_int(order_text, order_line, order_col, "order")
    if order < 1:
        raise ScenarioError("order must be at least 1", order_line, order_col)
    free_text, free_line, free_col = raw.get("group.free_rank", ("0", 0, 0))
    free_rank = _parse_int(free_text, free_line, free_col, "group.free_rank")
    tors_text, tors_line, tors_col = raw.get("group.torsion", ("", 0, 0))
    torsion = tuple(_parse_int(x.strip(), tors_line, tors_col, "group.torsion") for x in tors_text.split(",") if x.strip())
    if free_rank < 0 or any(n < 1 for n in torsion):
        raise ScenarioError("invalid group presentation", tors_line or free_line or None)
    rank = free_rank + len(torsion)

    lines: dict[str, int] = {key: v[1] for key, v in raw.items()}
    actions = []
    for i in range(1, rank + 1):
        matrix: tuple[tuple[int, ...], ...] = tuple(tuple(int(r == c) for c in range(m)) for r in range(m))
        shift: tuple[Fraction, ...] = (Fraction(0),) * m
        if f"action.{i}.matrix" in raw:
            text_, ln, col = raw[f"action.{i}.matrix"]
            value, expr = _literal(text_, ln, col, m, order)
            if not isinstance(value, list) or len(value) != m:
                raise expr.error(expr.tree.body, f"action.{i}.matrix must be an {m}x{m} integer matrix")
            rows = []
            for row in value:
                entries = _rational_list(row, expr, f"action.{i}.matrix")
                if len(entries) != m or any(x.denominator != 1 for x in entries):
                    raise expr.error(expr.tree.body, f"action.{i}.matrix must be an {m}x{m} integer matrix")
                rows.append(tuple(int(x) for x in entries))
            matrix = tuple(rows)
        if f"action.{i}.shift" in raw:
            text_, ln, col = raw[f"action.{i}.shift"]
            value, expr = _literal(text_, ln, col, m, order)
            entries = _rational_list(value, expr, f"action.{i}.shift")
            if len(entries) != m:
                raise expr.error(expr.tree.body, f"action.{i}.shift needs {m} entries")
            for x in entries:
                if (x * order).denominator != 1:
                    raise ScenarioError(f"translation {x} is not in (1/{order})Z; the order must be a multiple of {x.denominator}", ln, col)
            shift = tuple(x % 1 for x in entries)
        actions.append(AffineMap(matrix, shift))
    for key, (_, ln, _) in raw.items():
        if key.startswith("action."):
            parts = key.split(".")
            if len(parts) != 3 or parts[2] not in ("matrix", "shift") or not parts[1].isdigit() or not 1 <= int(parts[1]) <= rank:
                raise ScenarioError(f"unknown key {key!r}", ln, 1)

    omega_expr = Expression.parse(*need("omega"))
    mu_expr = Expression.parse(*raw.get("mu", ("1", 0, 0)))
    corruption = None
    if "mu.corrupt" in raw:
        text_, ln, col = raw["mu.corrupt"]
        expr = Expression.parse(text_, ln, col)
        body = expr.tree.body
        if not isinstance(body, ast.Tuple) or len(body.elts) != 3:
            raise ScenarioError("mu.corrupt must read [g], [h], factor", ln, col)
        ev = _Evaluator(expr, m, order, {})
        g = tuple(int(x) for x in _rational_list(ev.visit(body.elts[0]), expr, "mu.corrupt"))
        h = tuple(int(x) for x in _rational_list(ev.visit(body.elts[1]), expr, "mu.corrupt"))
        if len(g) != rank or len(h) != rank:
            raise ScenarioError(f"mu.corrupt group elements need {rank} coordinates", ln, col)
        factor_text = ast.unparse(body.elts[2])
        factor = Expression.parse(factor_text, ln, col + body.elts[2].col_offset)
        corruption = Corruption(g, h, factor)

    plan = tuple(sorted((key[len("plan."):], v[0]) for key, v in raw.items() if key.startswith("plan.")))
    sf = ScenarioFile(name, m, order, free_rank, torsion, tuple(actions), omega_expr, mu_expr, corruption, plan, lines)
    if check:
        validate_file(sf)
    return sf


def validate_file(sf: ScenarioFile) -> None:
    """Semantic checks: admissible action, omega a 1-form vanishing at 1, mu a normalized cocycle.

    A declared corruption is exempt: the uncorrupted mu is checked instead.
    """
    grp = sf.group()
    try:
        grp.validate_action(sf.order)
    except ValueError as exc:
        line = next((ln for key, ln in sf.lines.items() if key.startswith("action.")), None)
        raise ScenarioError(str(exc), line) from None
    scenario = sf.build(corrupted=False)
    pool = list(grp.elements(1))
    for g in pool:
        try:
            scenario.omega(g)
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(f"omega: {exc}", sf.omega.line, sf.omega.column) from None
    problems = scenario.validate(pool)
    if problems:
        key = "omega" if problems[0].startswith("omega") else "mu"
        expr = sf.omega if key == "omega" else sf.mu
        raise ScenarioError(problems[0], expr.line or None, expr.column or None)
    if sf.corruption is not None:
        c = sf.corruption
        for g in (c.g, c.h):
            if grp.reduce(g) != g:
                raise ScenarioError(f"mu.corrupt: {g} is not a reduced group element", sf.lines.get("mu.corrupt"))


def parse_scenario(text: str) -> GerbeScenario:
    """Parse and validate a scenario file into a GerbeScenario."""
    return load_scenario_file(text).build()


def _fraction_text(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def serialize(sf: ScenarioFile) -> str:
    """Canonical text: parses back to an equal ScenarioFile."""
    out = [
        f"name = {sf.name}",
        f"dimension = {sf.dimension}",
        f"order = {sf.order}",
        f"group.free_rank = {sf.free_rank}",
        f"group.torsion = {', '.join(str(n) for n in sf.torsion)}",
    ]
    for i, a in enumerate(sf.actions, start=1):
        rows = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in a.matrix)
        out.append(f"action.{i}.matrix = [{rows}]")
        out.append(f"action.{i}.shift = [{', '.join(_fraction_text(x) for x in a.shift)}]")
    out.append(f"omega = {sf.omega.source}")
    out.append(f"mu = {sf.mu.source}")
    if sf.corruption is not None:
        out.append(f"mu.corrupt = {sf.corruption.text()}")
    for key, value in sf.plan:
        out.append(f"plan.{key} = {value}")
    return "\n".join(out) + "\n"


def builtin_text(name: str) -> str:
    if name not in BUILTIN_SCENARIOS:
        raise KeyError(f"unknown builtin scenario {name!r}; choose from {', '.join(BUILTIN_SCENARIOS)}")
    return resources.files("gerbejlo").joinpath("scenarios").joinpath(f"{name}.scn").read_text(encoding="utf-8")


def builtin_scenario(name: str) -> ScenarioFile:
    return load_scenario_file(builtin_text(name))


def with_corruption(sf: ScenarioFile, g: Element, h: Element, factor: str) -> ScenarioFile:
    """A copy of ``sf`` whose mu is multiplied by ``factor`` at the pair (g, h)."""
    return replace(sf, corruption=Corruption(g, h, Expression.parse(factor, 0, 0)), name=f"{sf.name}-corrupt")
