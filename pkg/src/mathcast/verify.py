"""Numeric evaluation and sampling-based verification of equations.

``evaluate`` walks a resolved tree; ``evaluate_text`` reads the SymPyText
translation of a tree with Python's ``ast`` module.  The two routes share the
numeric function table but nothing else, so agreement between them checks the
translator.  ``numeric_verify`` samples the free variables of an equation and
classifies it as Verified, Failed or Inconclusive.
"""

from __future__ import annotations

import ast
import itertools
import json
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, Mapping

from . import numeric
from .cas_translate import canonical_target, translate
from .errors import (EvaluationError, NotAnEquation, PoleOrSingularity, UnboundSymbol,
                     UnknownFunction)
from .expr import (BIG_OPERATORS, Ambiguous, BinaryOp, Constant, FunctionApply, Group, Identifier,
                   MacroCall, MathExpr, Number, Relation, Sequence, UnaryOp, is_macro_ref,
                   is_symbol, symbol_key, var_name, walk)
from .lexicon import AvoidPoles, Constraint, ContentDictionary, Custom, Domain

PASS_TOLERANCE = 1e-10
FAIL_THRESHOLD = 1e-4
MAX_SERIES_TERMS = 100_000

# -- evaluation of trees ------------------------------------------------------------


def _number(text: str):
    return int(text) if text.isdigit() else float(text)


def _divide(a, b, eps: float):
    if abs(b) <= eps:
        raise PoleOrSingularity("division by zero")
    if numeric.is_exact(a, b):
        q = Fraction(a) / Fraction(b)
        return int(q) if q.denominator == 1 else q
    return a / b


def _power(a, b, eps: float):
    if numeric.is_real(b) and numeric.real(b) == int(numeric.real(b)) and abs(numeric.real(b)) <= 1024:
        k = int(numeric.real(b))
        if k < 0:
            if abs(a) <= eps:
                raise PoleOrSingularity("zero to a negative power")
            if isinstance(a, int):
                return Fraction(1, a ** -k)
        return a ** k
    if numeric.is_real(a) and numeric.real(a) > 0 and numeric.is_real(b):
        return numeric.real(a) ** numeric.real(b)
    if a == 0:
        if numeric.real(b) > 0:
            return 0.0
        raise PoleOrSingularity("zero to a non-positive power")
    return complex(a) ** complex(b)


def _clean(value):
    # rationals stay exact until the final result
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    if isinstance(value, complex) and value.imag == 0:
        return value.real
    return value


class _Evaluator:
    def __init__(self, assignment: Mapping[str, complex], eps: float):
        self.env = dict(assignment)
        self.eps = eps

    def ev(self, e: MathExpr):
        return _clean(self._ev(e))

    def _ev(self, e: MathExpr):
        if isinstance(e, Number):
            return _number(e.value)
        if isinstance(e, Identifier):
            name = var_name(e)
            if name not in self.env:
                raise UnboundSymbol(name)
            return self.env[name]
        if isinstance(e, Constant):
            if e.name == "pi":
                return math.pi
            raise UnboundSymbol("\\" + e.name)
        if isinstance(e, Group):
            return self.ev(e.child)
        if isinstance(e, UnaryOp):
            v = self.ev(e.operand)
            return -v if e.op == "-" else v
        if isinstance(e, BinaryOp):
            a, b = self.ev(e.left), self.ev(e.right)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op in ("*", "\\cdot"):
                return a * b
            if e.op == "/":
                return _divide(a, b, self.eps)
            if e.op == "^":
                return _power(a, b, self.eps)
            raise EvaluationError(f"unknown operator {e.op!r}")
        if isinstance(e, FunctionApply):
            if not is_macro_ref(e.head):
                raise UnboundSymbol(symbol_key(e.head) or "function head")
            return self.call(e.head.name, [self.ev(a) for a in e.args])
        if isinstance(e, MacroCall):
            return self.macro(e)
        if isinstance(e, Ambiguous):
            head = next((i.head for i in e.interpretations if isinstance(i, FunctionApply)), None)
            raise UnboundSymbol(symbol_key(head) or "ambiguous juxtaposition")
        if isinstance(e, (Relation, Sequence)):
            raise EvaluationError(f"{type(e).__name__} has no numeric value")
        raise TypeError(f"not a MathExpr: {e!r}")

    def call(self, name: str, args: list):
        entry = numeric.FUNCTIONS.get(name)
        if entry is None:
            raise UnknownFunction(name)
        arity, fn = entry
        if arity != len(args):
            raise EvaluationError(f"{name} takes {arity} argument(s), got {len(args)}")
        return fn(*args, eps=self.eps)

    def macro(self, e: MacroCall):
        name, args = e.name, e.args
        if name in ("frac", "tfrac") and len(args) == 2:
            return _divide(self.ev(args[0]), self.ev(args[1]), self.eps)
        if name == "sqrt" and len(args) == 1:
            return numeric.sqrt(self.ev(args[0]))
        if name == "sqrt" and len(args) == 2:
            return _power(self.ev(args[0]), _divide(1, self.ev(args[1]), self.eps), self.eps)
        if name in ("sum", "prod") and len(args) == 3:
            lower = args[0]
            if not (isinstance(lower, Relation) and lower.rel == "=" and isinstance(lower.left, Identifier)):
                raise EvaluationError(f"\\{name} needs a lower limit of the form k=a")
            start = numeric.as_int(self.ev(lower.right), f"\\{name} lower limit")
            stop = numeric.as_int(self.ev(args[1]), f"\\{name} upper limit")
            return self.series(name, var_name(lower.left), start, stop, lambda: self.ev(args[2]))
        if name == "int":
            raise UnknownFunction("int")
        raise UnknownFunction(name)

    def series(self, kind: str, var: str, start: int, stop: int, body):
        if stop - start + 1 > MAX_SERIES_TERMS:
            raise EvaluationError(f"series with more than {MAX_SERIES_TERMS} terms")
        saved = self.env.get(var, _MISSING)
        total = 0 if kind == "sum" else 1
        try:
            for k in range(start, stop + 1):
                self.env[var] = k
                total = total + body() if kind == "sum" else total * body()
        finally:
            if saved is _MISSING:
                self.env.pop(var, None)
            else:
                self.env[var] = saved
        return total


_MISSING = object()


def evaluate(expr: MathExpr, assignment: Mapping[str, complex] | None = None,
             pole_epsilon: float = 1e-12, exact: bool = False):
    """Numeric value of ``expr``; variables are keyed by :func:`var_name` (``x``, ``E_n``).

    Integer and rational arithmetic is carried out exactly; the result is an
    int, float or complex unless ``exact`` asks for the unrounded Fraction.
    """
    value = _Evaluator(assignment or {}, pole_epsilon).ev(expr)
    return value if exact else numeric.simplify(value)


# -- evaluation of SymPyText ------------------------------------------------------------

#: SymPy function name -> macro name in the numeric table (by arity when overloaded).
SYMPY_FUNCTIONS = {
    "sin": "sin", "cos": "cos", "tan": "tan", "cot": "cot", "sec": "sec", "csc": "csc",
    "sinh": "sinh", "cosh": "cosh", "tanh": "tanh", "asin": "arcsin", "acos": "arccos",
    "atan": "arctan", "exp": "exp", "log": "ln", "sqrt": "sqrt", "Abs": "abs",
    "gamma": "Gamma", "digamma": "digamma", "primepi": "nprimes",
    "euler": {1: "EulerNumber", 2: "EulerE"}, "bernoulli": {1: "BernoulliB", 2: "BernoulliPoly"},
    "legendre": "LegendrepolyP", "chebyshevt": "ChebyshevpolyT", "hermite": "HermitepolyH",
    "besselj": "BesselJ", "zeta": "Riemannzeta", "erf": "erf", "factorial": "factorial",
    "binomial": "binomial", "Heaviside": "Heaviside", "LambertW": "LambertW",
}
SYMPY_CONSTANTS = {"pi": math.pi, "E": math.e, "EulerGamma": numeric.EULER_GAMMA,
                   "GoldenRatio": numeric.GOLDEN_RATIO, "I": 1j}


class _TextEvaluator(_Evaluator):
    def text(self, node: ast.AST):
        return _clean(self._node(node))

    def _node(self, node: ast.AST):
        if isinstance(node, ast.Expression):
            return self.text(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name):
            if node.id in self.env:
                return self.env[node.id]
            if node.id in SYMPY_CONSTANTS:
                return SYMPY_CONSTANTS[node.id]
            raise UnboundSymbol(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = self.text(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a, b = self.text(node.left), self.text(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return _divide(a, b, self.eps)
            if isinstance(node.op, ast.Pow):
                return _power(a, b, self.eps)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
            return self.text_call(node.func.id, node.args)
        raise EvaluationError(f"unsupported SymPyText construct: {ast.dump(node)[:60]}")

    def text_call(self, name: str, args: list):
        if name in ("summation", "product") and len(args) == 2 and isinstance(args[1], ast.Tuple):
            var, lo, hi = args[1].elts
            if not isinstance(var, ast.Name):
                raise EvaluationError("series variable must be a name")
            start = numeric.as_int(self.text(lo), name)
            stop = numeric.as_int(self.text(hi), name)
            kind = "sum" if name == "summation" else "prod"
            return self.series(kind, var.id, start, stop, lambda: self.text(args[0]))
        if name == "jacobi" and len(args) == 4:
            n, a, b, x = (self.text(v) for v in args)
            return self.call("JacobipolyP", [a, b, n, x])
        if name == "jtheta" and len(args) == 3:
            kind, z, q = (self.text(v) for v in args)
            if kind != 1:
                raise UnknownFunction(f"jtheta({kind}, ...)")
            return self.call("Jacobitheta", [z, q])
        target = SYMPY_FUNCTIONS.get(name)
        if isinstance(target, dict):
            target = target.get(len(args))
        if target is None:
            raise UnknownFunction(name)
        return self.call(target, [self.text(v) for v in args])


def evaluate_text(text: str, assignment: Mapping[str, complex] | None = None,
                  pole_epsilon: float = 1e-12):
    """Evaluate a SymPyText expression string without importing any CAS."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise EvaluationError(f"not a SymPyText expression: {exc.msg}") from None
    return numeric.simplify(_TextEvaluator(assignment or {}, pole_epsilon).text(tree))


# -- sampling -------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplingConfig:
    points_per_variable: int = 10
    real_range: tuple[float, float] = (0.1, 0.9)
    integer_range: tuple[int, int] = (1, 10)
    seed: int = 0
    pole_epsilon: float = 1e-6

    def __post_init__(self):
        if self.points_per_variable < 1:
            raise ValueError("points_per_variable must be at least 1")
        if not self.real_range[0] <= self.real_range[1]:
            raise ValueError("real_range is empty")
        if not self.integer_range[0] <= self.integer_range[1]:
            raise ValueError("integer_range is empty")
        if not self.pole_epsilon > 0:
            raise ValueError("pole_epsilon must be positive")

    def to_json(self) -> dict:
        return {"points_per_variable": self.points_per_variable,
                "real_range": list(self.real_range), "integer_range": list(self.integer_range),
                "seed": self.seed, "pole_epsilon": self.pole_epsilon}


def free_variables(expr: MathExpr) -> list[str]:
    """Variable names in order of first appearance; series indices are bound."""
    seen: dict[str, None] = {}

    def visit(e: MathExpr, bound: frozenset):
        if isinstance(e, Identifier):
            name = var_name(e)
            if name not in bound:
                seen.setdefault(name)
            return
        if isinstance(e, MacroCall) and e.name in ("sum", "prod") and len(e.args) == 3 \
                and isinstance(e.args[0], Relation) and isinstance(e.args[0].left, Identifier):
            visit(e.args[0].right, bound)
            visit(e.args[1], bound)
            visit(e.args[2], bound | {var_name(e.args[0].left)})
            return
        if isinstance(e, FunctionApply) and not is_macro_ref(e.head):
            for a in e.args:
                visit(a, bound)
            return
        from .expr import children
        for c in children(e):
            visit(c, bound)

    visit(expr, frozenset())
    return list(seen)


def _domains(constraints: Iterable[Constraint]) -> dict[str, list[Domain]]:
    out: dict[str, list[Domain]] = {}
    for c in constraints:
        if isinstance(c, Domain):
            out.setdefault(c.applies_to, []).append(c)
    return out


def sample_values(name: str, domains: list[Domain], config: SamplingConfig) -> list:
    """Sample points for one variable; a larger ``points_per_variable`` extends the list."""
    rng = random.Random(f"{config.seed}:{name}")
    if any(d.integer for d in domains):
        lo, hi = config.integer_range
        explicit_lo = [d.lo for d in domains if d.lo is not None]
        explicit_hi = [d.hi for d in domains if d.hi is not None]
        lo = math.ceil(max(explicit_lo)) if explicit_lo else lo
        hi = math.floor(min(explicit_hi)) if explicit_hi else hi
        if hi < lo:
            hi = lo + (config.integer_range[1] - config.integer_range[0])
        values = list(range(lo, hi + 1))
        values = [v for v in values if all(d.contains(v) for d in domains)]
        rng.shuffle(values)
        return sorted(values[:config.points_per_variable])
    lo, hi = config.real_range
    for d in domains:
        if d.lo is not None:
            lo = max(lo, d.lo)
        if d.hi is not None:
            hi = min(hi, d.hi)
    if hi < lo:
        lo = max(d.lo for d in domains if d.lo is not None) if any(d.lo is not None for d in domains) else hi - 1
        hi = lo + (config.real_range[1] - config.real_range[0])
    return [rng.uniform(lo, hi) for _ in range(config.points_per_variable)]


def sample_points(variables: list[str], constraints: Iterable[Constraint],
                  config: SamplingConfig) -> list[dict]:
    domains = _domains(constraints)
    axes = [sample_values(v, domains.get(v, []), config) for v in variables]
    return [dict(zip(variables, combo)) for combo in itertools.product(*axes)]


# -- verification reports ---------------------------------------------------------------


@dataclass(frozen=True)
class Reason:
    kind: str    # UnboundSymbol | ConstraintUnsupported | EvaluationError
    detail: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "detail": self.detail}


@dataclass(frozen=True)
class VerificationReport:
    id: str
    outcome: str    # Verified | Failed | Inconclusive
    samples_tested: int
    max_residual: float
    reasons: tuple[Reason, ...] = ()
    counterexample: dict | None = field(default=None, hash=False)

    def to_json(self) -> dict:
        return {"id": self.id, "outcome": self.outcome, "samples_tested": self.samples_tested,
                "max_residual": self.max_residual, "reasons": [r.to_json() for r in self.reasons],
                "counterexample": self.counterexample}


def residual(lhs, rhs) -> float:
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def static_reasons(expr: MathExpr, constraints: Iterable[Constraint]) -> list[Reason]:
    """Reasons known before sampling: unbound macros and unsupported constraints."""
    reasons: list[Reason] = []

    def add(kind, detail):
        r = Reason(kind, detail)
        if r not in reasons:
            reasons.append(r)

    for node in walk(expr):
        if isinstance(node, Ambiguous):
            head = next((i.head for i in node.interpretations if isinstance(i, FunctionApply)), None)
            add("UnboundSymbol", symbol_key(head) or "ambiguous juxtaposition")
        elif isinstance(node, FunctionApply):
            if is_macro_ref(node.head):
                if node.head.name not in numeric.FUNCTIONS:
                    add("UnboundSymbol", "\\" + node.head.name)
            elif is_symbol(node.head):
                add("UnboundSymbol", symbol_key(node.head))
        elif isinstance(node, MacroCall) and node.args:
            if node.name not in ("frac", "tfrac", "sqrt", "sum", "prod", "int"):
                add("UnboundSymbol", "\\" + node.name)
            elif node.name == "int":
                add("EvaluationError", "integrals are not evaluated numerically")
        elif isinstance(node, MacroCall) and node.name not in numeric.FUNCTIONS:
            add("UnboundSymbol", "\\" + node.name)
        elif isinstance(node, Constant) and node.name != "pi":
            add("UnboundSymbol", "\\" + node.name)
    variables = set(free_variables(expr))
    for c in constraints:
        if isinstance(c, Custom):
            add("ConstraintUnsupported", f"{c.applies_to}: {c.text}")
        elif isinstance(c, Domain) and c.applies_to not in variables:
            add("ConstraintUnsupported", f"domain restriction on {c.applies_to}")
    return reasons


def _json_number(v):
    if isinstance(v, complex):
        return [v.real, v.imag] if v.imag else v.real
    if isinstance(v, Fraction):
        return float(v)
    return v


def numeric_verify(equation: MathExpr, constraints: Iterable[Constraint] = (),
                   config: SamplingConfig | None = None, equation_id: str = "") -> VerificationReport:
    """Sample the free variables and classify the equation.

    Verified when every residual is below ``PASS_TOLERANCE``, Failed when one
    exceeds ``FAIL_THRESHOLD``, Inconclusive otherwise or whenever something
    prevents a decision (unbound macros, unsupported constraints, evaluation
    errors, no usable sample).  Samples that land on a pole are skipped.
    """
    config = config or SamplingConfig()
    if not (isinstance(equation, Relation) and equation.rel == "="):
        raise NotAnEquation("expected a top-level equality")
    constraints = tuple(constraints)
    reasons = static_reasons(equation, constraints)
    if reasons:
        return VerificationReport(equation_id, "Inconclusive", 0, 0.0, tuple(reasons))
    variables = free_variables(equation)
    tested, worst, counter = 0, 0.0, None
    for point in sample_points(variables, constraints, config):
        try:
            lhs = evaluate(equation.left, point, config.pole_epsilon)
            rhs = evaluate(equation.right, point, config.pole_epsilon)
        except PoleOrSingularity:
            continue
        except (EvaluationError, OverflowError, ZeroDivisionError, ValueError) as exc:
            reasons.append(Reason("EvaluationError", str(exc)))
            break
        if not all(math.isfinite(abs(v)) for v in (lhs, rhs)):
            continue
        tested += 1
        r = residual(lhs, rhs)
        if counter is None or r > worst:
            worst = r
            counter = {"assignment": {k: _json_number(v) for k, v in point.items()},
                       "residual": r}
    if reasons:
        return VerificationReport(equation_id, "Inconclusive", tested, worst, tuple(reasons))
    if tested == 0:
        return VerificationReport(equation_id, "Inconclusive", 0, 0.0,
                                  (Reason("EvaluationError", "no sample point could be evaluated"),))
    if worst < PASS_TOLERANCE:
        return VerificationReport(equation_id, "Verified", tested, worst)
    if worst > FAIL_THRESHOLD:
        return VerificationReport(equation_id, "Failed", tested, worst, (), counter)
    return VerificationReport(equation_id, "Inconclusive", tested, worst,
                              (Reason("EvaluationError",
                                      f"max residual {worst:.3g} lies between the pass and fail tolerances"),))


# -- constraints ------------------------------------------------------------------------

_CONSTRAINT_TEXT = re.compile(
    r"^\s*(?P<var>[A-Za-z](?:_\w+)?)\s+(?:in\s+)?(?P<set>integer|real)s?"
    r"(?:\s*\[\s*(?P<lo>-?[\d.]+|-inf)\s*,\s*(?P<hi>-?[\d.]+|inf)\s*\])?\s*$")


def parse_constraint(text: str) -> Constraint:
    """``n integer [0, 10]`` or ``x real [0, 1]``; anything else is kept as Custom text."""
    m = _CONSTRAINT_TEXT.match(text)
    if not m:
        return Custom("*", text.strip())

    def bound(s):
        if s is None or s in ("inf", "-inf"):
            return None
        v = float(s)
        return int(v) if v == int(v) else v

    return Domain(m.group("var"), m.group("set") == "integer", bound(m.group("lo")), bound(m.group("hi")))


def constraints_for(expr: MathExpr, lexicon: ContentDictionary) -> list[Constraint]:
    """Variable constraints implied by the macros an expression applies.

    A macro constraint on a slot filled by a plain variable restricts that
    variable; poles are left to sampling.  A domain on a slot filled by a
    number is checked directly, and a domain on a composite argument cannot
    be sampled, so it is reported as Custom.
    """
    out: list[Constraint] = []
    for node in walk(expr):
        if not (isinstance(node, FunctionApply) and is_macro_ref(node.head)):
            continue
        macro = lexicon.get(node.head.name)
        if macro is None:
            continue
        for c in macro.constraints:
            slot = c.applies_to
            arg = None
            if slot.startswith("$") and slot[1:].isdigit() and int(slot[1:]) < len(node.args):
                arg = node.args[int(slot[1:])]
            if isinstance(c, AvoidPoles):
                continue
            if isinstance(c, Custom):
                found = Custom(slot, f"\\{macro.name}: {c.text}")
            elif isinstance(arg, Identifier):
                found = Domain(var_name(arg), c.integer, c.lo, c.hi)
            elif isinstance(arg, Number):
                value = _number(arg.value)
                if c.contains(value):
                    continue
                found = Custom(arg.value, f"\\{macro.name}: argument {arg.value} outside its domain")
            else:
                found = Custom(slot, f"\\{macro.name}: domain restriction on a composite argument")
            if found not in out:
                out.append(found)
    return out


# -- equation files and scripts ------------------------------------------------------------


@dataclass(frozen=True)
class Equation:
    id: str
    expr: MathExpr
    constraints: tuple[Constraint, ...] = ()


def equations_from_document(latex: str, lexicon: ContentDictionary) -> list[Equation]:
    """Top-level equalities of a LaTeX file, resolved with the document's own bindings."""
    from .disambiguation import analyze, bindings_at, read_document, resolve, zero_arity_names

    doc = read_document(latex, known_macros=zero_arity_names(lexicon))
    _, bindings = analyze(doc, lexicon)
    out = []
    for i, block in enumerate(doc.blocks):
        expr = getattr(block, "expr", None)
        if not (isinstance(expr, Relation) and expr.rel == "="):
            continue
        resolved = resolve(expr, bindings_at(bindings, i, lexicon))
        explicit = tuple(parse_constraint(t) for t in block.constraints)
        implied = tuple(c for c in constraints_for(resolved, lexicon) if c not in explicit)
        out.append(Equation(block.id, resolved, explicit + implied))
    return out


def verify_equations(equations: Iterable[Equation], config: SamplingConfig | None = None):
    return [numeric_verify(eq.expr, eq.constraints, config, eq.id) for eq in equations]


def perturb_constant(expr: Relation, delta: int = 1) -> Relation:
    """Add ``delta`` to the first number of the right side (else of the left side)."""
    from dataclasses import fields, replace

    def bump(e):
        if isinstance(e, Number):
            v = _number(e.value) + delta
            return Number(str(v)), True
        changed = False
        updates = {}
        for f in fields(e):
            value = getattr(e, f.name)
            if changed:
                break
            if isinstance(value, tuple):
                items = list(value)
                for k, item in enumerate(items):
                    if hasattr(item, "__dataclass_fields__"):
                        new, changed = bump(item)
                        if changed:
                            items[k] = new
                            updates[f.name] = tuple(items)
                            break
            elif hasattr(value, "__dataclass_fields__"):
                new, changed = bump(value)
                if changed:
                    updates[f.name] = new
        return (replace(e, **updates), True) if changed else (e, False)

    right, done = bump(expr.right)
    if done:
        return Relation(expr.rel, expr.left, right)
    left, done = bump(expr.left)
    if not done:
        raise ValueError("equation contains no number to perturb")
    return Relation(expr.rel, left, expr.right)


_SCRIPT_HEADER = {
    "Mathematica": "(* generated by mathcast: symbolic and sampled checks, one stanza per equation *)\n",
    "Maple": "# generated by mathcast: symbolic and sampled checks, one stanza per equation\n",
    "SymPyText": "# generated by mathcast: symbolic and sampled checks, one stanza per equation\n"
                 "from sympy import *\n",
}


def _point_text(target: str, point: dict, names: dict) -> str:
    def num(v):
        return repr(float(v)) if isinstance(v, float) else str(v)

    if target == "Mathematica":
        return "{" + ", ".join(f"{names[k]} -> {num(v)}" for k, v in point.items()) + "}"
    if target == "Maple":
        return "{" + ", ".join(f"{names[k]} = {num(v)}" for k, v in point.items()) + "}"
    return "{" + ", ".join(f"{names[k]}: {num(v)}" for k, v in point.items()) + "}"


def _variable_names(expr: MathExpr, target: str) -> dict:
    out = {}
    for node in walk(expr):
        if isinstance(node, Identifier):
            name = var_name(node)
            if name not in out:
                out[name] = translate(node, target, ContentDictionary()).text
    return out


def emit_cas_script(equations: Iterable[Equation], target: str, lexicon: ContentDictionary,
                    config: SamplingConfig | None = None, max_points: int = 10) -> str:
    """Script text with a simplify-the-difference and sample stanza per equation."""
    target = canonical_target(target)
    config = config or SamplingConfig()
    lines = [_SCRIPT_HEADER[target]]
    for eq in equations:
        if not (isinstance(eq.expr, Relation) and eq.expr.rel == "="):
            raise NotAnEquation(f"{eq.id} is not an equality")
        lhs = translate(eq.expr.left, target, lexicon).text
        rhs = translate(eq.expr.right, target, lexicon).text
        names = _variable_names(eq.expr, target)
        variables = [v for v in free_variables(eq.expr) if v in names]
        points = sample_points(variables, eq.constraints, config)[:max_points] if variables else []
        label = json.dumps(eq.id)
        if target == "Mathematica":
            pts = "{" + ", ".join(_point_text(target, p, names) for p in points) + "}"
            lines.append(f"(* equation {eq.id} *)\n"
                         f"delta = ({lhs}) - ({rhs});\n"
                         f"Print[{label}, \" simplified: \", FullSimplify[delta]];\n"
                         f"Print[{label}, \" samples: \", N[delta /. {pts}]];\n"
                         if points else
                         f"(* equation {eq.id} *)\n"
                         f"delta = ({lhs}) - ({rhs});\n"
                         f"Print[{label}, \" simplified: \", FullSimplify[delta]];\n"
                         f"Print[{label}, \" value: \", N[delta]];\n")
        elif target == "Maple":
            sub = "".join(f"printf(\"%s sample: %a\\n\", {label}, evalf(subs({_point_text(target, p, names)}, delta)));\n"
                          for p in points) if points else \
                f"printf(\"%s value: %a\\n\", {label}, evalf(delta));\n"
            lines.append(f"# equation {eq.id}\n"
                         f"delta := ({lhs}) - ({rhs}):\n"
                         f"printf(\"%s simplified: %a\\n\", {label}, simplify(delta));\n" + sub)
        else:
            decl = ""
            if names:
                decl = ", ".join(names.values()) + \
                    f", = symbols({json.dumps(' '.join(names.values()))}, seq=True)\n"
            pts = "[" + ", ".join(_point_text(target, p, names) for p in points) + "]"
            sample = (f"print({label}, \"samples:\", [N(delta.subs(pt)) for pt in {pts}])\n"
                      if points else f"print({label}, \"value:\", N(delta))\n")
            lines.append(f"# equation {eq.id}\n{decl}"
                         f"delta = ({lhs}) - ({rhs})\n"
                         f"print({label}, \"simplified:\", simplify(delta))\n" + sample)
    return "\n".join(lines)


# -- bundled suites ----------------------------------------------------------------------


def bundled_text(name: str) -> str:
    return (resources.files("mathcast") / "data" / name).read_text(encoding="utf-8")
