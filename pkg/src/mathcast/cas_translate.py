"""Translation of resolved expression trees into CAS input syntax.

Macro applications instantiate the lexicon pattern of the macro for the target;
everything else maps through fixed structural tables.  Operands are
parenthesized whenever the operator they sit under binds tighter than their
own top-level operator, which keeps the result unambiguous in every target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import ArityMismatch, UnsupportedTarget
from .expr import (KNOWN_FUNCTIONS, Ambiguous, BinaryOp, Constant, FunctionApply, Group,
                   Identifier, MacroCall, MathExpr, Number, Relation, Sequence, UnaryOp,
                   is_macro_ref, var_name)
from .lexicon import TARGETS, ContentDictionary, Domain, AvoidPoles, instantiate

_ALIASES = {"mathematica": "Mathematica", "maple": "Maple", "sympytext": "SymPyText",
            "sympy": "SymPyText"}


def supported_targets() -> list[str]:
    return list(TARGETS)


def canonical_target(name: str) -> str:
    found = _ALIASES.get(name.lower())
    if found is None:
        raise UnsupportedTarget(name)
    return found


@dataclass(frozen=True)
class LossyConstraint:
    text: str

    def to_json(self) -> dict:
        return {"kind": "LossyConstraint", "text": self.text}


@dataclass(frozen=True)
class UnknownMacroFallback:
    name: str

    def to_json(self) -> dict:
        return {"kind": "UnknownMacroFallback", "name": self.name}


@dataclass(frozen=True)
class AmbiguityForced:
    position: int

    def to_json(self) -> dict:
        return {"kind": "AmbiguityForced", "position": self.position}


Warning = Union[LossyConstraint, UnknownMacroFallback, AmbiguityForced]


@dataclass(frozen=True)
class TranslationResult:
    target: str
    text: str
    warnings: tuple = field(default=())

    @property
    def complete(self) -> bool:
        return not any(isinstance(w, UnknownMacroFallback) for w in self.warnings)

    def to_json(self) -> dict:
        return {"target": self.target, "text": self.text,
                "warnings": [w.to_json() for w in self.warnings], "complete": self.complete}


# Built-in names for presentation functions absent from the lexicon.
_BUILTIN = {
    "Mathematica": {"sin": "Sin[$0]", "cos": "Cos[$0]", "tan": "Tan[$0]", "exp": "Exp[$0]",
                    "ln": "Log[$0]", "log": "Log[$0]", "Gamma": "Gamma[$0]"},
    "Maple": {"sin": "sin($0)", "cos": "cos($0)", "tan": "tan($0)", "exp": "exp($0)",
              "ln": "ln($0)", "log": "ln($0)", "Gamma": "GAMMA($0)"},
    "SymPyText": {"sin": "sin($0)", "cos": "cos($0)", "tan": "tan($0)", "exp": "exp($0)",
                  "ln": "log($0)", "log": "log($0)", "Gamma": "gamma($0)"},
}
_PI = {"Mathematica": "Pi", "Maple": "Pi", "SymPyText": "pi"}
_POW = {"Mathematica": "^", "Maple": "^", "SymPyText": "**"}
_SQRT = {"Mathematica": "Sqrt[$0]", "Maple": "sqrt($0)", "SymPyText": "sqrt($0)"}
_BIGOP = {
    "Mathematica": {"sum": "Sum[$b, {$v, $lo, $hi}]", "prod": "Product[$b, {$v, $lo, $hi}]",
                    "int": "Integrate[$b, {$v, $lo, $hi}]", "int0": "Integrate[$b, $v]"},
    "Maple": {"sum": "sum($b, $v = $lo .. $hi)", "prod": "product($b, $v = $lo .. $hi)",
              "int": "int($b, $v = $lo .. $hi)", "int0": "int($b, $v)"},
    "SymPyText": {"sum": "summation($b, ($v, $lo, $hi))", "prod": "product($b, ($v, $lo, $hi))",
                  "int": "integrate($b, ($v, $lo, $hi))", "int0": "integrate($b, $v)"},
}

# Binding strength of the translated text's top-level operator.
_P_REL, _P_ADD, _P_MUL, _P_POW, _P_ATOM = range(5)


def split_differential(body: MathExpr) -> tuple[MathExpr | None, Identifier] | None:
    """Split an integrand ``f\\,dx`` into ``(f, x)``; ``None`` without a trailing ``dx``."""
    if not (isinstance(body, BinaryOp) and body.op == "*" and isinstance(body.right, Identifier)):
        return None
    var, rest = body.right, body.left
    if rest == Identifier("d"):
        return None, var
    if isinstance(rest, BinaryOp) and rest.op == "*" and rest.right == Identifier("d"):
        return rest.left, var
    return None


class _Translator:
    def __init__(self, target: str, lexicon: ContentDictionary):
        self.target = target
        self.lexicon = lexicon
        self.warnings: list = []
        self.unknown: list[str] = []
        self.position = 0

    def warn(self, w):
        if w not in self.warnings:
            self.warnings.append(w)

    # Each visit returns (text, precedence of its top-level operator).
    def visit(self, e: MathExpr) -> tuple[str, int]:
        here = self.position
        self.position += 1
        t = self.target
        if isinstance(e, Number):
            return e.value, _P_ATOM
        if isinstance(e, Identifier):
            return self.identifier(e), _P_ATOM
        if isinstance(e, Constant):
            if e.name == "pi":
                return _PI[t], _P_ATOM
            return e.name, _P_ATOM
        if isinstance(e, Group):
            return "(" + self.text(e.child) + ")", _P_ATOM
        if isinstance(e, Sequence):
            return ", ".join(self.wrap(c, _P_REL + 1) for c in e.children), _P_REL
        if isinstance(e, Relation):
            left, right = self.wrap(e.left, _P_ADD), self.wrap(e.right, _P_ADD)
            if e.rel == "=":
                if t == "SymPyText":
                    return f"Eq({left}, {right})", _P_ATOM
                return f"{left} {'==' if t == 'Mathematica' else '='} {right}", _P_REL
            return f"{left} {e.rel} {right}", _P_REL
        if isinstance(e, UnaryOp):
            inner = self.wrap(e.operand, _P_MUL)
            return (inner if e.op == "+" else "-" + inner), _P_ADD
        if isinstance(e, BinaryOp):
            return self.binary(e)
        if isinstance(e, FunctionApply):
            text = self.apply(e)
            return text, (_P_ATOM if _is_call_form(text) else _P_REL)
        if isinstance(e, MacroCall):
            return self.macro(e)
        if isinstance(e, Ambiguous):
            self.warn(AmbiguityForced(here))
            product = next((i for i in e.interpretations
                            if isinstance(i, BinaryOp) and i.op == "*"), e.interpretations[0])
            return self.visit(product)
        raise TypeError(f"not a MathExpr: {e!r}")

    def text(self, e: MathExpr) -> str:
        return self.visit(e)[0]

    def wrap(self, e: MathExpr, min_prec: int) -> str:
        text, prec = self.visit(e)
        return text if prec >= min_prec else "(" + text + ")"

    def identifier(self, e: Identifier) -> str:
        base = e.name.lstrip("\\")
        if e.sub is None:
            return base
        if self.target == "Mathematica":
            return f"Subscript[{base}, {self.text(e.sub)}]"
        if self.target == "Maple":
            return f"{base}[{self.text(e.sub)}]"
        return var_name(e)

    def binary(self, e: BinaryOp) -> tuple[str, int]:
        op = e.op
        if op == "+":
            return f"{self.wrap(e.left, _P_ADD)} + {self.wrap(e.right, _P_MUL)}", _P_ADD
        if op == "-":
            return f"{self.wrap(e.left, _P_ADD)} - {self.wrap(e.right, _P_MUL)}", _P_ADD
        if op in ("*", "\\cdot"):
            return f"{self.wrap(e.left, _P_MUL)}*{self.wrap(e.right, _P_POW)}", _P_MUL
        if op == "/":
            return f"({self.text(e.left)})/({self.text(e.right)})", _P_MUL
        if op == "^":
            return f"{self.wrap(e.left, _P_ATOM)}{_POW[self.target]}{self.wrap(e.right, _P_ATOM)}", _P_POW
        raise ValueError(f"unknown operator {op!r}")

    def apply(self, e: FunctionApply) -> str:
        args = [self.text(a) for a in e.args]
        if not is_macro_ref(e.head):
            head = self.wrap(e.head, _P_ATOM)
            if self.target == "Mathematica":
                return f"{head}[{', '.join(args)}]"
            return f"{head}({', '.join(args)})"
        name = e.head.name
        macro = self.lexicon.get(name)
        if macro is not None and macro.pattern(self.target) is not None:
            if macro.arity != len(args):
                raise ArityMismatch(name, len(args), macro.arity)
            for c in macro.constraints:
                self.warn(LossyConstraint(_describe(name, c, args)))
            return instantiate(macro.pattern(self.target), args)
        if name in KNOWN_FUNCTIONS and len(args) == 1:
            return instantiate(_BUILTIN[self.target][name], args)
        return self.fallback(name, args)

    def fallback(self, name: str, args: list[str]) -> str:
        self.warn(UnknownMacroFallback(name))
        if self.target == "Mathematica":
            return f"(* unknown macro \\{name} *){name}[{', '.join(args)}]"
        if self.target == "Maple":
            return f"(* unknown macro \\{name} *){name}({', '.join(args)})"
        self.unknown.append(name)
        return f"{name}({', '.join(args)})"

    def macro(self, e: MacroCall) -> tuple[str, int]:
        t, name, args = self.target, e.name, e.args
        if name in ("frac", "tfrac") and len(args) == 2:
            return f"({self.text(args[0])})/({self.text(args[1])})", _P_MUL
        if name == "sqrt" and len(args) == 1:
            return instantiate(_SQRT[t], [self.text(args[0])]), _P_ATOM
        if name == "sqrt" and len(args) == 2:
            return f"({self.text(args[0])}){_POW[t]}(1/({self.text(args[1])}))", _P_POW
        if name in ("sum", "prod", "int"):
            found = self.big_operator(e)
            if found is not None:
                return found, _P_ATOM
        return self.fallback(name, [self.text(a) for a in args]), _P_ATOM

    def big_operator(self, e: MacroCall) -> str | None:
        table = _BIGOP[self.target]
        *limits, body = e.args
        if e.name == "int":
            split = split_differential(body)
            if split is None:
                return None
            integrand, var = split
            b = self.text(integrand) if integrand is not None else "1"
            v = self.text(var)
            if not limits:
                return table["int0"].replace("$b", b).replace("$v", v)
            if len(limits) != 2:
                return None
            lo, hi = self.text(limits[0]), self.text(limits[1])
        else:
            if len(limits) != 2 or not (isinstance(limits[0], Relation) and limits[0].rel == "="
                                        and isinstance(limits[0].left, Identifier)):
                return None
            v = self.text(limits[0].left)
            lo, hi = self.text(limits[0].right), self.text(limits[1])
            b = self.text(body)
        pattern = table[e.name]
        return pattern.replace("$b", b).replace("$v", v).replace("$lo", lo).replace("$hi", hi)


def _is_call_form(text: str) -> bool:
    """True for ``name`` optionally followed by bracket groups, e.g. ``numtheory[pi](n)``."""
    k = 0
    while k < len(text) and (text[k].isalnum() or text[k] == "_"):
        k += 1
    if k == 0:
        return False
    while k < len(text):
        if text[k] not in "[(":
            return False
        depth = 0
        while k < len(text):
            if text[k] in "[(":
                depth += 1
            elif text[k] in "])":
                depth -= 1
            k += 1
            if depth == 0:
                break
        if depth:
            return False
    return True


def _describe(name: str, c, args: list[str]) -> str:
    def subject(ref: str) -> str:
        if ref.startswith("$") and ref[1:].isdigit() and int(ref[1:]) < len(args):
            return args[int(ref[1:])]
        return ref

    who = subject(c.applies_to)
    if isinstance(c, Domain):
        kind = "integer" if c.integer else "real"
        lo = "-inf" if c.lo is None else c.lo
        hi = "inf" if c.hi is None else c.hi
        return f"\\{name}: {who} must be {kind} in [{lo}, {hi}]"
    if isinstance(c, AvoidPoles):
        return f"\\{name}: {who} must avoid poles at {c.positions}"
    return f"\\{name}: {who}: {c.text}"


def translate(expr: MathExpr, target: str, lexicon: ContentDictionary) -> TranslationResult:
    """Translate a resolved tree; unresolved ambiguity is read as multiplication."""
    target = canonical_target(target)
    tr = _Translator(target, lexicon)
    text = tr.text(expr)
    if tr.unknown:
        text += "  # unknown macro: " + ", ".join("\\" + n for n in dict.fromkeys(tr.unknown))
    return TranslationResult(target, text, tuple(tr.warnings))
