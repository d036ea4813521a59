"""Immutable expression trees for parsed LaTeX math.

Every node is a frozen dataclass, so trees hash, compare structurally and can
be shared freely between threads.  ``BinaryOp`` uses ``"*"`` for implicit
multiplication (juxtaposition) and ``"\\cdot"`` for the explicit operator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Union

#: Presentation functions that take their argument without braces (``\sin x``).
KNOWN_FUNCTIONS = ("sin", "cos", "tan", "exp", "ln", "log", "Gamma")
#: Big operators whose limits are written as sub/superscripts.
BIG_OPERATORS = ("sum", "prod", "int")
#: Control words that denote plain identifiers.
GREEK_IDENTIFIERS = ("theta",)
#: Control words that denote constants.
CONSTANTS = ("pi",)


@dataclass(frozen=True)
class Number:
    value: str


@dataclass(frozen=True)
class Identifier:
    name: str
    sub: "MathExpr | None" = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("identifier name must be non-empty")


@dataclass(frozen=True)
class Constant:
    name: str


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: "MathExpr"
    right: "MathExpr"


@dataclass(frozen=True)
class UnaryOp:
    op: str
    operand: "MathExpr"


@dataclass(frozen=True)
class Relation:
    rel: str
    left: "MathExpr"
    right: "MathExpr"


@dataclass(frozen=True)
class FunctionApply:
    head: "MathExpr"
    args: "tuple[MathExpr, ...]"


@dataclass(frozen=True)
class MacroCall:
    """A macro with brace arguments, or a bare macro reference when ``args`` is empty.

    Big operators store ``(body,)``, ``(lower, body)`` or ``(lower, upper, body)``;
    ``\\sqrt`` stores ``(radicand,)`` or ``(radicand, index)``.
    """

    name: str
    args: "tuple[MathExpr, ...]" = ()


@dataclass(frozen=True)
class Group:
    child: "MathExpr"
    delim: str = "("


@dataclass(frozen=True)
class Sequence:
    children: "tuple[MathExpr, ...]"


@dataclass(frozen=True)
class Ambiguous:
    interpretations: "tuple[MathExpr, ...]" = field()

    def __post_init__(self):
        if len(self.interpretations) < 2:
            raise ValueError("Ambiguous needs at least two interpretations")
        if len(set(self.interpretations)) != len(self.interpretations):
            raise ValueError("Ambiguous interpretations must be structurally distinct")


MathExpr = Union[
    Number, Identifier, Constant, BinaryOp, UnaryOp, Relation,
    FunctionApply, MacroCall, Group, Sequence, Ambiguous,
]

CLOSING = {"(": ")", "[": "]", "\\{": "\\}"}


def children(expr: MathExpr) -> tuple[MathExpr, ...]:
    if isinstance(expr, Identifier):
        return (expr.sub,) if expr.sub is not None else ()
    if isinstance(expr, (BinaryOp, Relation)):
        return (expr.left, expr.right)
    if isinstance(expr, UnaryOp):
        return (expr.operand,)
    if isinstance(expr, FunctionApply):
        return (expr.head,) + expr.args
    if isinstance(expr, MacroCall):
        return expr.args
    if isinstance(expr, Group):
        return (expr.child,)
    if isinstance(expr, Sequence):
        return expr.children
    if isinstance(expr, Ambiguous):
        return expr.interpretations
    return ()


def walk(expr: MathExpr) -> Iterator[MathExpr]:
    """Pre-order traversal, including every interpretation of ambiguous nodes."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def node_count(expr: MathExpr) -> int:
    return 1 + sum(node_count(c) for c in children(expr))


def is_symbol(expr: MathExpr) -> bool:
    """True for nodes that can head an ambiguous juxtaposition (``f(x)``, ``\\pi(n)``)."""
    return isinstance(expr, (Identifier, Constant))


def is_macro_ref(expr: MathExpr) -> bool:
    return isinstance(expr, MacroCall) and not expr.args


def macro_head(name: str) -> MacroCall:
    return MacroCall(name, ())


def apply_macro(name: str, *args: MathExpr) -> FunctionApply:
    return FunctionApply(MacroCall(name, ()), tuple(args))


def make_ambiguous(head: MathExpr, group: Group) -> Ambiguous:
    """Juxtaposition ``head(group)``: implicit product first, application second."""
    inner = group.child
    args = inner.children if isinstance(inner, Sequence) else (inner,)
    return Ambiguous((BinaryOp("*", head, group), FunctionApply(head, args)))


def symbol_key(expr: MathExpr) -> str | None:
    """Binding key of a symbol: its base name without subscripts (``E`` for ``E_n``)."""
    if isinstance(expr, Identifier):
        return expr.name
    if isinstance(expr, Constant):
        return "\\" + expr.name
    return None


def var_name(ident: Identifier) -> str:
    """Variable name used by evaluators and the SymPyText target (``E_n``, ``theta``)."""
    base = ident.name.lstrip("\\")
    if ident.sub is None:
        return base
    from .latex_parser import render_latex

    raw = render_latex(ident.sub)
    table = {"+": "p", "-": "m", "\\": "", "{": "", "}": "", "^": "", "_": "", "=": "eq"}
    tail = "".join(table.get(ch, ch) for ch in raw if ch.isalnum() or ch in table)
    return f"{base}_{tail}"


def to_sexpr(expr: MathExpr) -> str:
    """Debug serialization, e.g. ``(BinaryOp "+" (Identifier "a") (Identifier "b"))``."""
    q = json.dumps
    if isinstance(expr, Number):
        return f"(Number {q(expr.value)})"
    if isinstance(expr, Identifier):
        if expr.sub is None:
            return f"(Identifier {q(expr.name)})"
        return f"(Identifier {q(expr.name)} {to_sexpr(expr.sub)})"
    if isinstance(expr, Constant):
        return f"(Constant {q(expr.name)})"
    if isinstance(expr, BinaryOp):
        return f"(BinaryOp {q(expr.op)} {to_sexpr(expr.left)} {to_sexpr(expr.right)})"
    if isinstance(expr, UnaryOp):
        return f"(UnaryOp {q(expr.op)} {to_sexpr(expr.operand)})"
    if isinstance(expr, Relation):
        return f"(Relation {q(expr.rel)} {to_sexpr(expr.left)} {to_sexpr(expr.right)})"
    if isinstance(expr, FunctionApply):
        parts = " ".join(to_sexpr(a) for a in expr.args)
        return f"(FunctionApply {to_sexpr(expr.head)} ({parts}))"
    if isinstance(expr, MacroCall):
        parts = "".join(" " + to_sexpr(a) for a in expr.args)
        return f"(MacroCall {q(expr.name)}{parts})"
    if isinstance(expr, Group):
        return f"(Group {q(expr.delim)} {to_sexpr(expr.child)})"
    if isinstance(expr, Sequence):
        return "(Sequence " + " ".join(to_sexpr(c) for c in expr.children) + ")"
    if isinstance(expr, Ambiguous):
        return "(Ambiguous " + " ".join(to_sexpr(c) for c in expr.interpretations) + ")"
    raise TypeError(f"not a MathExpr: {expr!r}")


def to_dict(expr: MathExpr) -> dict:
    """JSON-ready form used by ``mathcast parse``."""
    kind = type(expr).__name__
    if isinstance(expr, Number):
        return {"kind": kind, "value": expr.value}
    if isinstance(expr, Identifier):
        out = {"kind": kind, "name": expr.name}
        if expr.sub is not None:
            out["sub"] = to_dict(expr.sub)
        return out
    if isinstance(expr, Constant):
        return {"kind": kind, "name": expr.name}
    if isinstance(expr, BinaryOp):
        return {"kind": kind, "op": expr.op, "left": to_dict(expr.left), "right": to_dict(expr.right)}
    if isinstance(expr, UnaryOp):
        return {"kind": kind, "op": expr.op, "operand": to_dict(expr.operand)}
    if isinstance(expr, Relation):
        return {"kind": kind, "rel": expr.rel, "left": to_dict(expr.left), "right": to_dict(expr.right)}
    if isinstance(expr, FunctionApply):
        return {"kind": kind, "head": to_dict(expr.head), "args": [to_dict(a) for a in expr.args]}
    if isinstance(expr, MacroCall):
        return {"kind": kind, "name": expr.name, "args": [to_dict(a) for a in expr.args]}
    if isinstance(expr, Group):
        return {"kind": kind, "delim": expr.delim, "child": to_dict(expr.child)}
    if isinstance(expr, Sequence):
        return {"kind": kind, "children": [to_dict(c) for c in expr.children]}
    if isinstance(expr, Ambiguous):
        return {"kind": kind, "interpretations": [to_dict(c) for c in expr.interpretations]}
    raise TypeError(f"not a MathExpr: {expr!r}")
