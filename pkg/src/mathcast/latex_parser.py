"""Tokenizer, recursive-descent parser and canonical renderer for presentation LaTeX.

Supported subset: ``\\frac \\tfrac \\sqrt \\sum \\prod \\int \\sin \\cos \\tan
\\exp \\ln \\log \\pi \\theta \\Gamma \\cdot \\left \\right \\{ \\}``, single-letter
identifiers, numbers, sub/superscripts, ``+ - * / = < >``, parentheses and
brackets.  Semantic macros are accepted in the ``\\name@{arg}@{arg}`` form.

Precedence, tightest first: scripts, implicit multiplication, ``\\cdot`` and
``/``, ``+`` and ``-``, relations, commas.  A symbol directly juxtaposed with a
parenthesized group parses to an :class:`~mathcast.expr.Ambiguous` node holding
both the product and the function-application reading.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Collection

from .errors import (
    EmptyInput,
    IllegalCharacter,
    ParseError,
    UnbalancedBraces,
    UnknownMacro,
)
from .expr import (
    BIG_OPERATORS,
    CLOSING,
    CONSTANTS,
    GREEK_IDENTIFIERS,
    KNOWN_FUNCTIONS,
    Ambiguous,
    BinaryOp,
    Constant,
    FunctionApply,
    Group,
    Identifier,
    MacroCall,
    MathExpr,
    Number,
    Relation,
    Sequence,
    UnaryOp,
    is_macro_ref,
    is_symbol,
    make_ambiguous,
)


class TokenKind(Enum):
    CONTROL_SEQUENCE = "ControlSequence"
    LETTER = "Letter"
    DIGIT = "Digit"
    OPERATOR = "Operator"
    RELATION = "Relation"
    OPEN_GROUP = "OpenGroup"
    CLOSE_GROUP = "CloseGroup"
    SUBSCRIPT = "Subscript"
    SUPERSCRIPT = "Superscript"
    AMPERSAND = "Ampersand"
    OTHER = "Other"


@dataclass(frozen=True)
class MathToken:
    kind: TokenKind
    text: str
    position: int


_SINGLE = {
    "{": TokenKind.OPEN_GROUP,
    "}": TokenKind.CLOSE_GROUP,
    "_": TokenKind.SUBSCRIPT,
    "^": TokenKind.SUPERSCRIPT,
    "&": TokenKind.AMPERSAND,
}
_OPERATORS = set("+-*/()[]")
_RELATIONS = set("=<>")
_OTHER = set(",.;:!'|@")

SUPPORTED_MACROS = frozenset(
    {"frac", "tfrac", "sqrt", "cdot", "left", "right", "{", "}"}
    | set(BIG_OPERATORS) | set(KNOWN_FUNCTIONS) | set(GREEK_IDENTIFIERS) | set(CONSTANTS)
)


def tokenize(text: str) -> list[MathToken]:
    """Split a math-mode string into tokens; whitespace is dropped."""
    tokens: list[MathToken] = []
    depth_stack: list[int] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "\\":
            j = i + 1
            if j < n and text[j].isascii() and text[j].isalpha():
                while j < n and text[j].isascii() and text[j].isalpha():
                    j += 1
            elif j < n and not text[j].isspace():
                j += 1
            else:
                raise IllegalCharacter("\\", i)
            tokens.append(MathToken(TokenKind.CONTROL_SEQUENCE, text[i:j], i))
            i = j
            continue
        if ch in _SINGLE:
            kind = _SINGLE[ch]
            if kind is TokenKind.OPEN_GROUP:
                depth_stack.append(i)
            elif kind is TokenKind.CLOSE_GROUP:
                if not depth_stack:
                    raise UnbalancedBraces(i)
                depth_stack.pop()
        elif ch.isascii() and ch.isalpha():
            kind = TokenKind.LETTER
        elif ch.isascii() and ch.isdigit():
            kind = TokenKind.DIGIT
        elif ch in _OPERATORS:
            kind = TokenKind.OPERATOR
        elif ch in _RELATIONS:
            kind = TokenKind.RELATION
        elif ch in _OTHER:
            kind = TokenKind.OTHER
        else:
            raise IllegalCharacter(ch, i)
        tokens.append(MathToken(kind, ch, i))
        i += 1
    if depth_stack:
        raise UnbalancedBraces(depth_stack[-1])
    if not tokens:
        raise EmptyInput()
    return tokens


class _Parser:
    def __init__(self, tokens, strict: bool, known_macros: Collection[str]):
        self.tokens = list(tokens)
        self.pos = 0
        self.strict = strict
        self.known_macros = frozenset(known_macros)

    # -- token helpers -------------------------------------------------
    def peek(self, offset: int = 0) -> MathToken | None:
        k = self.pos + offset
        return self.tokens[k] if k < len(self.tokens) else None

    def here(self) -> int:
        tok = self.peek()
        if tok is not None:
            return tok.position
        if self.tokens:
            last = self.tokens[-1]
            return last.position + len(last.text)
        return 0

    def advance(self) -> MathToken:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def expect(self, text: str) -> MathToken:
        if not self.at(text):
            raise ParseError(self.here(), repr(text))
        return self.advance()

    # -- grammar -------------------------------------------------------
    def parse_sequence(self) -> MathExpr:
        items = [self.parse_relation()]
        while self.at(","):
            self.advance()
            items.append(self.parse_relation())
        return items[0] if len(items) == 1 else Sequence(tuple(items))

    def parse_relation(self) -> MathExpr:
        left = self.parse_additive()
        while (tok := self.peek()) is not None and tok.kind is TokenKind.RELATION:
            self.advance()
            left = Relation(tok.text, left, self.parse_additive())
        return left

    def parse_additive(self) -> MathExpr:
        if self.at("+") or self.at("-"):
            op = self.advance().text
            left: MathExpr = UnaryOp(op, self.parse_product())
        else:
            left = self.parse_product()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            left = BinaryOp(op, left, self.parse_product())
        return left

    def parse_product(self) -> MathExpr:
        left = self.parse_chain()
        while self.at("\\cdot") or self.at("/") or self.at("*"):
            op = self.advance().text
            op = "/" if op == "/" else "\\cdot"
            left = BinaryOp(op, left, self.parse_chain())
        return left

    def starts_item(self) -> bool:
        tok = self.peek()
        if tok is None:
            return False
        if tok.kind in (TokenKind.LETTER, TokenKind.DIGIT, TokenKind.OPEN_GROUP):
            return True
        if tok.kind is TokenKind.OPERATOR:
            return tok.text in "(["
        if tok.kind is TokenKind.CONTROL_SEQUENCE:
            return tok.text not in ("\\cdot", "\\right", "\\}")
        return False

    def parse_chain(self) -> MathExpr:
        if not self.starts_item():
            raise ParseError(self.here(), "operand")
        items = [self.parse_power()]
        while self.starts_item():
            items.append(self.parse_power())
        paired: list[MathExpr] = []
        i = 0
        while i < len(items):
            cur = items[i]
            nxt = items[i + 1] if i + 1 < len(items) else None
            if is_symbol(cur) and isinstance(nxt, Group) and nxt.delim == "(":
                paired.append(make_ambiguous(cur, nxt))
                i += 2
            else:
                paired.append(cur)
                i += 1
        out = paired[0]
        for item in paired[1:]:
            out = BinaryOp("*", out, item)
        return out

    def parse_power(self) -> MathExpr:
        base = self.parse_atom()
        sub_seen = isinstance(base, Identifier) and base.sub is not None
        exponent = None
        while self.at("^") or self.at("_"):
            tok = self.advance()
            if tok.text == "^":
                if exponent is not None:
                    raise ParseError(tok.position, "single superscript")
                exponent = self.parse_script_arg()
            else:
                if sub_seen or not isinstance(base, Identifier) or exponent is not None:
                    raise ParseError(tok.position, "subscript on a bare identifier")
                base = Identifier(base.name, self.parse_script_arg())
                sub_seen = True
        if exponent is not None:
            return BinaryOp("^", base, exponent)
        return base

    def parse_braced(self) -> MathExpr:
        self.expect("{")
        if self.at("}"):
            raise ParseError(self.here(), "group content")
        inner = self.parse_sequence()
        self.expect("}")
        return inner

    def parse_script_arg(self) -> MathExpr:
        """Argument of ``^``, ``_`` or ``\\frac``: a braced group or one token."""
        tok = self.peek()
        if tok is None:
            raise ParseError(self.here(), "script argument")
        if tok.text == "{":
            return self.parse_braced()
        if tok.kind is TokenKind.LETTER:
            self.advance()
            return Identifier(tok.text)
        if tok.kind is TokenKind.DIGIT:
            self.advance()
            return Number(tok.text)
        if tok.kind is TokenKind.CONTROL_SEQUENCE:
            name = tok.text[1:]
            if name in CONSTANTS:
                self.advance()
                return Constant(name)
            if name in GREEK_IDENTIFIERS:
                self.advance()
                return Identifier(tok.text)
        raise ParseError(tok.position, "script argument")

    def parse_number(self) -> Number:
        digits = []
        while (tok := self.peek()) is not None and tok.kind is TokenKind.DIGIT:
            digits.append(self.advance().text)
        nxt, after = self.peek(), self.peek(1)
        if nxt is not None and nxt.text == "." and after is not None and after.kind is TokenKind.DIGIT:
            self.advance()
            digits.append(".")
            while (tok := self.peek()) is not None and tok.kind is TokenKind.DIGIT:
                digits.append(self.advance().text)
        return Number("".join(digits))

    def parse_group(self, open_text: str) -> Group:
        """Parenthesized group; the opening token (or ``\\left``) is already consumed."""
        delim = open_text
        close = CLOSING[delim]
        if self.at(close) or self.at("\\right"):
            raise ParseError(self.here(), "group content")
        inner = self.parse_sequence()
        if self.at("\\right"):
            self.advance()
        self.expect(close)
        if isinstance(inner, Group):
            inner = inner.child
        return Group(inner, delim)

    def parse_atom(self) -> MathExpr:
        tok = self.peek()
        if tok is None:
            raise ParseError(self.here(), "operand")
        if tok.kind is TokenKind.DIGIT:
            return self.parse_number()
        if tok.kind is TokenKind.LETTER:
            self.advance()
            return Identifier(tok.text)
        if tok.text == "{":
            return self.parse_braced()
        if tok.text in ("(", "["):
            self.advance()
            return self.parse_group(tok.text)
        if tok.kind is TokenKind.CONTROL_SEQUENCE:
            return self.parse_control()
        raise ParseError(tok.position, "operand")

    def parse_semantic_args(self) -> tuple[MathExpr, ...]:
        args = []
        while self.at("@"):
            self.advance()
            args.append(self.parse_braced())
        return tuple(args)

    def parse_control(self) -> MathExpr:
        tok = self.advance()
        name = tok.text[1:]
        if self.at("@"):
            return FunctionApply(MacroCall(name), self.parse_semantic_args())
        if name in CONSTANTS:
            return Constant(name)
        if name in GREEK_IDENTIFIERS:
            return Identifier(tok.text)
        if name in ("frac", "tfrac"):
            num = self.parse_script_arg()
            den = self.parse_script_arg()
            return MacroCall("frac", (num, den))
        if name == "sqrt":
            index = None
            if self.at("["):
                self.advance()
                index = self.parse_sequence()
                self.expect("]")
            radicand = self.parse_script_arg()
            return MacroCall("sqrt", (radicand,) if index is None else (radicand, index))
        if name in KNOWN_FUNCTIONS:
            return self.parse_function(name)
        if name in BIG_OPERATORS:
            return self.parse_big_operator(name, tok.position)
        if name == "left":
            opener = self.peek()
            if opener is None or opener.text not in CLOSING:
                raise ParseError(self.here(), "delimiter after \\left")
            self.advance()
            return self.parse_group(opener.text)
        if name == "{":
            return self.parse_group("\\{")
        if name in self.known_macros:
            return FunctionApply(MacroCall(name), ())
        if name in SUPPORTED_MACROS:
            raise ParseError(tok.position, "operand")
        if self.strict:
            raise UnknownMacro(name, tok.position)
        args = []
        while self.at("{"):
            args.append(self.parse_braced())
        return MacroCall(name, tuple(args))

    def parse_function(self, name: str) -> MathExpr:
        exponent = None
        if self.at("^"):
            self.advance()
            exponent = self.parse_script_arg()
        if self.at("(") or (self.at("\\left") and self.peek(1) is not None and self.peek(1).text == "("):
            if self.at("\\left"):
                self.advance()
            self.advance()
            group = self.parse_group("(")
            inner = group.child
            args = inner.children if isinstance(inner, Sequence) else (inner,)
        else:
            if not self.starts_item():
                raise ParseError(self.here(), f"argument of \\{name}")
            args = (self.parse_power(),)
        out: MathExpr = FunctionApply(MacroCall(name), tuple(args))
        if exponent is not None:
            out = BinaryOp("^", out, exponent)
        return out

    def parse_big_operator(self, name: str, position: int) -> MacroCall:
        lower = upper = None
        while self.at("_") or self.at("^"):
            tok = self.advance()
            if tok.text == "_":
                if lower is not None:
                    raise ParseError(tok.position, "single lower limit")
                lower = self.parse_script_arg()
            else:
                if upper is not None:
                    raise ParseError(tok.position, "single upper limit")
                upper = self.parse_script_arg()
        if upper is not None and lower is None:
            raise ParseError(position, f"lower limit of \\{name}")
        body = self.parse_chain()
        limits = tuple(x for x in (lower, upper) if x is not None)
        return MacroCall(name, limits + (body,))


def parse(tokens, strict: bool = True, known_macros: Collection[str] = ()) -> MathExpr:
    """Parse a token sequence produced by :func:`tokenize`.

    With ``strict=False`` unknown control words become :class:`MacroCall`
    nodes holding their brace arguments instead of raising ``UnknownMacro``.
    Names in ``known_macros`` are read as zero-argument semantic macros.
    """
    parser = _Parser(tokens, strict, known_macros)
    if not parser.tokens:
        raise EmptyInput()
    expr = parser.parse_sequence()
    if parser.peek() is not None:
        raise ParseError(parser.here(), "end of input")
    return expr


def parse_latex(text: str, strict: bool = True, known_macros: Collection[str] = ()) -> MathExpr:
    return parse(tokenize(text), strict=strict, known_macros=known_macros)


# -- rendering ---------------------------------------------------------------

_SEQ, _REL, _ADD, _MUL, _IMPL, _POW, _ATOM = range(7)
_CONTROL_WORD_END = re.compile(r"\\[A-Za-z]+$")


def _cat(a: str, b: str) -> str:
    if b and b[0].isalpha() and _CONTROL_WORD_END.search(a):
        return a + " " + b
    return a + b


def _prec(expr: MathExpr) -> int:
    if isinstance(expr, Sequence):
        return _SEQ
    if isinstance(expr, Relation):
        return _REL
    if isinstance(expr, UnaryOp):
        return _ADD
    if isinstance(expr, BinaryOp):
        return {"+": _ADD, "-": _ADD, "\\cdot": _MUL, "/": _MUL, "*": _IMPL}.get(expr.op, _POW)
    if isinstance(expr, Ambiguous):
        return _IMPL
    if isinstance(expr, MacroCall) and expr.name in BIG_OPERATORS:
        return _IMPL
    if isinstance(expr, FunctionApply) and not is_macro_ref(expr.head):
        return _IMPL
    return _ATOM


def _swallows_right(expr: MathExpr) -> bool:
    """Whether anything juxtaposed after ``expr`` would be absorbed into it."""
    if isinstance(expr, MacroCall) and expr.name in BIG_OPERATORS:
        return True
    if isinstance(expr, BinaryOp) and expr.op == "*":
        return _swallows_right(expr.right)
    return False


def _wrap(expr: MathExpr, min_prec: int) -> str:
    text = render_latex(expr)
    return "{" + text + "}" if _prec(expr) < min_prec else text


def _is_atomic_arg(expr: MathExpr) -> bool:
    return isinstance(expr, (Number, Identifier, Constant))


def _render_function(name: str, args, exponent: MathExpr | None = None) -> str:
    head = "\\" + name
    if exponent is not None:
        head += "^{" + render_latex(exponent) + "}"
    if len(args) == 1 and _is_atomic_arg(args[0]):
        return _cat(head, render_latex(args[0]))
    return head + "(" + ",".join(_wrap(a, _REL) for a in args) + ")"


def _render_implicit(expr: BinaryOp) -> str:
    left, right = expr.left, expr.right
    ltext = render_latex(left)
    if _prec(left) < _IMPL or _swallows_right(left) or (
        isinstance(right, Group) and isinstance(left, BinaryOp) and left.op == "*"
    ):
        ltext = "{" + ltext + "}"
    rtext = render_latex(right)
    if isinstance(right, Ambiguous):
        pass
    elif _prec(right) <= _IMPL or (ltext[-1].isdigit() and rtext[0].isdigit()):
        rtext = "{" + rtext + "}"
    return _cat(ltext, rtext)


def render_latex(expr: MathExpr) -> str:
    """Canonical LaTeX: braced scripts, ``\\frac`` for ``\\tfrac``, minimal grouping."""
    if isinstance(expr, Number):
        return expr.value
    if isinstance(expr, Identifier):
        if expr.sub is None:
            return expr.name
        return expr.name + "_{" + render_latex(expr.sub) + "}"
    if isinstance(expr, Constant):
        return "\\" + expr.name
    if isinstance(expr, Group):
        close = CLOSING.get(expr.delim, ")")
        return expr.delim + render_latex(expr.child) + close
    if isinstance(expr, Sequence):
        return ",".join(_wrap(c, _REL) for c in expr.children)
    if isinstance(expr, Relation):
        return _wrap(expr.left, _REL) + expr.rel + _wrap(expr.right, _ADD)
    if isinstance(expr, UnaryOp):
        return expr.op + _wrap(expr.operand, _MUL)
    if isinstance(expr, BinaryOp):
        if expr.op == "*":
            return _render_implicit(expr)
        if expr.op == "^":
            base = expr.left
            if isinstance(base, FunctionApply) and is_macro_ref(base.head) \
                    and base.head.name in KNOWN_FUNCTIONS:
                return _render_function(base.head.name, base.args, expr.right)
            return _wrap(base, _ATOM) + "^{" + render_latex(expr.right) + "}"
        level = _ADD if expr.op in "+-" else _MUL
        return _cat(_wrap(expr.left, level) + expr.op, _wrap(expr.right, level + 1))
    if isinstance(expr, FunctionApply):
        head = expr.head
        if is_macro_ref(head):
            if head.name in KNOWN_FUNCTIONS:
                return _render_function(head.name, expr.args)
            return "\\" + head.name + "".join("@{" + render_latex(a) + "}" for a in expr.args)
        htext = render_latex(head) if is_symbol(head) else "{" + render_latex(head) + "}"
        return htext + "(" + ",".join(_wrap(a, _REL) for a in expr.args) + ")"
    if isinstance(expr, MacroCall):
        return _render_macro(expr)
    if isinstance(expr, Ambiguous):
        return render_latex(expr.interpretations[0])
    raise TypeError(f"not a MathExpr: {expr!r}")


def _render_macro(expr: MacroCall) -> str:
    name, args = expr.name, expr.args
    if name in ("frac", "tfrac") and len(args) == 2:
        return "\\frac{" + render_latex(args[0]) + "}{" + render_latex(args[1]) + "}"
    if name == "sqrt" and len(args) in (1, 2):
        index = "[" + render_latex(args[1]) + "]" if len(args) == 2 else ""
        return "\\sqrt" + index + "{" + render_latex(args[0]) + "}"
    if name in BIG_OPERATORS and args:
        limits = args[:-1]
        text = "\\" + name
        if limits:
            text += "_{" + render_latex(limits[0]) + "}"
        if len(limits) > 1:
            text += "^{" + render_latex(limits[1]) + "}"
        body = args[-1]
        btext = render_latex(body)
        if _prec(body) < _IMPL:
            btext = "{" + btext + "}"
        return _cat(text, btext)
    return "\\" + name + "".join("{" + render_latex(a) + "}" for a in args)


# -- normalization -------------------------------------------------------------


def normalize(expr: MathExpr) -> MathExpr:
    """Canonical tree that ``parse(tokenize(render_latex(expr)))`` reproduces.

    Collapses nested groups, rewrites ``\\tfrac`` to ``\\frac`` and ``*`` to
    ``\\cdot``-free implicit products, and restores the ambiguity of symbol
    juxtapositions such as ``f(x)`` whichever reading the input tree chose.
    """
    return _norm(expr, True)


def _norm(expr: MathExpr, ambiguate: bool) -> MathExpr:
    if isinstance(expr, (Number, Constant)):
        return expr
    if isinstance(expr, Identifier):
        return expr if expr.sub is None else Identifier(expr.name, _norm(expr.sub, True))
    if isinstance(expr, Group):
        child = _norm(expr.child, True)
        if isinstance(child, Group):
            child = child.child
        return Group(child, expr.delim)
    if isinstance(expr, Sequence):
        kids = tuple(_norm(c, True) for c in expr.children)
        return kids[0] if len(kids) == 1 else Sequence(kids)
    if isinstance(expr, Relation):
        return Relation(expr.rel, _norm(expr.left, True), _norm(expr.right, True))
    if isinstance(expr, UnaryOp):
        return UnaryOp(expr.op, _norm(expr.operand, True))
    if isinstance(expr, BinaryOp):
        left, right = _norm(expr.left, True), _norm(expr.right, True)
        if ambiguate and expr.op == "*" and is_symbol(left) and isinstance(right, Group) \
                and right.delim == "(":
            return make_ambiguous(left, right)
        return BinaryOp(expr.op, left, right)
    if isinstance(expr, FunctionApply):
        args = tuple(_norm(a, True) for a in expr.args)
        head = expr.head
        if is_macro_ref(head):
            if head.name in KNOWN_FUNCTIONS and len(args) == 1:
                if isinstance(args[0], Group):
                    args = (args[0].child,)
                if isinstance(args[0], Sequence):
                    args = args[0].children
            return FunctionApply(head, args)
        head = _norm(head, True)
        inner: MathExpr = args[0] if len(args) == 1 else Sequence(args)
        if isinstance(inner, Group):
            inner = inner.child
        group = Group(inner, "(")
        if is_symbol(head):
            return make_ambiguous(head, group) if ambiguate else FunctionApply(head, args)
        return BinaryOp("*", head, group)
    if isinstance(expr, MacroCall):
        name = "frac" if expr.name == "tfrac" else expr.name
        return MacroCall(name, tuple(_norm(a, True) for a in expr.args))
    if isinstance(expr, Ambiguous):
        first = expr.interpretations[0]
        if isinstance(first, BinaryOp) and first.op == "*" and is_symbol(first.left) \
                and isinstance(first.right, Group):
            rebuilt = _norm(first, True)
            if isinstance(rebuilt, Ambiguous):
                return rebuilt
        interps = [_norm(i, False) for i in expr.interpretations]
        unique = list(dict.fromkeys(interps))
        return unique[0] if len(unique) == 1 else Ambiguous(tuple(unique))
    raise TypeError(f"not a MathExpr: {expr!r}")
