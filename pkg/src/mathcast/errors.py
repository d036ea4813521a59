"""Exception hierarchy shared by every mathcast module."""

from __future__ import annotations


class MathcastError(Exception):
    """Base class for all user-facing errors raised by mathcast."""


class LatexError(MathcastError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class EmptyInput(LatexError):
    def __init__(self):
        super().__init__("empty math input", 0)


class UnbalancedBraces(LatexError):
    def __init__(self, position: int):
        super().__init__("unbalanced braces", position)


class IllegalCharacter(LatexError):
    def __init__(self, char: str, position: int):
        self.char = char
        super().__init__(f"illegal character {char!r}", position)


class ParseError(LatexError):
    def __init__(self, position: int, expected: str):
        self.expected = expected
        super().__init__(f"expected {expected}", position)


class UnknownMacro(LatexError):
    def __init__(self, name: str, position: int | None = None):
        self.name = name
        super().__init__(f"unknown macro \\{name}", position)


class SchemaError(MathcastError):
    def __init__(self, line: int, field: str, detail: str = ""):
        self.line = line
        self.field = field
        msg = f"line {line}: invalid field {field!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class DuplicateMacro(MathcastError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate macro {name!r}")


class NotFound(MathcastError, LookupError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"macro {name!r} not found")


class DuplicateDocId(MathcastError):
    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"duplicate document id {doc_id!r}")


class UnknownDoc(MathcastError, LookupError):
    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"unknown document {doc_id!r}")


class TooFewTerms(MathcastError):
    def __init__(self, count: int, needed: int):
        super().__init__(f"zipf fit needs at least {needed} distinct terms, got {count}")


class KTooLarge(MathcastError):
    def __init__(self, k: int, available: int):
        super().__init__(f"k={k} exceeds the {available} available records")


class UnknownFormula(MathcastError, LookupError):
    def __init__(self, formula_id: str):
        self.formula_id = formula_id
        super().__init__(f"unknown formula {formula_id!r}")


class DocumentError(MathcastError):
    pass


class ArityMismatch(MathcastError):
    def __init__(self, macro: str, got: int, expected: int):
        self.macro = macro
        self.got = got
        self.expected = expected
        super().__init__(f"\\{macro} takes {expected} argument(s), got {got}")


class UnsupportedTarget(MathcastError):
    def __init__(self, target: str):
        self.target = target
        super().__init__(f"unsupported CAS target {target!r}")


class EvaluationError(MathcastError):
    """Numeric evaluation failed for a reason other than a pole."""


class UnboundSymbol(EvaluationError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound symbol {name!r}")


class PoleOrSingularity(EvaluationError):
    def __init__(self, where: str):
        self.where = where
        super().__init__(f"pole or singularity in {where}")


class UnknownFunction(EvaluationError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no numeric implementation for {name!r}")


class NotAnEquation(MathcastError):
    pass
