"""Content dictionary of semantic macros with per-CAS translation patterns.

File format (JSON lines, UTF-8): the first non-blank line is a header object
``{"format": "mathcast-lexicon", "version": ..., "source": ...}``; every later
line is one macro object with exactly the keys ``name, arity, description,
keywords, cas_patterns, constraints, branch_cut_note``.  An empty file is a
valid empty dictionary.  See README.md for the constraint encoding.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Union

from .errors import DuplicateMacro, NotFound, SchemaError

TARGETS = ("Mathematica", "Maple", "SymPyText")
FORMAT = "mathcast-lexicon"
MACRO_KEYS = ("name", "arity", "description", "keywords", "cas_patterns", "constraints",
              "branch_cut_note")
SLOT = re.compile(r"\$(\d+)")


@dataclass(frozen=True)
class Domain:
    """Variable restricted to a real interval or an integer range (``None`` = unbounded)."""

    applies_to: str
    integer: bool = False
    lo: float | None = None
    hi: float | None = None

    def __post_init__(self):
        lo = -math.inf if self.lo is None else self.lo
        hi = math.inf if self.hi is None else self.hi
        if self.integer and math.isfinite(lo) and math.isfinite(hi):
            if math.ceil(lo) > math.floor(hi):
                raise ValueError(f"empty integer domain for {self.applies_to}")
        elif lo > hi:
            raise ValueError(f"empty interval for {self.applies_to}")

    def contains(self, value: float) -> bool:
        if self.integer and value != int(value):
            return False
        if self.lo is not None and value < self.lo:
            return False
        return self.hi is None or value <= self.hi


@dataclass(frozen=True)
class AvoidPoles:
    applies_to: str
    positions: str = ""


@dataclass(frozen=True)
class Custom:
    applies_to: str
    text: str = ""


Constraint = Union[Domain, AvoidPoles, Custom]


def constraint_to_json(c: Constraint) -> dict:
    if isinstance(c, Domain):
        return {"kind": "Domain", "applies_to": c.applies_to,
                "set": "integer" if c.integer else "real", "lo": c.lo, "hi": c.hi}
    if isinstance(c, AvoidPoles):
        return {"kind": "AvoidPoles", "applies_to": c.applies_to, "positions": c.positions}
    return {"kind": "Custom", "applies_to": c.applies_to, "text": c.text}


def constraint_from_json(obj: dict) -> Constraint:
    kind = obj.get("kind")
    applies_to = obj.get("applies_to")
    if not isinstance(applies_to, str) or not applies_to:
        raise ValueError("applies_to must be a non-empty string")
    if kind == "Domain":
        if obj.get("set") not in ("integer", "real"):
            raise ValueError("Domain.set must be 'integer' or 'real'")
        lo, hi = obj.get("lo"), obj.get("hi")
        for bound in (lo, hi):
            if bound is not None and not isinstance(bound, (int, float)):
                raise ValueError("Domain bounds must be numbers or null")
        return Domain(applies_to, obj["set"] == "integer", lo, hi)
    if kind == "AvoidPoles":
        return AvoidPoles(applies_to, str(obj.get("positions", "")))
    if kind == "Custom":
        return Custom(applies_to, str(obj.get("text", "")))
    raise ValueError(f"unknown constraint kind {kind!r}")


@dataclass(frozen=True)
class SemanticMacro:
    name: str
    arity: int
    description: str
    keywords: tuple[str, ...]
    cas_patterns: dict = field(hash=False)
    constraints: tuple[Constraint, ...] = ()
    branch_cut_note: str | None = None

    def pattern(self, target: str) -> str | None:
        return self.cas_patterns.get(target)

    def keyword_tokens(self) -> frozenset[str]:
        return frozenset(tok for kw in self.keywords for tok in kw.lower().split())

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "arity": self.arity,
            "description": self.description,
            "keywords": list(self.keywords),
            "cas_patterns": dict(sorted(self.cas_patterns.items())),
            "constraints": [constraint_to_json(c) for c in self.constraints],
            "branch_cut_note": self.branch_cut_note,
        }


@dataclass(frozen=True)
class ContentDictionary:
    macros: dict = field(default_factory=dict, hash=False)
    version: str = ""
    source: str = ""

    def __contains__(self, name: str) -> bool:
        return name in self.macros

    def __len__(self) -> int:
        return len(self.macros)

    def __iter__(self) -> Iterator[SemanticMacro]:
        return iter(self.macros.values())

    def get(self, name: str) -> SemanticMacro | None:
        return self.macros.get(name)

    def without(self, *names: str) -> "ContentDictionary":
        kept = {k: v for k, v in self.macros.items() if k not in names}
        return ContentDictionary(kept, self.version, self.source)


def pattern_arity(pattern: str) -> int:
    slots = [int(m) for m in SLOT.findall(pattern)]
    return max(slots) + 1 if slots else 0


def instantiate(pattern: str, args: Iterable[str]) -> str:
    """Fill ``$k`` slots of a CAS pattern with already-translated argument strings."""
    values = list(args)

    def fill(m: re.Match) -> str:
        k = int(m.group(1))
        if k >= len(values):
            raise IndexError(f"pattern slot ${k} has no argument")
        return values[k]

    return SLOT.sub(fill, pattern)


def _macro_from_json(obj, line: int) -> SemanticMacro:
    if not isinstance(obj, dict):
        raise SchemaError(line, "<line>", "expected a JSON object")
    for key in MACRO_KEYS:
        if key not in obj:
            raise SchemaError(line, key, "missing")
    extra = sorted(set(obj) - set(MACRO_KEYS))
    if extra:
        raise SchemaError(line, extra[0], "unexpected key")
    name = obj["name"]
    if not isinstance(name, str) or not re.fullmatch(r"[A-Za-z]+", name):
        raise SchemaError(line, "name", "must be a non-empty ASCII word")
    arity = obj["arity"]
    if not isinstance(arity, int) or isinstance(arity, bool) or arity < 0:
        raise SchemaError(line, "arity", "must be a non-negative integer")
    if not isinstance(obj["description"], str):
        raise SchemaError(line, "description", "must be a string")
    keywords = obj["keywords"]
    if not isinstance(keywords, list) or not keywords or not all(
            isinstance(k, str) and k.strip() and k == k.lower() for k in keywords):
        raise SchemaError(line, "keywords", "must be a non-empty list of lowercase phrases")
    patterns = obj["cas_patterns"]
    if not isinstance(patterns, dict) or not all(
            isinstance(k, str) and isinstance(v, str) and v for k, v in patterns.items()):
        raise SchemaError(line, "cas_patterns", "must map CAS names to pattern strings")
    for target, pattern in patterns.items():
        if pattern_arity(pattern) != arity:
            raise SchemaError(line, "cas_patterns", f"{target} pattern slots disagree with arity {arity}")
    if not isinstance(obj["constraints"], list):
        raise SchemaError(line, "constraints", "must be a list")
    try:
        constraints = tuple(constraint_from_json(c) for c in obj["constraints"])
    except (ValueError, AttributeError, TypeError) as exc:
        raise SchemaError(line, "constraints", str(exc)) from None
    note = obj["branch_cut_note"]
    if note is not None and not isinstance(note, str):
        raise SchemaError(line, "branch_cut_note", "must be a string or null")
    return SemanticMacro(name, arity, obj["description"], tuple(keywords), dict(patterns),
                         constraints, note)


def parse_lexicon(text: str, source: str = "") -> ContentDictionary:
    header = None
    macros: dict[str, SemanticMacro] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaError(line_no, "<line>", f"invalid JSON: {exc.msg}") from None
        if header is None:
            if not isinstance(obj, dict) or "version" not in obj or "name" in obj:
                raise SchemaError(line_no, "version", "header line with a version key must come first")
            if not isinstance(obj["version"], str):
                raise SchemaError(line_no, "version", "must be a string")
            header = obj
            continue
        macro = _macro_from_json(obj, line_no)
        if macro.name in macros:
            raise DuplicateMacro(macro.name)
        macros[macro.name] = macro
    if header is None:
        return ContentDictionary({}, "", source)
    return ContentDictionary(macros, header["version"], str(header.get("source", source)))


def load_lexicon(path) -> ContentDictionary:
    """Read and validate a JSON-lines lexicon; raises ``OSError`` or ``SchemaError``."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_lexicon(text, source=str(path))


def dump_lexicon(lexicon: ContentDictionary) -> str:
    lines = [json.dumps({"format": FORMAT, "version": lexicon.version, "source": lexicon.source},
                        ensure_ascii=False)]
    lines += [json.dumps(m.to_json(), ensure_ascii=False) for m in lexicon]
    return "\n".join(lines) + "\n"


def save_lexicon(lexicon: ContentDictionary, path) -> None:
    Path(path).write_text(dump_lexicon(lexicon), encoding="utf-8")


def seed_lexicon_path():
    return resources.files("mathcast") / "data" / "seed_lexicon.jsonl"


def load_seed_lexicon() -> ContentDictionary:
    text = seed_lexicon_path().read_text(encoding="utf-8")
    return parse_lexicon(text, source="mathcast seed lexicon")


def lookup_by_macro(lexicon: ContentDictionary, name: str) -> SemanticMacro:
    macro = lexicon.get(name)
    if macro is None:
        raise NotFound(name)
    return macro


def lookup_by_keywords(lexicon: ContentDictionary, phrases) -> list[tuple[SemanticMacro, float]]:
    """Rank macros by Jaccard overlap of whitespace tokens with the query phrases."""
    query = frozenset(tok for p in phrases for tok in p.lower().split())
    if not query:
        return []
    scored = []
    for macro in lexicon:
        kw = macro.keyword_tokens()
        inter = len(query & kw)
        if inter:
            scored.append((macro, inter / len(query | kw)))
    scored.sort(key=lambda pair: (-pair[1], pair[0].name))
    return scored
