"""Gold-set evaluation of the full parse, disambiguate, translate, verify pipeline.

Gold files are tab-separated with the columns
``id, latex, context, gold_semantic, gold_cas_json, category``; a first line
starting with ``id<TAB>`` is a header.  ``context`` is LaTeX text whose
definitions drive the bindings in context-sensitive mode.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from .cas_translate import canonical_target, supported_targets, translate
from .disambiguation import context_bindings, resolve, to_semantic_latex, zero_arity_names
from .errors import ArityMismatch, LatexError, SchemaError
from .expr import Relation
from .latex_parser import parse_latex
from .lexicon import ContentDictionary
from .verify import SamplingConfig, constraints_for, numeric_verify

CATEGORIES = ("identity", "definition", "ambiguous", "plain")
MODES = ("context_sensitive", "context_free")
COLUMNS = ("id", "latex", "context", "gold_semantic", "gold_cas_json", "category")


@dataclass(frozen=True)
class GoldEntry:
    id: str
    latex: str
    context: str
    gold_semantic: str
    gold_cas: dict = field(hash=False)
    category: str


def parse_gold(text: str, known_macros: Iterable[str] = ()) -> list[GoldEntry]:
    known = tuple(known_macros)
    entries: list[GoldEntry] = []
    seen = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        if line_no == 1 and raw.startswith("id\t"):
            continue
        cols = raw.split("\t")
        if len(cols) != len(COLUMNS):
            raise SchemaError(line_no, "columns", f"expected {len(COLUMNS)} tab-separated fields")
        id_, latex, context, semantic, cas_json, category = cols
        if not id_ or id_ in seen:
            raise SchemaError(line_no, "id", "missing or duplicate")
        try:
            parse_latex(latex, known_macros=known)
        except LatexError as exc:
            raise SchemaError(line_no, "latex", str(exc)) from None
        try:
            cas = json.loads(cas_json)
        except json.JSONDecodeError as exc:
            raise SchemaError(line_no, "gold_cas_json", exc.msg) from None
        if not isinstance(cas, dict) or not all(isinstance(v, str) for v in cas.values()):
            raise SchemaError(line_no, "gold_cas_json", "must map CAS names to strings")
        if not set(cas) <= set(supported_targets()):
            raise SchemaError(line_no, "gold_cas_json", "unsupported target name")
        if category not in CATEGORIES:
            raise SchemaError(line_no, "category", f"must be one of {', '.join(CATEGORIES)}")
        seen.add(id_)
        entries.append(GoldEntry(id_, latex, context, semantic, cas, category))
    return entries


def load_gold(path, known_macros: Iterable[str] = ()) -> list[GoldEntry]:
    return parse_gold(Path(path).read_text(encoding="utf-8"), known_macros)


def bundled_gold_path():
    return resources.files("mathcast") / "data" / "gold.tsv"


def normalize_cas(text: str) -> str:
    """Whitespace-free text with redundant outer parentheses removed."""
    s = "".join(text.split())
    while len(s) >= 2 and s[0] == "(" and s[-1] == ")" and _encloses(s):
        s = s[1:-1]
    return s


def _encloses(s: str) -> bool:
    depth = 0
    for k, ch in enumerate(s):
        depth += ch == "("
        depth -= ch == ")"
        if depth == 0 and k < len(s) - 1:
            return False
    return True


@dataclass(frozen=True)
class EntryResult:
    id: str
    category: str
    semantic: str
    cas: str
    correct: bool
    outcome: str

    def to_json(self) -> dict:
        return {"id": self.id, "category": self.category, "semantic": self.semantic,
                "cas": self.cas, "correct": self.correct, "outcome": self.outcome}


@dataclass(frozen=True)
class Metrics:
    mode: str
    target: str
    count: int
    translation_accuracy: float
    verified_rate: float
    failed_rate: float
    inconclusive_rate: float
    by_category: dict = field(hash=False)
    entries: tuple = ()

    def to_json(self, with_entries: bool = False) -> dict:
        out = {"mode": self.mode, "target": self.target, "count": self.count,
               "translation_accuracy": self.translation_accuracy,
               "verified_rate": self.verified_rate, "failed_rate": self.failed_rate,
               "inconclusive_rate": self.inconclusive_rate, "by_category": self.by_category}
        if with_entries:
            out["entries"] = [e.to_json() for e in self.entries]
        return out


def run_entry(entry: GoldEntry, lexicon: ContentDictionary, mode: str, target: str,
              config: SamplingConfig) -> EntryResult:
    bindings = context_bindings(entry.context, lexicon) \
        if mode == "context_sensitive" and entry.context.strip() else {}
    expr = parse_latex(entry.latex, known_macros=zero_arity_names(lexicon))
    resolved = resolve(expr, bindings)
    try:
        semantic = to_semantic_latex(resolved, lexicon)
        text = translate(resolved, target, lexicon).text
    except ArityMismatch:
        semantic, text = "", ""
    gold = entry.gold_cas.get(target)
    correct = gold is not None and bool(text) and normalize_cas(text) == normalize_cas(gold)
    if isinstance(resolved, Relation) and resolved.rel == "=":
        outcome = numeric_verify(resolved, constraints_for(resolved, lexicon), config, entry.id).outcome
    else:
        outcome = "Inconclusive"
    return EntryResult(entry.id, entry.category, semantic, text, correct, outcome)


def _rates(results: list[EntryResult]) -> dict:
    n = len(results)
    return {
        "count": n,
        "translation_accuracy": sum(r.correct for r in results) / n,
        "verified_rate": sum(r.outcome == "Verified" for r in results) / n,
        "failed_rate": sum(r.outcome == "Failed" for r in results) / n,
        "inconclusive_rate": sum(r.outcome == "Inconclusive" for r in results) / n,
    }


def evaluate_pipeline(entries: list[GoldEntry], lexicon: ContentDictionary,
                      mode: str = "context_sensitive", target: str = "Mathematica",
                      config: SamplingConfig | None = None) -> Metrics:
    """Translation accuracy and verification rates over a gold set.

    ``context_free`` ignores every entry's context, so ambiguous juxtapositions
    fall back to multiplication.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {', '.join(MODES)}")
    if not entries:
        raise ValueError("evaluate_pipeline needs at least one entry")
    target = canonical_target(target)
    config = config or SamplingConfig()
    results = [run_entry(e, lexicon, mode, target, config) for e in entries]
    overall = _rates(results)
    by_category = {}
    for cat in CATEGORIES:
        subset = [r for r in results if r.category == cat]
        if subset:
            by_category[cat] = _rates(subset)
    return Metrics(mode, target, overall["count"], overall["translation_accuracy"],
                   overall["verified_rate"], overall["failed_rate"], overall["inconclusive_rate"],
                   by_category, tuple(results))
