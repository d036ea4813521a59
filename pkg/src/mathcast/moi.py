"""Mathematical objects of interest: subexpression statistics over a formula corpus.

A subexpression is a complete subtree of the parse tree with at most
``max_nodes`` nodes, identified by its canonical LaTeX rendering.  Term
frequency counts subtree occurrences within a document; ambiguous nodes count
an occurrence once if any interpretation contains it.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import DuplicateDocId, KTooLarge, MathcastError, TooFewTerms, UnknownDoc
from .expr import Ambiguous, FunctionApply, MathExpr, children, is_macro_ref
from .latex_parser import render_latex

DEFAULT_MAX_NODES = 30
MIN_ZIPF_TERMS = 10
INDEX_FORMAT = "mathcast-moi"
INDEX_VERSION = 1


def _counts(expr: MathExpr, max_nodes: int) -> tuple[int, Counter]:
    if isinstance(expr, Ambiguous):
        size, merged = 1, Counter()
        for interp in expr.interpretations:
            s, c = _counts(interp, max_nodes)
            size += s
            merged |= c
        return size, merged
    size, total = 1, Counter()
    for child in children(expr):
        if isinstance(expr, FunctionApply) and child is expr.head and is_macro_ref(child):
            size += 1
            continue
        s, c = _counts(child, max_nodes)
        size += s
        total.update(c)
    if size <= max_nodes:
        total[render_latex(expr)] += 1
    return size, total


def subexpression_counts(expr: MathExpr, max_nodes: int = DEFAULT_MAX_NODES) -> Counter:
    """Occurrence counts of every canonical subexpression of ``expr``."""
    if max_nodes < 1:
        raise ValueError("max_nodes must be positive")
    return _counts(expr, max_nodes)[1]


def enumerate_subexpressions(expr: MathExpr, max_nodes: int = DEFAULT_MAX_NODES) -> set[str]:
    return set(subexpression_counts(expr, max_nodes))


@dataclass(frozen=True)
class MOIRecord:
    canonical: str
    tf: Mapping[str, int] = field(hash=False)
    df: int
    global_count: int


@dataclass(frozen=True)
class MOIIndex:
    records: Mapping[str, MOIRecord] = field(hash=False)
    doc_count: int
    per_doc: Mapping[str, Mapping[str, int]] = field(hash=False)
    max_nodes: int = DEFAULT_MAX_NODES


def _build(per_doc: dict[str, dict[str, int]], max_nodes: int) -> MOIIndex:
    tfs: dict[str, dict[str, int]] = {}
    for doc_id in sorted(per_doc):
        for canon, tf in per_doc[doc_id].items():
            tfs.setdefault(canon, {})[doc_id] = tf
    records = {
        canon: MOIRecord(canon, tf, len(tf), sum(tf.values()))
        for canon, tf in sorted(tfs.items())
    }
    ordered = {d: dict(sorted(per_doc[d].items())) for d in sorted(per_doc)}
    return MOIIndex(records, len(per_doc), ordered, max_nodes)


def index_corpus(docs: Iterable[tuple[str, Iterable[MathExpr]]],
                 max_nodes: int = DEFAULT_MAX_NODES) -> MOIIndex:
    per_doc: dict[str, dict[str, int]] = {}
    for doc_id, exprs in docs:
        if doc_id in per_doc:
            raise DuplicateDocId(doc_id)
        counts: Counter = Counter()
        for expr, mult in Counter(exprs).items():
            for canon, n in subexpression_counts(expr, max_nodes).items():
                counts[canon] += n * mult
        per_doc[doc_id] = dict(counts)
    return _build(per_doc, max_nodes)


def merge_indexes(a: MOIIndex, b: MOIIndex) -> MOIIndex:
    """Combine indexes built over disjoint document sets; commutative."""
    if a.max_nodes != b.max_nodes:
        raise MathcastError("cannot merge indexes built with different max_nodes")
    clash = sorted(set(a.per_doc) & set(b.per_doc))
    if clash:
        raise DuplicateDocId(clash[0])
    merged = {d: dict(v) for d, v in a.per_doc.items()}
    merged.update({d: dict(v) for d, v in b.per_doc.items()})
    return _build(merged, a.max_nodes)


def tfidf(index: MOIIndex, canonical: str, doc_id: str) -> float:
    """Raw term frequency times natural-log inverse document frequency."""
    if doc_id not in index.per_doc:
        raise UnknownDoc(doc_id)
    tf = index.per_doc[doc_id].get(canonical, 0)
    if tf == 0:
        return 0.0
    return tf * math.log(index.doc_count / index.records[canonical].df)


def top_terms(index: MOIIndex, doc_id: str, k: int = 10) -> list[tuple[str, float]]:
    if doc_id not in index.per_doc:
        raise UnknownDoc(doc_id)
    scored = [(c, tfidf(index, c, doc_id)) for c in index.per_doc[doc_id]]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]


def rank_frequency(index: MOIIndex) -> list[tuple[str, int]]:
    """Records by global count, most frequent first; ties by canonical string."""
    return sorted(((c, r.global_count) for c, r in index.records.items()),
                  key=lambda pair: (-pair[1], pair[0]))


def zipf_fit(index: MOIIndex) -> tuple[float, float]:
    """Least-squares slope of log frequency against log rank, and its r²."""
    ranked = rank_frequency(index)
    if len(ranked) < MIN_ZIPF_TERMS:
        raise TooFewTerms(len(ranked), MIN_ZIPF_TERMS)
    x = np.log(np.arange(1, len(ranked) + 1, dtype=float))
    y = np.log(np.array([f for _, f in ranked], dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 0.0, 1.0
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return float(slope), r2


def stop_expressions(index: MOIIndex, k: int) -> list[str]:
    """The ``k`` subexpressions with highest document frequency."""
    if k < 1:
        raise ValueError("k must be positive")
    if k > len(index.records):
        raise KTooLarge(k, len(index.records))
    ranked = sorted(index.records.values(), key=lambda r: (-r.df, r.canonical))
    return [r.canonical for r in ranked[:k]]


def index_to_json(index: MOIIndex) -> dict:
    return {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "max_nodes": index.max_nodes,
        "doc_count": index.doc_count,
        "documents": {d: dict(sorted(tf.items())) for d, tf in sorted(index.per_doc.items())},
    }


def index_from_json(obj: dict) -> MOIIndex:
    if obj.get("format") != INDEX_FORMAT or obj.get("version") != INDEX_VERSION:
        raise MathcastError("not a mathcast MOI index (format/version mismatch)")
    docs = obj.get("documents")
    if not isinstance(docs, dict):
        raise MathcastError("MOI index lacks a documents map")
    per_doc = {d: {c: int(n) for c, n in tf.items()} for d, tf in docs.items()}
    index = _build(per_doc, int(obj.get("max_nodes", DEFAULT_MAX_NODES)))
    if index.doc_count != obj.get("doc_count", index.doc_count):
        raise MathcastError("MOI index doc_count disagrees with its documents")
    return index


def save_index(index: MOIIndex, path) -> None:
    Path(path).write_text(json.dumps(index_to_json(index), sort_keys=True, ensure_ascii=False) + "\n",
                          encoding="utf-8")


def load_index(path) -> MOIIndex:
    return index_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


_DISPLAY = re.compile(r"\\begin\{(equation\*?|align\*?)\}(.*?)\\end\{\1\}|\$\$(.*?)\$\$|\$(.*?)\$",
                      re.DOTALL)


def formulas_from_tex(text: str) -> list[str]:
    """Math snippets of a ``.tex`` file: ``$...$``/equation blocks, else one per line."""
    if "$" in text or "\\begin{" in text:
        found = []
        for m in _DISPLAY.finditer(text):
            body = next(g for g in m.groups()[1:] if g is not None)
            body = re.sub(r"\\label\{[^}]*\}", "", body).strip()
            if body:
                found.append(body)
        return found
    return [line.strip() for line in text.splitlines()
            if line.strip() and not line.lstrip().startswith("%")]
