"""Context-driven disambiguation of presentation formulas.

A LaTeX document is split into text and formula blocks.  Definition phrases
found around each formula are looked up in the content dictionary, and the
best match binds the formula's principal symbol to a semantic macro from that
block until the symbol is redefined.  ``resolve`` then collapses every
ambiguous juxtaposition according to the bindings in scope.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .errors import ArityMismatch, DocumentError, LatexError, UnknownFormula
from .expr import (KNOWN_FUNCTIONS, Ambiguous, BinaryOp, Constant, FunctionApply, Group,
                   Identifier, MathExpr, MacroCall, Relation, apply_macro, children,
                   is_macro_ref, is_symbol, symbol_key, walk)
from .latex_parser import parse_latex, render_latex
from .lexicon import ContentDictionary, SemanticMacro, lookup_by_keywords

#: Minimum keyword score for a phrase to bind a symbol at all.
MIN_BINDING_SCORE = 0.5
WINDOW = 10
MAX_PHRASE = 8

# -- documents -----------------------------------------------------------------


@dataclass(frozen=True)
class Text:
    text: str


@dataclass(frozen=True)
class Formula:
    id: str
    expr: MathExpr
    span: tuple[int, int]
    source: str = ""
    constraints: tuple[str, ...] = ()


Block = Union[Text, Formula]


@dataclass(frozen=True)
class Document:
    blocks: tuple[Block, ...]
    section_boundaries: tuple[int, ...] = ()

    def __post_init__(self):
        ids = [b.id for b in self.blocks if isinstance(b, Formula)]
        if len(set(ids)) != len(ids):
            raise DocumentError("formula ids must be unique")
        spans = [b.span for b in self.blocks if isinstance(b, Formula)]
        for (_, end), (start, _) in zip(spans, spans[1:]):
            if start < end:
                raise DocumentError("formula spans must be ordered and non-overlapping")

    def formulas(self) -> list[Formula]:
        return [b for b in self.blocks if isinstance(b, Formula)]

    def block_of(self, formula_id: str) -> int:
        for i, b in enumerate(self.blocks):
            if isinstance(b, Formula) and b.id == formula_id:
                return i
        raise UnknownFormula(formula_id)


_MATH = re.compile(
    r"\\begin\{(?P<env>equation\*?)\}(?P<envbody>.*?)\\end\{(?P=env)\}"
    r"|\$\$(?P<dd>.*?)\$\$"
    r"|\\\[(?P<br>.*?)\\\]"
    r"|\$(?P<d>[^$]*?)\$",
    re.DOTALL,
)
_SECTION = re.compile(r"\\(?:sub)*section\*?\{[^}]*\}")
_LABEL = re.compile(r"\\label\{([^}]*)\}")
_CONSTRAINT = re.compile(r"^\s*%\s*constraint:\s*(.*?)\s*$", re.MULTILINE)
_COMMENT = re.compile(r"(?<!\\)%.*$", re.MULTILINE)
_COMMAND = re.compile(r"\\[A-Za-z]+\*?(?:\{([^}]*)\})?")


def _clean_text(raw: str) -> str:
    raw = _COMMENT.sub("", raw)
    return _COMMAND.sub(lambda m: m.group(1) or " ", raw)


def read_document(latex: str, known_macros: Iterable[str] = ()) -> Document:
    """Split a LaTeX source into text and formula blocks.

    Formulas are ``$...$``, ``$$...$$``, ``\\[...\\]`` and ``equation``
    environments; ``\\label`` gives the id, otherwise ``f1``, ``f2``, ...
    ``% constraint: ...`` comments attach to the next formula.  Formulas that
    fail to parse are dropped.
    """
    known = tuple(known_macros)
    blocks: list[Block] = []
    sections: list[int] = []
    pending: list[str] = []
    counter = 0
    cursor = 0

    def add_text(raw: str):
        pending.extend(_CONSTRAINT.findall(raw))
        pieces = _SECTION.split(raw)
        for k, piece in enumerate(pieces):
            if k > 0:
                sections.append(len(blocks))
            text = " ".join(_clean_text(piece).split())
            if text:
                blocks.append(Text(text))

    for m in _MATH.finditer(latex):
        add_text(latex[cursor:m.start()])
        cursor = m.end()
        body = next(g for g in (m.group("envbody"), m.group("dd"), m.group("br"), m.group("d"))
                    if g is not None)
        label = _LABEL.search(body)
        body = _LABEL.sub("", body).strip()
        counter += 1
        if not body:
            continue
        try:
            expr = parse_latex(body, strict=False, known_macros=known)
        except LatexError:
            continue
        fid = label.group(1) if label else f"f{counter}"
        blocks.append(Formula(fid, expr, (m.start(), m.end()), body, tuple(pending)))
        pending.clear()
    add_text(latex[cursor:])
    return Document(tuple(blocks), tuple(sorted(set(sections))))


# -- annotations ---------------------------------------------------------------

STOPWORDS = frozenset("""
a an the of and or in on at to for by with from as is are be been was were being
this that these those it its we our us let denote denotes denoted represent
represents stands stand called call write written where which who when while if
then than also here there now later further finally next thus hence so such
not no but any all each every some more most less least very can may must will
shall should would could has have had do does using use used given take
""".split())
_ARTICLES = frozenset(("the", "a", "an"))
_BRIDGE = frozenset(("of",))
_VERBS = {
    ("is", "called"): 2, ("is", "the"): 1, ("stands", "for"): 2, ("is",): 1,
    ("denotes",): 1, ("denote",): 1, ("be",): 1, ("represents",): 1, ("represent",): 1,
}
_TOKEN = re.compile(r"[A-Za-z][A-Za-z'\-]*|[.;:!?]")
_SENTENCE_END = frozenset(".;:!?")


def _words(text: str) -> list[str]:
    return [t.lower() for t in _TOKEN.findall(text)]


def _last_sentence(tokens: list[str]) -> list[str]:
    for k in range(len(tokens) - 1, -1, -1):
        if tokens[k] in _SENTENCE_END:
            return tokens[k + 1:]
    return tokens


def _first_sentence(tokens: list[str]) -> list[str]:
    for k, tok in enumerate(tokens):
        if tok in _SENTENCE_END:
            return tokens[:k]
    return tokens


def _is_content(word: str) -> bool:
    return word not in STOPWORDS and word not in _SENTENCE_END


def _phrase_before(tokens: list[str]) -> str | None:
    """Content-word run ending right before the formula (``the prime counting function``)."""
    k = len(tokens)
    start = k
    while start > 0 and k - start < MAX_PHRASE:
        w = tokens[start - 1]
        if _is_content(w):
            start -= 1
        elif w in _BRIDGE and start < k and start >= 2 and _is_content(tokens[start - 2]):
            start -= 1
        elif w in _ARTICLES and start >= 2 and tokens[start - 2] in _BRIDGE and start < k:
            start -= 1
        else:
            break
    words = tokens[start:]
    while words and (words[0] in _BRIDGE or words[0] in _ARTICLES):
        words = words[1:]
    return " ".join(words) if words else None


def _phrase_at(tokens: list[str], start: int) -> tuple[str, int] | None:
    """Content-word run starting at ``start``; ``of``/``of the`` may link words."""
    k = start
    while k < len(tokens) and tokens[k] in _ARTICLES:
        k += 1
    begin = k
    end = k
    while end < len(tokens) and end - begin < MAX_PHRASE:
        w = tokens[end]
        if _is_content(w):
            end += 1
            continue
        if w in _BRIDGE and end > begin:
            j = end + 1
            while j < len(tokens) and tokens[j] in _ARTICLES:
                j += 1
            if j < len(tokens) and _is_content(tokens[j]):
                end = j
                continue
        break
    if end == begin:
        return None
    return " ".join(tokens[begin:end]), begin


def _phrase_after(tokens: list[str]) -> tuple[str, int] | None:
    """``is/denotes/be/is called <phrase>`` right after the formula."""
    for verbs, width in sorted(_VERBS.items(), key=lambda kv: -kv[1]):
        if tuple(tokens[:width]) == verbs:
            found = _phrase_at(tokens, width)
            if found:
                return found
    return None


def _runs(tokens: list[str]) -> list[tuple[str, int, int]]:
    """Maximal content-word runs as (phrase, start, end)."""
    out, k = [], 0
    while k < len(tokens):
        if _is_content(tokens[k]):
            j = k
            while j < len(tokens) and _is_content(tokens[j]):
                j += 1
            out.append((" ".join(tokens[k:j]), k, j))
            k = j
        else:
            k += 1
    return out


def _text_tokens(doc: Document, index: int) -> list[str] | None:
    if 0 <= index < len(doc.blocks) and isinstance(doc.blocks[index], Text):
        return _words(doc.blocks[index].text)
    return None


def _is_formula(doc: Document, index: int) -> bool:
    return 0 <= index < len(doc.blocks) and isinstance(doc.blocks[index], Formula)


def _in_after_window(tokens: list[str], p: int, q: int) -> bool:
    return q <= len(_first_sentence(tokens)) and p < WINDOW


def _in_before_window(tokens: list[str], p: int, q: int) -> bool:
    offset = len(tokens) - len(_last_sentence(tokens))
    return p >= offset and len(tokens) - q < WINDOW


def extract_annotations(doc: Document, formula_id: str) -> list[tuple[str, int]]:
    """Candidate definition phrases around a formula, nearest first.

    Looks at the sentence ending just before the formula and the sentence
    starting right after it.  Explicit patterns are a phrase immediately
    preceding the formula and ``<formula> is/denotes/be <phrase>``; any other
    content-word run within the token window is kept too, unless it sits
    closer to a neighbouring formula.
    """
    i = doc.block_of(formula_id)
    found: dict[str, int] = {}

    def keep(phrase: str, dist: int):
        if phrase and (phrase not in found or dist < found[phrase]):
            found[phrase] = dist

    before_all = _text_tokens(doc, i - 1)
    if before_all is not None:
        offset = len(before_all) - len(_last_sentence(before_all))
        phrase = _phrase_before(before_all[offset:])
        if phrase:
            keep(phrase, 0)
        for run, s, e in _runs(before_all[offset:]):
            p, q = s + offset, e + offset
            dist = len(before_all) - q
            if dist < WINDOW and not (_is_formula(doc, i - 2) and
                                      _in_after_window(before_all, p, q) and p < dist):
                keep(run, dist)

    after_all = _text_tokens(doc, i + 1)
    if after_all is not None:
        after = _first_sentence(after_all)
        hit = _phrase_after(after)
        if hit:
            keep(*hit)
        for run, p, q in _runs(after):
            other = len(after_all) - q
            if p < WINDOW and not (_is_formula(doc, i + 2) and
                                   _in_before_window(after_all, p, q) and other < p):
                keep(run, p)
    return sorted(found.items(), key=lambda pair: (pair[1], pair[0]))


# -- dependency graph ----------------------------------------------------------


@dataclass(frozen=True)
class FormulaNode:
    id: str
    expr: MathExpr
    annotations: tuple[tuple[str, int], ...]
    out_edges: tuple[str, ...]
    block: int = 0


def _symbol_subtrees(expr: MathExpr) -> set[str]:
    # Every shared subexpression containing a symbol contains a shared symbol
    # subtree, so comparing those is enough.
    return {render_latex(n) for n in walk(expr) if is_symbol(n)}


def build_dependency_graph(doc: Document) -> list[FormulaNode]:
    formulas = [(doc.block_of(f.id), f) for f in doc.formulas()]
    symbols = [_symbol_subtrees(f.expr) for _, f in formulas]
    nodes = []
    for a, (block, f) in enumerate(formulas):
        edges = tuple(formulas[b][1].id for b in range(a + 1, len(formulas))
                      if symbols[a] & symbols[b])
        nodes.append(FormulaNode(f.id, f.expr, tuple(extract_annotations(doc, f.id)), edges, block))
    return nodes


# -- bindings ------------------------------------------------------------------


@dataclass(frozen=True)
class SemanticBinding:
    scope: tuple[int, int]
    symbol: str
    macro: str
    confidence: float
    origin: str

    def covers(self, block: int) -> bool:
        return self.scope[0] <= block <= self.scope[1]

    def to_json(self) -> dict:
        return {"symbol": self.symbol, "macro": self.macro, "scope": list(self.scope),
                "confidence": self.confidence, "origin": self.origin}


def principal_symbol(expr: MathExpr) -> str | None:
    """The symbol a definition phrase next to ``expr`` most plausibly describes."""
    if is_symbol(expr):
        return symbol_key(expr)
    if isinstance(expr, Ambiguous):
        return principal_symbol(expr.interpretations[-1])
    if isinstance(expr, FunctionApply) and is_symbol(expr.head):
        return symbol_key(expr.head)
    if isinstance(expr, Relation):
        return principal_symbol(expr.left)
    return None


def best_macro(annotations, lexicon: ContentDictionary,
               min_score: float = MIN_BINDING_SCORE) -> tuple[SemanticMacro, float, str] | None:
    best = None
    for phrase, dist in annotations:
        ranked = lookup_by_keywords(lexicon, [phrase])
        if not ranked or ranked[0][1] < min_score:
            continue
        macro, score = ranked[0]
        conf = score / (1 + dist)
        key = (-conf, macro.name)
        if best is None or key < best[0]:
            best = (key, macro, conf, phrase)
    return None if best is None else best[1:]


def bind_semantics(graph: list[FormulaNode], doc: Document, lexicon: ContentDictionary,
                   min_score: float = MIN_BINDING_SCORE) -> list[SemanticBinding]:
    """Scoped symbol bindings: each holds from its defining block to the next redefinition."""
    last = len(doc.blocks) - 1
    events: dict[str, list[tuple[int, str, float, str]]] = {}
    for node in graph:
        symbol = principal_symbol(node.expr)
        if symbol is None or not node.annotations:
            continue
        hit = best_macro(node.annotations, lexicon, min_score)
        if hit is None:
            continue
        macro, conf, _ = hit
        events.setdefault(symbol, []).append((node.block, macro.name, conf, node.id))
    out = []
    for symbol, evs in events.items():
        for k, (block, macro, conf, origin) in enumerate(evs):
            end = evs[k + 1][0] - 1 if k + 1 < len(evs) else last
            out.append(SemanticBinding((block, end), symbol, macro, conf, origin))
    out.sort(key=lambda b: (b.scope[0], b.symbol))
    return out


def bindings_at(bindings: Iterable[SemanticBinding], block: int,
                lexicon: ContentDictionary) -> dict[str, SemanticMacro]:
    scope = {}
    for b in bindings:
        if b.covers(block) and b.macro in lexicon:
            scope[b.symbol] = lexicon.get(b.macro)
    return scope


def analyze(doc: Document, lexicon: ContentDictionary) -> tuple[list[FormulaNode], list[SemanticBinding]]:
    graph = build_dependency_graph(doc)
    return graph, bind_semantics(graph, doc, lexicon)


def context_bindings(latex: str, lexicon: ContentDictionary) -> dict[str, SemanticMacro]:
    """Bindings in force at the end of a context document."""
    doc = read_document(latex, known_macros=zero_arity_names(lexicon))
    _, bindings = analyze(doc, lexicon)
    return bindings_at(bindings, len(doc.blocks) - 1, lexicon) if doc.blocks else {}


def zero_arity_names(lexicon: ContentDictionary) -> tuple[str, ...]:
    return tuple(m.name for m in lexicon if m.arity == 0)


# -- resolution ----------------------------------------------------------------


def _apply_bound(head: MathExpr, args: tuple, bindings) -> MathExpr | None:
    key = symbol_key(head)
    macro = bindings.get(key) if key is not None else None
    if macro is None:
        return None
    sub = head.sub if isinstance(head, Identifier) else None
    full = ((sub,) if sub is not None else ()) + tuple(args)
    if macro.arity == len(full) and (args or sub is not None):
        return apply_macro(macro.name, *(resolve(a, bindings) for a in full))
    return None


def _resolve_symbol(expr: MathExpr, bindings) -> MathExpr:
    found = _apply_bound(expr, (), bindings)
    if found is not None:
        return found
    key = symbol_key(expr)
    macro = bindings.get(key) if key is not None else None
    if macro is not None and macro.arity == 0 and not (isinstance(expr, Identifier) and expr.sub):
        return apply_macro(macro.name)
    if isinstance(expr, Identifier) and expr.sub is not None:
        return Identifier(expr.name, resolve(expr.sub, bindings))
    return expr


def resolve(expr: MathExpr, bindings: Mapping[str, SemanticMacro] | None = None) -> MathExpr:
    """Collapse ambiguous juxtapositions using the bindings in scope.

    A head bound to a macro whose arity fits the arguments (a subscript counts
    as the first argument) becomes a macro application; everything else is
    read as implicit multiplication.  Unbound constants keep their usual
    meaning (``\\pi`` is the circle constant).
    """
    bindings = bindings or {}
    if isinstance(expr, Ambiguous):
        product = next((i for i in expr.interpretations
                        if isinstance(i, BinaryOp) and i.op == "*"), None)
        apply = next((i for i in expr.interpretations if isinstance(i, FunctionApply)), None)
        if apply is not None:
            hit = _apply_bound(apply.head, apply.args, bindings)
            if hit is not None:
                return hit
        if product is not None:
            return BinaryOp("*", resolve(product.left, bindings), resolve(product.right, bindings))
        return resolve(expr.interpretations[0], bindings)
    if is_symbol(expr):
        return _resolve_symbol(expr, bindings)
    if isinstance(expr, FunctionApply):
        if is_macro_ref(expr.head):
            return FunctionApply(expr.head, tuple(resolve(a, bindings) for a in expr.args))
        hit = _apply_bound(expr.head, expr.args, bindings) if is_symbol(expr.head) else None
        if hit is not None:
            return hit
        return FunctionApply(resolve(expr.head, bindings), tuple(resolve(a, bindings) for a in expr.args))
    return _rebuild(expr, bindings)


def _rebuild(expr: MathExpr, bindings) -> MathExpr:
    from dataclasses import fields, replace

    kids = children(expr)
    if not kids:
        return expr
    changes = {}
    for f in fields(expr):
        value = getattr(expr, f.name)
        if isinstance(value, tuple):
            changes[f.name] = tuple(resolve(v, bindings) for v in value)
        elif f.name in ("left", "right", "operand", "child", "sub"):
            changes[f.name] = resolve(value, bindings) if value is not None else None
    return replace(expr, **changes)


def is_resolved(expr: MathExpr) -> bool:
    return not any(isinstance(n, Ambiguous) for n in walk(expr))


# -- semantic LaTeX ------------------------------------------------------------


def to_semantic_latex(expr: MathExpr, lexicon: ContentDictionary) -> str:
    """Render a resolved tree, macro applications as ``\\name@{a}@{b}``."""
    for node in walk(expr):
        if isinstance(node, Ambiguous):
            raise ValueError("expression still contains ambiguous nodes; resolve it first")
        if isinstance(node, FunctionApply) and is_macro_ref(node.head):
            name = node.head.name
            macro = lexicon.get(name)
            if macro is not None and name not in KNOWN_FUNCTIONS and macro.arity != len(node.args):
                raise ArityMismatch(name, len(node.args), macro.arity)
    return render_latex(expr)


def read_semantic_latex(text: str, lexicon: ContentDictionary) -> MathExpr:
    """Inverse of :func:`to_semantic_latex` (up to normalization)."""
    return parse_latex(text, strict=True, known_macros=zero_arity_names(lexicon))
