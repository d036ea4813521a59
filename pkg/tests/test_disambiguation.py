import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mathcast.disambiguation import (Formula, Text, analyze, bind_semantics, bindings_at,
                                     build_dependency_graph, context_bindings, extract_annotations,
                                     is_resolved, principal_symbol, read_document,
                                     read_semantic_latex, resolve, to_semantic_latex,
                                     zero_arity_names)
from mathcast.errors import ArityMismatch, UnknownFormula
from mathcast.expr import (BinaryOp, Constant, FunctionApply, Group, Identifier, MacroCall,
                           apply_macro)
from mathcast.latex_parser import parse_latex
from mathcast.lexicon import ContentDictionary, load_seed_lexicon, parse_lexicon

from strategies import trees

SEED = load_seed_lexicon()
PRIMES = r"""\section{Counting primes}
The prime counting function $\pi(n)$ counts the primes not exceeding $n$.
For example $\pi(10)=4$."""


def _entry(name, keyword, arity=0, pattern="q"):
    return json.dumps({"name": name, "arity": arity, "description": "", "keywords": [keyword],
                       "cas_patterns": {"Mathematica": pattern}, "constraints": [],
                       "branch_cut_note": None})


ANGLES = parse_lexicon("\n".join([
    json.dumps({"version": "test"}),
    _entry("polarangle", "polar angle"),
    _entry("temperature", "temperature"),
]))


def test_read_document_structure():
    doc = read_document(PRIMES, zero_arity_names(SEED))
    assert doc.section_boundaries == (0,)
    assert [f.id for f in doc.formulas()] == ["f1", "f2", "f3"]
    assert isinstance(doc.blocks[0], Text) and isinstance(doc.blocks[1], Formula)
    spans = [f.span for f in doc.formulas()]
    assert all(a[1] <= b[0] for a, b in zip(spans, spans[1:]))
    with pytest.raises(UnknownFormula):
        doc.block_of("nope")


def test_labels_and_constraint_comments():
    doc = read_document("see\n% constraint: n integer [1, 5]\n"
                        "\\begin{equation}\\label{tri}n=n\\end{equation}")
    (f,) = doc.formulas()
    assert f.id == "tri" and f.constraints == ("n integer [1, 5]",)


def test_annotation_prime_counting():
    doc = read_document(PRIMES)
    notes = extract_annotations(doc, "f1")
    assert ("prime counting function", 0) in notes
    assert notes == sorted(notes, key=lambda p: (p[1], p[0]))
    with pytest.raises(UnknownFormula):
        extract_annotations(doc, "f9")


def test_no_text_no_annotations():
    doc = read_document(r"$x$")
    assert extract_annotations(doc, "f1") == []


def test_theta_phrases_attach_to_nearest_formula():
    doc = read_document(r"Let $\theta$ be the polar angle. And later $y$ appears "
                        r"where $\theta$ denotes the temperature.")
    first = [p for p, _ in extract_annotations(doc, "f1")]
    last = [p for p, _ in extract_annotations(doc, "f3")]
    assert "polar angle" in first and "temperature" not in first
    assert "temperature" in last and "polar angle" not in last


def test_dependency_graph_examples():
    graph = build_dependency_graph(read_document(r"$\pi(n)$ and then $\pi(x+y)$"))
    assert graph[0].out_edges == ("f2",)
    graph = build_dependency_graph(read_document(r"$a+b$ and $x^2$"))
    assert all(not n.out_edges for n in graph)
    graph = build_dependency_graph(read_document(r"$x$, $x+1$, $2x$"))
    assert [n.out_edges for n in graph] == [("f2", "f3"), ("f3",), ()]


def test_graph_edges_forward_and_existing():
    doc = read_document(r"$x+y$ then $y^2$ then $\theta$ then $\theta+x$ then $\frac{1}{2}$")
    graph = build_dependency_graph(doc)
    order = {n.id: k for k, n in enumerate(graph)}
    for n in graph:
        for target in n.out_edges:
            assert order[target] > order[n.id]
    # numbers alone never link formulas
    assert "f5" not in {t for n in graph for t in n.out_edges}


def test_bind_prime_counting():
    doc = read_document(PRIMES, zero_arity_names(SEED))
    _, bindings = analyze(doc, SEED)
    (b,) = bindings
    assert (b.symbol, b.macro, b.origin) == (r"\pi", "nprimes", "f1")
    assert b.scope == (doc.block_of("f1"), len(doc.blocks) - 1)
    assert 0 < b.confidence <= 1
    assert b.to_json() == {"symbol": r"\pi", "macro": "nprimes", "scope": list(b.scope),
                           "confidence": b.confidence, "origin": "f1"}


def test_no_annotations_no_bindings():
    doc = read_document(r"$\pi(x+y)$")
    graph = build_dependency_graph(doc)
    assert bind_semantics(graph, doc, SEED) == []
    assert resolve(doc.formulas()[0].expr, {}) == BinaryOp(
        "*", Constant("pi"), Group(parse_latex("x+y")))


THETA_DOC = r"""Let $\theta$ be the polar angle. We have $x=r\cos\theta$.
\section{Heat}
Now $\theta$ denotes the temperature. Then $\theta+1$."""


def test_redefinition_gives_disjoint_scopes():
    doc = read_document(THETA_DOC)
    _, bindings = analyze(doc, ANGLES)
    assert [(b.symbol, b.macro) for b in bindings] == [(r"\theta", "polarangle"),
                                                     (r"\theta", "temperature")]
    first, second = bindings
    assert first.scope[1] < second.scope[0]
    assert second.scope[1] == len(doc.blocks) - 1
    assert bindings_at(bindings, doc.block_of("f2"), ANGLES)[r"\theta"].name == "polarangle"
    assert bindings_at(bindings, doc.block_of("f4"), ANGLES)[r"\theta"].name == "temperature"
    assert bindings_at(bindings, 0, ANGLES) == {}


_SENTENCES = [
    r"Let $\theta$ be the polar angle.",
    r"Here $\theta$ denotes the temperature.",
    r"Consider $\theta+1$.",
    r"Also $y^2$.",
]


@given(st.lists(st.sampled_from(range(len(_SENTENCES))), min_size=1, max_size=8), st.data())
@settings(max_examples=80, deadline=None)
def test_scoping_soundness_and_locality(choice, data):
    text = " ".join(_SENTENCES[c] for c in choice)
    doc = read_document(text)
    _, bindings = analyze(doc, ANGLES)
    by_symbol = {}
    for b in bindings:
        by_symbol.setdefault(b.symbol, []).append(b)
    for group in by_symbol.values():
        group.sort(key=lambda b: b.scope)
        assert all(a.scope[1] < b.scope[0] for a, b in zip(group, group[1:]))
    for k in range(len(doc.blocks)):
        containing = [b for b in bindings if b.scope[0] <= k <= b.scope[1]]
        assert {b.symbol: b.macro for b in containing} == \
            {s: m.name for s, m in bindings_at(bindings, k, ANGLES).items()}
    # a later redefinition never changes resolution of an earlier formula
    cut = data.draw(st.integers(1, len(choice)))
    prefix = read_document(" ".join(_SENTENCES[c] for c in choice[:cut]))
    _, early = analyze(prefix, ANGLES)
    for f in prefix.formulas():
        k = prefix.block_of(f.id)
        assert bindings_at(early, k, ANGLES) == bindings_at(bindings, doc.block_of(f.id), ANGLES)


def test_principal_symbol():
    assert principal_symbol(parse_latex("x")) == "x"
    assert principal_symbol(parse_latex(r"\pi(n)")) == r"\pi"
    assert principal_symbol(parse_latex(r"\theta=1")) == r"\theta"
    assert principal_symbol(parse_latex("1+2")) is None


def test_resolve_examples():
    bound = {r"\pi": SEED.get("nprimes")}
    expr = parse_latex(r"\pi(x+y)")
    assert resolve(expr, bound) == apply_macro("nprimes", parse_latex("x+y"))
    assert resolve(expr, {}) == BinaryOp("*", Constant("pi"), Group(parse_latex("x+y")))
    plain = parse_latex(r"a+\frac{b}{c}")
    assert resolve(plain, bound) == plain


def test_resolve_arity_mismatch_falls_back_to_product():
    bound = {r"\pi": SEED.get("EulerE")}
    assert resolve(parse_latex(r"\pi(n)"), bound) == BinaryOp(
        "*", Constant("pi"), Group(Identifier("n")))


@given(trees)
@settings(max_examples=200, deadline=None)
def test_resolve_idempotent_and_ambiguity_free(expr):
    for bindings in ({}, {r"\pi": SEED.get("nprimes"), "E": SEED.get("EulerNumber")}):
        once = resolve(expr, bindings)
        assert is_resolved(once)
        assert resolve(once, bindings) == once


@given(trees)
@settings(max_examples=100, deadline=None)
def test_empty_lexicon_is_deterministic_fallback(expr):
    empty = ContentDictionary()
    assert context_bindings(PRIMES, empty) == {}
    assert resolve(expr, context_bindings(PRIMES, empty)) == resolve(expr, {})


def test_context_bindings():
    assert {k: m.name for k, m in context_bindings(PRIMES, SEED).items()} == {r"\pi": "nprimes"}
    assert context_bindings("", SEED) == {}


def test_semantic_latex():
    assert to_semantic_latex(apply_macro("nprimes", Identifier("n")), SEED) == r"\nprimes@{n}"
    assert to_semantic_latex(parse_latex("a+b"), SEED) == "a+b"
    with pytest.raises(ArityMismatch) as info:
        to_semantic_latex(apply_macro("nprimes", Identifier("x"), Identifier("y")), SEED)
    assert (info.value.got, info.value.expected) == (2, 1)
    with pytest.raises(ValueError):
        to_semantic_latex(parse_latex(r"\pi(n)"), SEED)


def test_semantic_latex_inverse():
    bound = context_bindings(PRIMES, SEED)
    for text in [r"\pi(x+y)", r"\pi(n)+1", r"\frac{\pi(n)}{n}", r"\sin x+\pi"]:
        resolved = resolve(parse_latex(text), bound)
        semantic = to_semantic_latex(resolved, SEED)
        assert read_semantic_latex(semantic, SEED) == resolved
    const = FunctionApply(MacroCall("EulerConstant"), ())
    assert read_semantic_latex(to_semantic_latex(const, SEED), SEED) == const
