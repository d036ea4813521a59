import random

import pytest
from hypothesis import given, settings

from mathcast.benchmark import bundled_gold_path, load_gold
from mathcast.errors import (EmptyInput, IllegalCharacter, ParseError, UnbalancedBraces,
                             UnknownMacro)
from mathcast.expr import (Ambiguous, BinaryOp, Constant, FunctionApply, Group, Identifier,
                           MacroCall, Number, Relation, to_dict, to_sexpr, walk)
from mathcast.latex_parser import TokenKind, normalize, parse, parse_latex, render_latex, tokenize
from mathcast.lexicon import load_seed_lexicon
from mathcast.disambiguation import zero_arity_names

from strategies import trees
from treegen import random_latex

X, Y, N = Identifier("x"), Identifier("y"), Identifier("n")


def test_tokenize_frac():
    toks = tokenize(r"\frac{1}{2}")
    assert [(t.kind, t.text) for t in toks] == [
        (TokenKind.CONTROL_SEQUENCE, r"\frac"), (TokenKind.OPEN_GROUP, "{"),
        (TokenKind.DIGIT, "1"), (TokenKind.CLOSE_GROUP, "}"), (TokenKind.OPEN_GROUP, "{"),
        (TokenKind.DIGIT, "2"), (TokenKind.CLOSE_GROUP, "}"),
    ]
    assert [t.position for t in toks] == [0, 5, 6, 7, 8, 9, 10]


def test_tokenize_pi_group_uses_operator_delimiters():
    toks = tokenize(r"\pi(x+y)")
    assert [t.text for t in toks] == [r"\pi", "(", "x", "+", "y", ")"]
    assert toks[1].kind is TokenKind.OPERATOR and toks[-1].kind is TokenKind.OPERATOR


@pytest.mark.parametrize("text,error,position", [
    ("", EmptyInput, 0),
    ("   ", EmptyInput, 0),
    ("{x", UnbalancedBraces, 0),
    ("x}", UnbalancedBraces, 1),
    ("x#", IllegalCharacter, 1),
])
def test_tokenize_errors(text, error, position):
    with pytest.raises(error) as info:
        tokenize(text)
    assert info.value.position == position


def test_parse_pi_group_is_ambiguous():
    expr = parse(tokenize(r"\pi(x+y)"))
    body = BinaryOp("+", X, Y)
    assert expr == Ambiguous((BinaryOp("*", Constant("pi"), Group(body)),
                              FunctionApply(Constant("pi"), (body,))))


def test_parse_precedence():
    assert parse_latex(r"a+b\cdot c") == BinaryOp(
        "+", Identifier("a"), BinaryOp("\\cdot", Identifier("b"), Identifier("c")))
    # implicit multiplication binds tighter than \cdot and /
    assert parse_latex(r"a/b c") == BinaryOp(
        "/", Identifier("a"), BinaryOp("*", Identifier("b"), Identifier("c")))
    assert parse_latex("x_1^2") == BinaryOp("^", Identifier("x", Number("1")), Number("2"))
    assert parse_latex("a<b+c").rel == "<"


def test_parse_euler_overloading():
    expr = parse_latex(r"E_n = 2^n E_n(\tfrac{1}{2})")
    e_n = Identifier("E", N)
    half = MacroCall("frac", (Number("1"), Number("2")))
    assert expr == Relation("=", e_n, BinaryOp(
        "*", BinaryOp("^", Number("2"), N),
        Ambiguous((BinaryOp("*", e_n, Group(half)), FunctionApply(e_n, (half,))))))
    assert render_latex(expr) == r"E_{n}=2^{n}E_{n}(\frac{1}{2})"


def test_known_function_and_power_of_function():
    assert parse_latex(r"\sin^2 x") == BinaryOp(
        "^", FunctionApply(MacroCall("sin"), (X,)), Number("2"))
    assert parse_latex(r"\Gamma(x)") == FunctionApply(MacroCall("Gamma"), (X,))


def test_left_right_same_as_parens():
    assert parse_latex(r"\left(x+y\right)") == parse_latex("(x+y)")


def test_semantic_macro_syntax():
    assert parse_latex(r"\nprimes@{n}") == FunctionApply(MacroCall("nprimes"), (N,))
    assert parse_latex(r"\EulerE@{n}@{x}") == FunctionApply(MacroCall("EulerE"), (N, X))


def test_strict_and_lenient_unknown_macros():
    with pytest.raises(UnknownMacro):
        parse_latex(r"\foo{x}")
    assert parse_latex(r"\foo{x}", strict=False) == MacroCall("foo", (X,))
    assert parse_latex(r"\EulerConstant", known_macros=("EulerConstant",)) == \
        FunctionApply(MacroCall("EulerConstant"), ())


@pytest.mark.parametrize("text", ["x+", r"\frac{1}", "(x", "x^"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_latex(text)


def test_render_examples():
    assert render_latex(BinaryOp("+", Identifier("a"), Identifier("b"))) == "a+b"
    frac = parse_latex(r"\frac{x}{y}")
    assert parse_latex(render_latex(frac)) == frac
    assert render_latex(parse_latex(r"\tfrac{1}{2}")) == r"\frac{1}{2}"
    assert render_latex(parse_latex("x^2")) == "x^{2}"


def test_sexpr_and_dict_forms():
    expr = parse_latex(r"\frac{1}{x}")
    assert to_sexpr(expr) == '(MacroCall "frac" (Number "1") (Identifier "x"))'
    assert to_dict(expr) == {"kind": "MacroCall", "name": "frac",
                             "args": [{"kind": "Number", "value": "1"},
                                      {"kind": "Identifier", "name": "x"}]}


def _gold_latex():
    lexicon = load_seed_lexicon()
    return [e.latex for e in load_gold(bundled_gold_path(), zero_arity_names(lexicon))]


@pytest.mark.parametrize("text", _gold_latex())
def test_round_trip_on_gold(text):
    known = zero_arity_names(load_seed_lexicon())
    once = parse_latex(text, known_macros=known)
    assert parse_latex(render_latex(once), known_macros=known) == once


@given(trees)
@settings(max_examples=300, deadline=None)
def test_render_parse_is_normalize(expr):
    assert parse_latex(render_latex(expr), strict=False) == normalize(expr)


@given(trees)
@settings(max_examples=200, deadline=None)
def test_normalize_idempotent(expr):
    n = normalize(expr)
    assert normalize(n) == n


@given(trees)
@settings(max_examples=200, deadline=None)
def test_ambiguous_interpretations_share_surface(expr):
    for node in walk(expr):
        if isinstance(node, Ambiguous):
            rendered = {render_latex(i) for i in node.interpretations}
            assert len(rendered) == 1


def test_token_coverage_and_positions():
    rng = random.Random(11)
    for _ in range(500):
        text = random_latex(rng)
        toks = tokenize(text)
        assert sum(len(t.text) for t in toks) == len("".join(text.split()))
        positions = [t.position for t in toks]
        assert positions == sorted(set(positions))
        for t in toks:
            assert text[t.position:t.position + len(t.text)] == t.text


def test_grammar_fuzz_total():
    rng = random.Random(20240101)
    for _ in range(10_000):
        text = random_latex(rng)
        expr = parse_latex(text)
        assert parse_latex(render_latex(expr)) == normalize(expr)
