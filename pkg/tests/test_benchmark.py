import ast
import json
import random

import pytest

from mathcast.benchmark import (CATEGORIES, GoldEntry, bundled_gold_path, evaluate_pipeline,
                                load_gold, normalize_cas, parse_gold)
from mathcast.cas_translate import supported_targets
from mathcast.disambiguation import context_bindings, resolve, zero_arity_names
from mathcast.errors import SchemaError
from mathcast.expr import Relation
from mathcast.latex_parser import parse_latex
from mathcast.lexicon import load_seed_lexicon
from mathcast.verify import SamplingConfig, evaluate, free_variables

SEED = load_seed_lexicon()
KNOWN = zero_arity_names(SEED)
GOLD = load_gold(bundled_gold_path(), KNOWN)


def _line(*cols):
    return "\t".join(cols)


def test_bundled_gold_shape():
    assert len(GOLD) == 30
    counts = {c: sum(e.category == c for e in GOLD) for c in CATEGORIES}
    assert counts["ambiguous"] >= 8
    assert all(set(e.gold_cas) <= set(supported_targets()) for e in GOLD)
    assert len({e.id for e in GOLD}) == 30


def test_parse_gold_errors():
    good = _line("a", "x", "", "x", json.dumps({"Mathematica": "x"}), "plain")
    header = _line("id", "latex", "context", "gold_semantic", "gold_cas_json", "category")
    assert len(parse_gold("\n".join([header, good]))) == 1
    assert parse_gold("") == []
    bad_latex = _line("c", r"\frac{1}", "", "", "{}", "plain")
    with pytest.raises(SchemaError) as info:
        parse_gold("\n".join([header, good.replace("a", "b", 1), bad_latex]))
    assert info.value.line == 3 and info.value.field == "latex"
    with pytest.raises(SchemaError) as info:
        parse_gold("\n".join([good, good]))
    assert info.value.field == "id"
    with pytest.raises(SchemaError):
        parse_gold(_line("a", "x", "", "x", "{not json", "plain"))
    with pytest.raises(SchemaError):
        parse_gold(_line("a", "x", "", "x", json.dumps({"Axiom": "x"}), "plain"))
    with pytest.raises(SchemaError):
        parse_gold(_line("a", "x", "", "x", "{}", "other"))
    with pytest.raises(SchemaError):
        parse_gold("a\tb")


def test_normalize_cas():
    assert normalize_cas(" (a + b) ") == "a+b"
    assert normalize_cas("(a)+(b)") == "(a)+(b)"
    assert normalize_cas("((x))") == "x"


def test_ordering_claim():
    cs = evaluate_pipeline(GOLD, SEED, "context_sensitive", "Mathematica")
    cf = evaluate_pipeline(GOLD, SEED, "context_free", "Mathematica")
    assert cs.by_category["ambiguous"]["translation_accuracy"] > \
        cf.by_category["ambiguous"]["translation_accuracy"]
    assert cs.translation_accuracy >= cf.translation_accuracy


@pytest.mark.parametrize("target", ["Mathematica", "Maple", "SymPyText"])
def test_context_never_hurts(target):
    cs = evaluate_pipeline(GOLD, SEED, "context_sensitive", target)
    cf = evaluate_pipeline(GOLD, SEED, "context_free", target)
    assert cs.translation_accuracy >= cf.translation_accuracy
    for a, b in zip(cs.entries, cf.entries):
        if b.correct and b.category != "ambiguous":
            assert a.correct, a.id


def test_trivial_entry_both_modes():
    entry = GoldEntry("half", r"\frac{1}{2}", "", r"\frac{1}{2}", {"Mathematica": "(1)/(2)"}, "plain")
    for mode in ("context_sensitive", "context_free"):
        assert evaluate_pipeline([entry], SEED, mode).translation_accuracy == 1.0


def test_identities_verified():
    metrics = evaluate_pipeline(GOLD, SEED, "context_sensitive")
    assert metrics.by_category["identity"]["verified_rate"] == 1.0


def test_rates_sum_to_one_and_reproducible():
    for mode in ("context_sensitive", "context_free"):
        m = evaluate_pipeline(GOLD, SEED, mode, config=SamplingConfig(seed=3))
        assert abs(m.verified_rate + m.failed_rate + m.inconclusive_rate - 1) < 1e-12
        for rates in m.by_category.values():
            total = rates["verified_rate"] + rates["failed_rate"] + rates["inconclusive_rate"]
            assert abs(total - 1) < 1e-12
        again = evaluate_pipeline(GOLD, SEED, mode, config=SamplingConfig(seed=3))
        assert json.dumps(m.to_json(True)) == json.dumps(again.to_json(True))


def test_evaluate_pipeline_errors():
    with pytest.raises(ValueError):
        evaluate_pipeline([], SEED)
    with pytest.raises(ValueError):
        evaluate_pipeline(GOLD, SEED, mode="sideways")


# -- gold strings cross-checked against sympy ---------------------------------------------

_INTEGER_VARS = {"n"}


def _sides(text):
    tree = ast.parse(text, mode="eval").body
    if isinstance(tree, ast.Call) and getattr(tree.func, "id", None) == "Eq":
        return [ast.get_source_segment(text, a) for a in tree.args]
    return [text]


def _sympy_value(sympy, text, point):
    names = {v: sympy.Symbol(v) for v in "abcdnsxyzk"}
    expr = sympy.parse_expr(text, local_dict=names)
    subs = {names[k]: (sympy.Integer(v) if isinstance(v, int) else sympy.Float(v, 30))
            for k, v in point.items()}
    return complex(sympy.N(expr.subs(subs), 20))


@pytest.mark.parametrize("entry", GOLD, ids=[e.id for e in GOLD])
def test_gold_sympytext_matches_reference_cas(entry):
    sympy = pytest.importorskip("sympy")
    bindings = context_bindings(entry.context, SEED) if entry.context else {}
    expr = resolve(parse_latex(entry.latex, known_macros=KNOWN), bindings)
    ours = [expr.left, expr.right] if isinstance(expr, Relation) else [expr]
    theirs = _sides(entry.gold_cas["SymPyText"])
    assert len(ours) == len(theirs)
    rng = random.Random(entry.id)
    for _ in range(4):
        point = {v: rng.randint(2, 5) if v in _INTEGER_VARS else round(rng.uniform(0.1, 0.9), 6)
                 for v in free_variables(expr)}
        for mine, gold in zip(ours, theirs):
            a = complex(evaluate(mine, point))
            b = _sympy_value(sympy, gold, point)
            assert abs(a - b) <= 1e-9 * max(1.0, abs(b)), (entry.id, point, a, b)
