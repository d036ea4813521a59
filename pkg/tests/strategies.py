"""Hypothesis strategies producing random well-formed expression trees."""

from hypothesis import strategies as st

from mathcast.expr import (
    BinaryOp,
    Constant,
    FunctionApply,
    Group,
    Identifier,
    MacroCall,
    Number,
    Relation,
    Sequence,
    UnaryOp,
    make_ambiguous,
)

LETTERS = "abcdfghkmnpqrstuvwxyzABCDEFGHKMNPQRSTUVWXYZ"

numbers = st.sampled_from(["0", "1", "2", "3", "7", "10", "42", "0.5", "2.25"]).map(Number)
plain_identifiers = st.one_of(
    st.sampled_from(list(LETTERS)).map(Identifier),
    st.just(Identifier("\\theta")),
)
identifiers = st.one_of(
    plain_identifiers,
    st.builds(Identifier, st.sampled_from(list("xyEa")), st.one_of(numbers, plain_identifiers)),
)
constants = st.just(Constant("pi"))
symbols = st.one_of(identifiers, constants)
leaves = st.one_of(numbers, identifiers, constants)


def _extend(children):
    pairs = st.tuples(children, children)
    return st.one_of(
        st.builds(BinaryOp, st.sampled_from(["+", "-", "\\cdot", "/", "*", "^"]), children, children),
        st.builds(UnaryOp, st.just("-"), children),
        st.builds(Relation, st.sampled_from(["=", "<"]), children, children),
        st.builds(
            lambda name, arg: FunctionApply(MacroCall(name), (arg,)),
            st.sampled_from(["sin", "cos", "exp", "ln", "Gamma"]), children,
        ),
        st.builds(
            lambda name, args: FunctionApply(MacroCall(name), tuple(args)),
            st.sampled_from(["nprimes", "EulerE"]), st.lists(children, min_size=1, max_size=2),
        ),
        st.builds(lambda h, args: FunctionApply(h, tuple(args)), symbols,
                  st.lists(children, min_size=1, max_size=2)),
        st.builds(lambda p: MacroCall("frac", p), pairs),
        st.builds(lambda a: MacroCall("sqrt", (a,)), children),
        st.builds(lambda p: MacroCall("sqrt", p), pairs),
        st.builds(
            lambda name, lim, body: MacroCall(name, lim + (body,)),
            st.sampled_from(["sum", "prod", "int"]),
            st.one_of(st.just(()), st.tuples(children), pairs),
            children,
        ),
        st.builds(Group, children, st.sampled_from(["(", "[", "\\{"])),
        st.builds(lambda xs: Sequence(tuple(xs)), st.lists(children, min_size=2, max_size=3)),
        st.builds(lambda h, c: make_ambiguous(h, Group(c)), symbols, children),
    )


trees = st.recursive(leaves, _extend, max_leaves=8)

# Ambiguity-free arithmetic trees the evaluator understands.
_arith_leaves = st.one_of(
    st.sampled_from(["1", "2", "3", "0.5", "1.5"]).map(Number),
    st.sampled_from([Identifier("x"), Identifier("y"), Constant("pi")]),
)


def _arith_extend(children):
    return st.one_of(
        st.builds(BinaryOp, st.sampled_from(["+", "-", "\\cdot", "*", "/"]), children, children),
        st.builds(lambda a, n: BinaryOp("^", a, Number(n)), children, st.sampled_from(["2", "3"])),
        st.builds(UnaryOp, st.just("-"), children),
        st.builds(lambda name, a: FunctionApply(MacroCall(name), (a,)),
                  st.sampled_from(["sin", "cos", "exp"]), children),
        st.builds(lambda p: MacroCall("frac", p), st.tuples(children, children)),
        st.builds(Group, children),
    )


arithmetic_trees = st.recursive(_arith_leaves, _arith_extend, max_leaves=7)
