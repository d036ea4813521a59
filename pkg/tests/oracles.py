"""Independent reference implementations used to check the library's answers."""

import math
from fractions import Fraction

from mathcast.expr import Ambiguous, FunctionApply, MacroCall, node_count
from mathcast.latex_parser import render_latex


def brute_force_subtrees(expr, max_nodes):
    """Every complete subtree with at most ``max_nodes`` nodes, found by listing positions."""
    found = []

    def visit(node):
        if isinstance(node, Ambiguous):
            for interp in node.interpretations:
                visit(interp)
            return
        found.append(node)
        if isinstance(node, FunctionApply):
            if not (isinstance(node.head, MacroCall) and not node.head.args):
                visit(node.head)
            for a in node.args:
                visit(a)
            return
        for name in ("sub", "left", "right", "operand", "child"):
            child = getattr(node, name, None)
            if child is not None:
                visit(child)
        for seq in ("args", "children"):
            for child in getattr(node, seq, ()):
                visit(child)

    visit(expr)
    return {render_latex(t) for t in found if node_count(t) <= max_nodes}


def euler_poly_oracle(n, x):
    """E_m(x) + E_m(x+1) = 2 x^m with E_m(x+1) = sum_k C(m,k) E_k(x), solved for E_n(x)."""
    values = []
    for m in range(n + 1):
        lower = sum(math.comb(m, k) * values[k] for k in range(m))
        values.append((2 * Fraction(x) ** m - lower) / 2)
    return values[n]
