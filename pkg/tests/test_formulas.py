import pytest
from hypothesis import given, settings, strategies as st

from scottbench import formulas as fm
from scottbench.core import all_graphs, complete_graph, graph, path_graph

SMALL = [G for G in all_graphs(3) if G.n >= 2]
FREE = ("x1", "x2")


def literals(names):
    return st.builds(lambda s, a, b, rel: fm.Lit(s, rel, (a, b)),
                     st.booleans(), st.sampled_from(names), st.sampled_from(names),
                     st.sampled_from(["E", "="]))


def qfree(names):
    leaf = literals(names)
    expr = st.recursive(leaf, lambda inner: st.one_of(
        st.builds(lambda xs: fm.BAnd(tuple(xs)), st.lists(inner, min_size=1, max_size=3)),
        st.builds(lambda xs: fm.BOr(tuple(xs)), st.lists(inner, min_size=1, max_size=3))),
        max_leaves=4)
    return expr.map(fm.QFree)


@st.composite
def formulas(draw, names=FREE, depth=2):
    if depth == 0 or draw(st.booleans()):
        return draw(qfree(names))
    bound = "u" if "u" not in names else "v"
    kind = draw(st.sampled_from([fm.Or, fm.And]))
    branches = []
    for _ in range(draw(st.integers(1, 2))):
        block = draw(st.sampled_from([(), (bound,)]))
        body = draw(formulas(names + block, depth - 1))
        branches.append((block, body))
    return kind(tuple(branches))


ASSIGNMENTS = {"x1": 0, "x2": 1}


@settings(max_examples=150, deadline=None)
@given(formulas())
def test_negation_flips_truth(f):
    g = fm.neg(f)
    for S in SMALL:
        assert fm.evaluate(S, f, ASSIGNMENTS) != fm.evaluate(S, g, ASSIGNMENTS)


@settings(max_examples=150, deadline=None)
@given(formulas())
def test_negation_dualizes_classification(f):
    c, d = fm.classify(f), fm.classify(fm.neg(f))
    assert c.rank == d.rank
    if c.rank >= 1:
        assert {c.side, d.side} == {"sigma", "pi"}


@settings(max_examples=100, deadline=None)
@given(formulas())
def test_pi_wrapping_keeps_truth_and_adds_a_level(f):
    w = fm.pi_wrap(f)
    c = fm.classify(f)
    if c.side == "sigma":
        assert fm.pi_level(w) <= c.rank + 1
    for S in SMALL:
        assert fm.evaluate(S, w, ASSIGNMENTS) == fm.evaluate(S, f, ASSIGNMENTS)


@settings(max_examples=150, deadline=None)
@given(formulas())
def test_sexpr_round_trip_is_byte_stable(f):
    text = fm.to_sexpr(f)
    g = fm.parse_formula(text)
    assert fm.to_sexpr(g) == text
    for S in SMALL:
        assert fm.evaluate(S, g, ASSIGNMENTS) == fm.evaluate(S, f, ASSIGNMENTS)


def test_negation_only_on_atoms():
    f = fm.neg(fm.exists(["u"], fm.atom("E", "x1", "u")))
    assert isinstance(f, fm.And)
    assert "(atom - E x1 u)" in fm.to_sexpr(f)


def test_path_of_length_two():
    f = fm.exists(["u"], fm.QFree(fm.BAnd((fm.lit("E", "x1", "u"), fm.lit("E", "u", "x2")))))
    assert fm.evaluate(path_graph(3), f, {"x1": 0, "x2": 2})
    assert not fm.evaluate(path_graph(3), f, {"x1": 0, "x2": 1})
    assert fm.classify(f) == fm.Complexity("sigma", 1)


def test_classification_levels():
    e = fm.atom("E", "x1", "u")
    assert fm.classify(e) == ("sigma", 0)
    assert fm.classify(fm.forall(["u"], e)) == ("pi", 1)
    assert fm.classify(fm.exists(["v"], fm.forall(["u"], e))) == ("sigma", 2)


def test_free_vars_and_substitution():
    f = fm.exists(["u"], fm.atom("E", "x1", "u"))
    assert fm.free_vars(f) == {"x1"}
    g = fm.substitute(f, {"x1": "x2"})
    assert fm.free_vars(g) == {"x2"}
    assert fm.max_var_index(g) == 2


def test_unbound_variable_is_an_error():
    with pytest.raises(fm.FormulaError):
        fm.evaluate(graph(2), fm.atom("E", "x1", "x3"), {"x1": 0})


def test_empty_connectives_rejected():
    with pytest.raises(fm.FormulaError):
        fm.Or(())
    with pytest.raises(fm.FormulaError):
        fm.parse_formula("(atom + E x1")


def test_inventory_shape():
    inv = fm.formula_inventory()
    assert len(inv) == len(set(inv)) == 48
    counts = {}
    for f in inv:
        counts[str(fm.classify(f))] = counts.get(str(fm.classify(f)), 0) + 1
    assert counts == {"Sigma_0": 12, "Sigma_1": 12, "Pi_1": 12, "Sigma_2": 6, "Pi_2": 6}
    assert all(fm.free_vars(f) <= {"x1", "x2"} for f in inv)


def test_inventory_separates_triangle_from_edgeless():
    inv = fm.formula_inventory()
    K3, E3 = complete_graph(3), graph(3)
    split = [f for f in inv if fm.evaluate(K3, f, ASSIGNMENTS) != fm.evaluate(E3, f, ASSIGNMENTS)]
    assert fm.atom("E", "x1", "x2") in split or any(fm.is_qfree(f) for f in split)
