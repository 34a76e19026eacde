import itertools

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from scottbench.backforth import BackForth, bf_le
from scottbench.core import (all_graphs, automorphisms, complete_graph, find_embedding,
                             find_isomorphism, graph, is_isomorphic, path_graph)
from scottbench.hardness import (CodedOrbits, EnumeratedSet, HardnessError, OrbitBF,
                                 check_structure_sizes, classify_daisy, code_structure,
                                 daisy_bunch, daisy_probe, equivalent, find_surrogate_pair,
                                 petal_lengths, rank_shift, verify_coding_bf)

from oracles import to_nx

COFINITE = ["cofinite:", "cofinite:1", "cofinite:1,3", "cofinite:2,4,6", "cofinite:5",
            "cofinite:1,2,3,4", "periodic:m=1,r=0,t=0", "periodic:m=2,r=0,r=1,t=3",
            "cofinite:7", "cofinite:3,8"]
COINFINITE = ["periodic:m=2,r=0,t=0", "finite:0,2,5", "finite:0", "periodic:m=3,r=0,t=0",
              "periodic:m=3,r=0,r=1,t=0", "finite:0,1,2,3", "periodic:m=4,r=0,r=2,t=2",
              "periodic:m=5,r=0,t=0", "finite:0,4", "periodic:m=2,r=0,t=5"]
PAIR = find_surrogate_pair(1, 9)


def test_set_parsing_and_membership():
    W = EnumeratedSet.parse("periodic:m=3,r=0,r=1,t=2")
    assert str(W) == "periodic:m=3,r=0,r=1,t=2"
    assert [n for n in range(10) if n in W] == [0, 1, 3, 4, 6, 7, 9]
    assert EnumeratedSet.parse("cofinite:1,3").stage(5) == {0, 2, 4, 5}
    assert EnumeratedSet.parse("finite:0,2,5").stage(3) == {0, 2}
    assert EnumeratedSet.parse("cofinite:").is_cofinite()
    for bad in ["odd:1", "periodic:m=0", "periodic:m=2,r=3", "finite:a", "periodic:q=1"]:
        with pytest.raises(HardnessError):
            EnumeratedSet.parse(bad)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(COFINITE + COINFINITE), st.integers(0, 20), st.integers(0, 20))
def test_stages_are_monotone_and_exhaust_the_set(text, s, t):
    W = EnumeratedSet.parse(text)
    lo, hi = sorted((s, t))
    assert W.stage(lo) <= W.stage(hi)
    assert W.stage(hi) == {n for n in range(hi + 1) if n in W}


@pytest.mark.parametrize("text", COFINITE)
def test_cofinite_sets_give_rank_one(text):
    W = EnumeratedSet.parse(text)
    assert classify_daisy(W).rank == 1
    assert daisy_probe(W) == 1


@pytest.mark.parametrize("text", COINFINITE)
def test_coinfinite_sets_give_rank_two(text):
    W = EnumeratedSet.parse(text)
    result = classify_daisy(W)
    assert result.rank == 2
    assert len(result.certificate) == 6
    assert daisy_probe(W) == 2


def petals_from_graph(G, centers):
    """Cycle lengths through each center, read off the graph with networkx."""
    X = to_nx(G)
    rest = X.subgraph([v for v in X if v >= centers])
    out = {}
    for c in range(centers):
        comps = [comp for comp in nx.connected_components(rest) if any(X.has_edge(c, v) for v in comp)]
        out[c] = sorted(len(comp) + 1 for comp in comps)
    return out


@pytest.mark.parametrize("text", COFINITE[:4] + COINFINITE[:4])
def test_stage_graphs_follow_the_petal_rule(text):
    W = EnumeratedSet.parse(text)
    for s in range(7):
        bunch = daisy_bunch(W, 3, s)
        members = W.stage(s)
        assert petals_from_graph(bunch.structure, 3) == \
            {i: petal_lengths(members, i) for i in range(3)}
        assert bunch.structure.n == bunch.vertex_count()


def test_petal_rule_frozen():
    assert petal_lengths({0, 2}, 0) == [3, 5]
    assert petal_lengths({0, 2}, 1) == [3, 4]
    assert petal_lengths({0, 2}, 3) == [3, 5, 6]


@pytest.mark.parametrize("text", COFINITE[:3] + COINFINITE[:3])
def test_stage_graphs_grow_by_extension(text):
    W = EnumeratedSet.parse(text)
    for s in range(6):
        small, big = daisy_bunch(W, 3, s).structure, daisy_bunch(W, 3, s + 1).structure
        assert find_embedding(small, big, (0, 1, 2), (0, 1, 2)) is not None


def test_zero_must_be_in_w():
    with pytest.raises(HardnessError):
        daisy_bunch(EnumeratedSet.parse("finite:1,2"), 2, 3)


def test_surrogate_pairs():
    for k, ext in [(1, 2), (2, 2), (1, 3)]:
        p = find_surrogate_pair(k, 9, ext)
        assert not is_isomorphic(p.G, p.H)
        assert bf_le(p.G, (), p.H, (), k, M=ext) and bf_le(p.H, (), p.G, (), k, M=ext)
        assert p.rigid == (len(automorphisms(p.G)) == 1 and len(automorphisms(p.H)) == 1)
    # the least level-1 pair: two and three isolated vertices
    assert (PAIR.G.n, PAIR.H.n, PAIR.G.edges(), PAIR.H.edges()) == (2, 3, [], [])
    assert find_surrogate_pair(1, 9, 3).G.n == 3
    assert not equivalent(graph(2), graph(3), 1, 3)


def test_coded_structure_layout():
    A = path_graph(3)
    coded = code_structure(A, PAIR, width=2)
    B = coded.structure
    assert B.n == 3 + sum(2 * coded.class_graph(key).n for key in coded.classes)
    assert len(coded.classes) == 3 * 2 * 2
    for (x, y, i), members in coded.classes.items():
        for e in members:
            assert B.holds(f"c{i}", (e, x, y)) and B.holds("V", (e,))
    assert check_structure_sizes(A, PAIR, 2)
    with pytest.raises(HardnessError):
        code_structure(A, PAIR, width=0)


def test_equal_orbit_keys_mean_automorphic_tuples():
    coded = code_structure(complete_graph(2), PAIR)
    B = coded.structure
    keys = CodedOrbits(coded)
    tuples = list(itertools.permutations(range(B.n), 2))
    for a, b in itertools.product(tuples[::3], tuples[::5]):
        if keys.key(a) == keys.key(b):
            assert find_isomorphism(B, B, a, b) is not None


def test_orbit_relation_matches_literal_relation():
    coded = code_structure(complete_graph(2), PAIR)
    B = coded.structure
    keys = CodedOrbits(coded)
    for k in (1, 2):
        fast, literal = OrbitBF(B, keys.key, k + 1), BackForth(B, B, M=k + 1)
        tuples = list(itertools.permutations(range(B.n), k))[:40]
        for a, b in itertools.product(tuples, repeat=2):
            for n in (1, 2):
                assert fast.le(a, b, n) == literal.le(a, b, n)


def test_coding_level_one_on_small_graphs():
    for A in all_graphs(2, 1):
        report = verify_coding_bf(A, PAIR, 2)
        assert report.count("a") == 0
        assert report.count("b") == 0


def test_rank_shift_measurement():
    shift = rank_shift(graph(1), PAIR)
    assert shift.source_rank == 1
    assert "expected 2" in shift.text()
