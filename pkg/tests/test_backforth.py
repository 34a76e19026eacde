import itertools

import pytest
from hypothesis import given, settings, strategies as st

from scottbench.backforth import (BackForth, BFError, bf_le, bf_table, sigma1_oracle,
                                  stabilization_level)
from scottbench.core import all_graphs, cycle_graph, disjoint_union, complete_graph, graph, path_graph

from oracles import naive_le, perm_orbits

GRAPHS3 = all_graphs(3)
GRAPHS4 = all_graphs(4, 1)


def pointed(graphs, max_len=2):
    out = []
    for S in graphs:
        for k in range(min(max_len, S.n) + 1):
            for a in itertools.permutations(range(S.n), k):
                out.append((S, a))
    return out


POINTED = pointed(GRAPHS3)


def test_table_and_recursion_agree():
    # two routes: the memoized recursion and the bottom-up literal table
    for S, T in itertools.product(GRAPHS3, repeat=2):
        table = bf_table(S, T, 3)
        bf = BackForth(S, T)
        for n, a, b, value in table.entries():
            assert bf.le(a, b, n) == value, (S, T, n, a, b)


def test_recursion_agrees_with_naive_definition():
    for (S, a), (T, b) in itertools.product(pointed(all_graphs(3, 2), 1), repeat=2):
        if len(a) == len(b):
            for n in range(3):
                assert bf_le(S, a, T, b, n) == naive_le(S, a, T, b, n)


def test_level_one_is_existential_preservation():
    for (S, a), (T, b) in itertools.product(POINTED, repeat=2):
        if len(a) == len(b):
            assert bf_le(S, a, T, b, 1) == sigma1_oracle(S, a, T, b)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(POINTED), st.sampled_from(POINTED), st.integers(0, 3))
def test_antitone_in_level(x, y, n):
    (S, a), (T, b) = x, y
    if len(a) == len(b) and bf_le(S, a, T, b, n + 1):
        assert bf_le(S, a, T, b, n)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(POINTED), st.integers(0, 3))
def test_reflexive(x, n):
    S, a = x
    assert bf_le(S, a, S, a, n)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(POINTED), st.sampled_from(POINTED), st.sampled_from(POINTED),
       st.integers(0, 3))
def test_transitive(x, y, z, n):
    (R, a), (S, b), (T, c) = x, y, z
    if len({len(a), len(b), len(c)}) == 1 and bf_le(R, a, S, b, n) and bf_le(S, b, T, c, n):
        assert bf_le(R, a, T, c, n)


def test_automorphic_tuples_related_at_every_level():
    for S in GRAPHS4:
        bf = BackForth(S, S)
        for m in (1, 2):
            for orbit in perm_orbits(S, m):
                for a, b in itertools.product(orbit, repeat=2):
                    assert all(bf.le(a, b, n) for n in range(4))


def test_stabilized_relation_is_orbit_equivalence():
    for S in GRAPHS4:
        n = stabilization_level(S, S)
        table = bf_table(S, S, n)
        for m in range(1, min(S.n, 2) + 1):
            orbit_of = {t: i for i, orbit in enumerate(perm_orbits(S, m)) for t in orbit}
            for a, b in itertools.permutations(orbit_of, 2):
                assert table.get(a, b, n) == (orbit_of[a] == orbit_of[b])


def test_stabilization_levels_frozen():
    # derived with oracles.naive_stabilization, graphs of size <= 4 in enumeration order
    assert [stabilization_level(S, S) for S in all_graphs(4)] == \
        [0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1]


def test_known_verdicts():
    P3 = path_graph(3)
    # an endpoint and the middle of a path differ in both directions at level 1
    assert not bf_le(P3, (0,), P3, (1,), 1)
    assert not bf_le(P3, (1,), P3, (0,), 1)
    assert bf_le(P3, (0,), P3, (2,), 5)
    assert not bf_le(path_graph(4), (), cycle_graph(4), (), 1)
    assert bf_le(graph(3), (), graph(4), (), 0)
    assert not bf_le(graph(3), (), graph(4), (), 1)


def test_small_extension_bound_can_change_a_verdict():
    # with room for only three new elements E3 cannot tell E4 apart at level 1
    assert bf_le(graph(3), (), graph(4), (), 1, M=3)
    assert not bf_le(graph(3), (), graph(4), (), 1)
    K = disjoint_union(complete_graph(3), complete_graph(4))
    assert bf_le(K, (3,), K, (0,), 1, M=4)
    assert not bf_le(K, (3,), K, (0,), 1)


def test_right_tuple_truncated_left_longer_rejected():
    P3 = path_graph(3)
    assert bf_le(P3, (0,), P3, (2, 1), 2) == bf_le(P3, (0,), P3, (2,), 2)
    with pytest.raises(BFError):
        bf_le(P3, (0, 1), P3, (0,), 1)
    with pytest.raises(BFError):
        bf_le(P3, (0, 0), P3, (0, 1), 1)


def test_parallel_table_matches_serial():
    S, T = path_graph(3), cycle_graph(3)
    assert bf_table(S, T, 2, jobs=4).to_csv() == bf_table(S, T, 2).to_csv()


def test_csv_header_and_rows():
    csv = bf_table(graph(1), graph(1), 1).to_csv().splitlines()
    assert csv == ["n,a,b,value", "0,,,true", "0,0,0,true", "1,,,true", "1,0,0,true"]
