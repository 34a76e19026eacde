import itertools

import pytest

from scottbench.backforth import bf_le
from scottbench.core import all_graphs, atomic_diagram, complete_graph, graph, path_graph
from scottbench.fs_tree import embed_tree, graft, node_for_tuple, tree_iso
from scottbench.generic import (GenericError, build_generic_path, extract_structure,
                                good_match_verify, is_generic, requirements, root_paths)
from scottbench.scott import scott_rank
from scottbench.tree_bf import tree_bf_le

from oracles import nx_isomorphic

CORPUS = [(A, embed_tree(A, A.n, 2)) for A in all_graphs(2, 1)]


def same_level_pairs(T):
    for s, t in itertools.product(T.class_reps(), repeat=2):
        if T.node(s).level == T.node(t).level:
            yield s, t, tuple(range(T.node(s).level))


def test_built_paths_are_generic_and_recover_the_source():
    for A, T in CORPUS:
        for alpha in (1, 2):
            p = build_generic_path(T, None, alpha)
            assert p.ok and is_generic(T, p.nodes, alpha)
            B = extract_structure(T, p.nodes)
            assert nx_isomorphic(A, B)
            assert scott_rank(B) <= alpha


def test_all_generic_paths_extract_isomorphic_structures():
    for A, T in CORPUS:
        for alpha in (1, 2):
            found = [extract_structure(T, p) for p in root_paths(T) if is_generic(T, p, alpha)]
            assert found
            for B, C in itertools.combinations(found, 2):
                assert nx_isomorphic(B, C)


def test_k2_path_frozen():
    T = embed_tree(complete_graph(2), 2, 2)
    p = build_generic_path(T, None, 1)
    assert p.nodes == [0, 1, 5]
    assert p.report().splitlines()[-1] == "generic within budget"


def test_requirement_order():
    T = embed_tree(complete_graph(2), 2, 2)
    reqs = requirements(T, [0, 1, 5], 2)
    keys = [r.key(T) for r in reqs]
    assert keys == sorted(keys)
    assert all(r.beta < 2 for r in reqs)


def test_relations_transfer_to_extracted_structures():
    for _, T in CORPUS:
        for s, t, xs in same_level_pairs(T):
            for beta in (0, 1):
                if tree_bf_le(T, s, xs, T, t, xs, beta):
                    Ap = extract_structure(T, build_generic_path(T, s, 2).nodes)
                    Aq = extract_structure(T, build_generic_path(T, t, 2).nodes)
                    assert bf_le(Ap, xs, Aq, xs, beta)


def test_level_one_lifts_on_member_trees():
    for A in all_graphs(3, 1):
        T = embed_tree(A, A.n, 2)
        for s, t, xs in same_level_pairs(T):
            if tree_bf_le(T, s, xs, T, t, xs, 1):
                assert tree_bf_le(T, s, xs, T, t, xs, 2)


def test_good_match_agrees_with_tree_isomorphism():
    trees = [embed_tree(A, A.n, 2) for A in all_graphs(3, 1)]
    for T1, T2 in itertools.product(trees, repeat=2):
        assert good_match_verify(T1, T2, 1).ok == (tree_iso(T1, T2) is not None)


def test_good_match_trace_names_the_failing_level():
    result = good_match_verify(embed_tree(complete_graph(2), 2, 2), embed_tree(graph(2), 2, 2), 1)
    assert not result.ok
    assert result.trace[0] == "level 0: 0 -> 0"
    assert "fails at level 2" in result.text()


def test_extract_rejects_broken_paths():
    T = embed_tree(path_graph(3), 2, 2)
    with pytest.raises(GenericError):
        extract_structure(T, [1, 7])
    with pytest.raises(GenericError):
        extract_structure(T, [0, node_for_tuple(T, (0, 1))])
    U = graft(T, node_for_tuple(T, (0, 1)), [(0, None, atomic_diagram(graph(3), (0, 1, 2)))])
    bad = max(U.nodes)
    with pytest.raises(GenericError):
        extract_structure(U, U.path_to(bad))
    with pytest.raises(GenericError):
        good_match_verify(T, T, 0)
