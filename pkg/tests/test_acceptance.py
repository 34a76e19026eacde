"""Acceptance criteria 1-10, one test each.

Every test prints a single ``criterion N: pass|fail ...`` line to the terminal
(outside pytest's capture) and then asserts the criterion at its stated
tolerance.
"""

import itertools
import time

import pytest

from scottbench import formulas as fm
from scottbench.backforth import bf_le, sigma1_oracle
from scottbench.cli import main
from scottbench.core import all_graphs, is_isomorphic
from scottbench.forcing import defined_nodes, force_formula, forces, vocabulary_of
from scottbench.fs_tree import embed_tree, tree_iso
from scottbench.generic import build_generic_path, extract_structure, is_generic, root_paths
from scottbench.hardness import (EnumeratedSet, classify_daisy, daisy_bunch, daisy_probe,
                                 find_surrogate_pair, petal_lengths, rank_shift, verify_coding_bf)
from scottbench.scott import scott_rank, scott_rank_direct
from scottbench.tree_bf import membership_verdict

from oracles import nx_isomorphic
from test_hardness import COFINITE, COINFINITE, petals_from_graph


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'pass' if ok else 'fail'} ({detail})")
    return emit


def timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - start


def test_criterion_01_karp_level_one(report):
    def run():
        total = bad = 0
        graphs = all_graphs(3)
        for S, T in itertools.product(graphs, repeat=2):
            for k in range(3):
                for a in itertools.permutations(range(S.n), k):
                    for b in itertools.permutations(range(T.n), k):
                        total += 1
                        bad += sigma1_oracle(S, a, T, b) != bf_le(S, a, T, b, 1)
        return total, bad

    (total, bad), secs = timed(run)
    ok = bad == 0 and secs < 60
    report(1, ok, f"{total} tuple pairs, {bad} disagreements, {secs:.1f}s")
    assert bad == 0
    assert secs < 60


def test_criterion_02_scott_rank_oracles(report):
    def run():
        graphs = all_graphs(4, 1)
        return len(graphs), sum(scott_rank(S) != scott_rank_direct(S) for S in graphs)

    (total, bad), secs = timed(run)
    ok = bad == 0 and secs < 600
    report(2, ok, f"{total} graphs, {bad} disagreements, {secs:.1f}s")
    assert bad == 0
    assert secs < 600


def test_criterion_03_embedding_reduces_isomorphism(report):
    def run():
        graphs = all_graphs(3)
        trees = [embed_tree(A, min(3, A.n), 2) for A in graphs]
        total = bad = 0
        for (A, TA), (B, TB) in itertools.product(zip(graphs, trees), repeat=2):
            total += 1
            bad += nx_isomorphic(A, B) != (tree_iso(TA, TB) is not None)
        return total, bad

    (total, bad), secs = timed(run)
    ok = bad == 0 and secs < 60
    report(3, ok, f"{total} graph pairs, {bad} disagreements, {secs:.1f}s")
    assert bad == 0
    assert secs < 60


def test_criterion_04_rank_through_embedding(report):
    def run():
        total = bad = 0
        for A in all_graphs(3, 1):
            T = embed_tree(A, A.n, 2)
            r = scott_rank(A)
            for alpha in (1, 2, 3):
                total += 1
                bad += membership_verdict(T, alpha).ok != (alpha >= r)
        return total, bad

    (total, bad), secs = timed(run)
    ok = bad == 0 and secs < 600
    report(4, ok, f"{total} (graph, alpha) cases, {bad} disagreements, {secs:.1f}s")
    assert bad == 0
    assert secs < 600


FORCING_CORPUS = [(A, embed_tree(A, A.n, 2)) for A in all_graphs(2, 1)]


def test_criterion_05_forcing_properties(report):
    def run():
        inventory = fm.formula_inventory()
        counts = {"extension": 0, "consistency": 0, "density": 0, "truth": 0}
        cases = 0
        for _, T in FORCING_CORPUS:
            for f in inventory:
                g = fm.neg(f)
                for i in sorted(T.nodes):
                    cases += 1
                    below = T.descendants(i)
                    if forces(T, i, f):
                        counts["extension"] += not all(forces(T, j, f) for j in below)
                        counts["consistency"] += forces(T, i, g)
                    if fm.max_var_index(f) <= T.d:
                        counts["density"] += not any(forces(T, j, f) or forces(T, j, g)
                                                     for j in below)
                for alpha in (1, 2):
                    path = build_generic_path(T, None, alpha).nodes
                    k = fm.max_var_index(f)
                    if k > len(path) - 1:
                        continue
                    B = extract_structure(T, path)
                    truth = fm.evaluate(B, f, {f"x{j + 1}": j for j in range(k)})
                    cases += 1
                    counts["truth"] += truth != any(forces(T, i, f) for i in path)
        return cases, counts

    (cases, counts), secs = timed(run)
    bad = sum(counts.values())
    ok = bad == 0 and secs < 600
    detail = ", ".join(f"{k} {v}" for k, v in counts.items())
    report(5, ok, f"{cases} cases, counterexamples: {detail}, {secs:.1f}s")
    assert bad == 0
    assert secs < 600


def test_criterion_06_forcing_is_definable(report):
    def run():
        inventory = fm.formula_inventory()
        total = wrong_nodes = wrong_class = 0
        for _, T in FORCING_CORPUS:
            vocab = vocabulary_of(T)
            for f in inventory:
                g = force_formula(f, vocab)
                total += 1
                direct = [i for i in sorted(T.nodes) if forces(T, i, f)]
                wrong_nodes += direct != defined_nodes(T, g, vocab)
                c = fm.classify(f)
                if c.rank >= 1:
                    wrong_class += tuple(fm.classify(g)) != (c.side, c.rank)
        return total, wrong_nodes, wrong_class

    (total, wrong_nodes, wrong_class), secs = timed(run)
    ok = wrong_nodes == 0 and wrong_class == 0
    report(6, ok, f"{total} formula-tree pairs, {wrong_nodes} node-set mismatches, "
                  f"{wrong_class} classification mismatches, {secs:.1f}s")
    assert wrong_nodes == 0
    assert wrong_class == 0


def test_criterion_07_generic_paths(report):
    def run():
        total = bad = 0
        for A, T in FORCING_CORPUS:
            for alpha in (1, 2):
                built = build_generic_path(T, None, alpha)
                paths = [p for p in root_paths(T) if is_generic(T, p, alpha)] + [built.nodes]
                extracted = [extract_structure(T, p) for p in paths]
                for B in extracted:
                    total += 1
                    bad += not nx_isomorphic(A, B) or scott_rank(B) > alpha
                for B, C in itertools.combinations(extracted, 2):
                    total += 1
                    bad += not is_isomorphic(B, C)
        return total, bad

    (total, bad), secs = timed(run)
    report(7, bad == 0, f"{total} checks, {bad} failures, {secs:.1f}s")
    assert bad == 0


def test_criterion_08_daisy_classification(report):
    def run():
        wrong_rank = wrong_stage = 0
        for text, want in [(t, 1) for t in COFINITE] + [(t, 2) for t in COINFINITE]:
            W = EnumeratedSet.parse(text)
            wrong_rank += classify_daisy(W).rank != want
            wrong_rank += daisy_probe(W) != want
            for s in range(7):
                bunch = daisy_bunch(W, 3, s)
                members = W.stage(s)
                wrong_stage += petals_from_graph(bunch.structure, 3) != \
                    {i: petal_lengths(members, i) for i in range(3)}
        return wrong_rank, wrong_stage

    (wrong_rank, wrong_stage), secs = timed(run)
    ok = wrong_rank == 0 and wrong_stage == 0
    report(8, ok, f"{len(COFINITE)} cofinite + {len(COINFINITE)} coinfinite sets, "
                  f"{wrong_rank} wrong ranks, {wrong_stage} wrong stage graphs, {secs:.1f}s")
    assert wrong_rank == 0
    assert wrong_stage == 0


def test_criterion_09_coding_transfer(report):
    def run():
        pair = find_surrogate_pair(1, 9)
        rows = []
        for A in all_graphs(3, 1):
            r = verify_coding_bf(A, pair, 2)
            rows.append((A, r.count("a"), r.count("b"), rank_shift(A, pair)))
        return rows

    rows, secs = timed(run)
    va = sum(r[1] for r in rows)
    vb = sum(r[2] for r in rows)
    shifts = sum(r[3].ok for r in rows)
    ok = va == 0 and vb == 0
    report(9, ok, f"{len(rows)} graphs, item a violations {va}, item b violations {vb}, "
                  f"rank shift held on {shifts}/{len(rows)} (measured, not asserted), {secs:.1f}s")
    assert va == 0
    assert vb == 0


def test_criterion_10_corpus_is_deterministic(report, tmp_path, capsys):
    first, second = tmp_path / "run1.txt", tmp_path / "run2.txt"
    codes = [main(["corpus", "--out", str(first)]), main(["corpus", "--out", str(second)])]
    same = first.read_bytes() == second.read_bytes()
    report(10, same, f"exit codes {codes}, reports byte-identical: {same}")
    assert same
