"""Command-line front end.

Exit codes: 0 on success, 1 when a ``corpus`` suite fails, 2 on usage,
input or budget errors.
"""

from __future__ import annotations

import argparse
import itertools
import sys

from . import formulas as fm
from .backforth import BFError, bf_le, bf_table, sigma1_oracle
from .core import (StructureError, all_graphs, automorphism_orbits, format_structure,
                   is_isomorphic, parse_structure)
from .forcing import (AxiomError, ForcingError, defined_nodes, emit_axioms, force_formula,
                      forces, holds_on, vocabulary_of, weakly_forces)
from .fs_tree import TreeError, embed_tree, format_tree, parse_tree, tree_iso
from .generic import (GenericError, build_generic_path, extract_structure, good_match_verify,
                      is_generic, root_paths)
from .hardness import (EnumeratedSet, HardnessError, classify_daisy, code_structure,
                       daisy_bunch, daisy_probe, find_surrogate_pair, petal_lengths,
                       rank_shift, verify_coding_bf)
from .scott import ScottError, defining_sigma_formula, scott_rank, scott_rank_direct, scott_sentence
from .tree_bf import BudgetError, membership_text, membership_verdict

INPUT_ERRORS = (StructureError, fm.FormulaError, TreeError, BFError, BudgetError, ScottError,
                ForcingError, AxiomError, GenericError, HardnessError, OSError)


class UsageError(Exception):
    pass


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(args, text):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _inputs(args, count):
    paths = args.inputs or []
    if len(paths) != count:
        raise UsageError(f"expected {count} --in file(s), got {len(paths)}")
    return paths


def _structure(path):
    return parse_structure(_read(path))


def _is_tree_text(text):
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            return line.startswith("tree")
    return False


def _tuple(text):
    if text is None or not text.strip():
        return ()
    return tuple(int(x) for x in text.replace(",", " ").split())


# ---------------------------------------------------------------- subcommands

def cmd_parse(args):
    (path,) = _inputs(args, 1)
    S = _structure(path)
    _write(args, format_structure(S, one_line=args.format == "sexpr") +
           ("\n" if args.format == "sexpr" else ""))


def cmd_orbits(args):
    (path,) = _inputs(args, 1)
    S = _structure(path)
    part = automorphism_orbits(S, args.length)
    lines = []
    for cls in part.classes:
        lines.append(" ".join("(" + ",".join(map(str, t)) + ")" for t in cls))
    _write(args, "\n".join(lines) + "\n")


def cmd_bf(args):
    paths = args.inputs or []
    if len(paths) not in (1, 2):
        raise UsageError("bf takes one or two --in files")
    S = _structure(paths[0])
    T = _structure(paths[-1])
    level = 1 if args.alpha is None else args.alpha
    if args.left is not None or args.right is not None:
        v = bf_le(S, _tuple(args.left), T, _tuple(args.right), level, M=args.ext)
        _write(args, f"{str(v).lower()}\n")
        return
    table = bf_table(S, T, level, M=args.ext, jobs=args.jobs)
    _write(args, table.to_csv())


def cmd_rank(args):
    (path,) = _inputs(args, 1)
    S = _structure(path)
    report = {}
    r = scott_rank(S, report=report)
    lines = [str(r)]
    if args.witnesses or args.format == "sexpr":
        for a in sorted(report, key=lambda t: (len(t), t)):
            w = report[a]
            line = f"({','.join(map(str, a))}): beta={w.beta} extra=({','.join(map(str, w.extra))})"
            lines.append(line)
            if args.format == "sexpr":
                lines.append("  " + fm.to_sexpr(defining_sigma_formula(S, a, r)))
    _write(args, "\n".join(lines) + "\n")


def cmd_embed(args):
    (path,) = _inputs(args, 1)
    S = _structure(path)
    T = embed_tree(S, args.depth, 2 if args.width is None else args.width)
    _write(args, format_tree(T))


def _tree(path):
    return parse_tree(_read(path))


def cmd_check_tree(args):
    (path,) = _inputs(args, 1)
    T = _tree(path)
    alpha = 1 if args.alpha is None else args.alpha
    verdict = membership_verdict(T, alpha, args.agreement_base)
    _write(args, membership_text(verdict, alpha) + "\n")


def cmd_force(args):
    (path,) = _inputs(args, 1)
    T = _tree(path)
    if args.formula is None or len(args.formula) != 1:
        raise UsageError("force needs exactly one --formula")
    if args.node is None:
        raise UsageError("force needs --node")
    f = fm.parse_formula(args.formula[0])
    v = weakly_forces(T, args.node, f) if args.weak else forces(T, args.node, f)
    c = fm.classify(f)
    line = str(v).lower()
    if c.side == "pi" and c.rank > 0:
        line += " (sound-within-budget)"
    _write(args, line + "\n")


def cmd_emit_axioms(args):
    (path,) = _inputs(args, 1)
    T = _tree(path)
    vocab = vocabulary_of(T)
    inventory = [fm.parse_formula(t) for t in (args.formula or [])]
    sentence = scott_sentence(_structure(args.scott)) if args.scott else None
    alpha = 2 if args.alpha is None else args.alpha
    width = T.w if args.width is None else args.width
    ax = emit_axioms(alpha, inventory, vocab, sentence, width)
    lines = [f"# alpha: {alpha}", f"# replication width: {width}",
             f"# inventory: {len(inventory)} formula(s)"]
    lines += [f"#   {fm.to_sexpr(f)}" for f in inventory]
    lines.append(f"# scott sentence: {'yes' if sentence is not None else 'no'}")
    lines.append(f"# classification: {fm.classify(ax)}")
    lines.append(f"# holds on input tree: {str(holds_on(T, ax, vocab)).lower()}")
    lines.append(fm.to_sexpr(ax))
    _write(args, "\n".join(lines) + "\n")


def cmd_generic(args):
    (path,) = _inputs(args, 1)
    T = _tree(path)
    alpha = 1 if args.alpha is None else args.alpha
    budget = 1000 if args.budget is None else args.budget
    p = build_generic_path(T, args.node, alpha, budget)
    A = extract_structure(T, p.nodes)
    text = p.report() + "\n" + format_structure(A)
    _write(args, text)
    return 0 if p.ok else 1


def cmd_iso(args):
    a, b = _inputs(args, 2)
    ta, tb = _read(a), _read(b)
    if _is_tree_text(ta) != _is_tree_text(tb):
        raise UsageError("iso compares two trees or two structures")
    if _is_tree_text(ta):
        T1, T2 = parse_tree(ta), parse_tree(tb)
    else:
        S1, S2 = parse_structure(ta), parse_structure(tb)
        d = min(S1.n, S2.n) if args.depth is None else args.depth
        w = 2 if args.width is None else args.width
        T1, T2 = embed_tree(S1, d, w), embed_tree(S2, d, w)
    lines = ["isomorphic" if tree_iso(T1, T2) is not None else "not isomorphic"]
    if args.alpha is not None:
        lines.append(good_match_verify(T1, T2, args.alpha).text())
    _write(args, "\n".join(lines) + "\n")


def cmd_daisy(args):
    if args.set is None:
        raise UsageError("daisy needs --set")
    W = EnumeratedSet.parse(args.set)
    c = classify_daisy(W)
    lines = [f"set: {W}", f"rank: {c.rank}"] + [f"  {line}" for line in c.certificate]
    if args.centers is not None:
        bunch = daisy_bunch(W, args.centers, 0 if args.stage is None else args.stage)
        for i in bunch.centers:
            lines.append(f"c_{i}: petals {' '.join(map(str, bunch.petals[i]))}")
        lines.append(f"vertices: {bunch.structure.n}")
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(format_structure(bunch.structure))
    sys.stdout.write("\n".join(lines) + "\n")


def _pair(args, k=1):
    ext = 2 if args.ext is None else args.ext
    budget = 9 if args.budget is None else args.budget
    return find_surrogate_pair(k, budget, ext)


def cmd_surrogate(args):
    k = 1 if args.alpha is None else args.alpha
    _write(args, _pair(args, k).describe() + "\n")


def cmd_code(args):
    (path,) = _inputs(args, 1)
    A = _structure(path)
    pair = _pair(args)
    width = 1 if args.width is None else args.width
    coded = code_structure(A, pair, width)
    lines = [pair.describe(), f"coded size: {coded.structure.n}"]
    if args.verify is not None:
        lines.append(verify_coding_bf(A, pair, args.verify, width).text())
    if args.rank_shift:
        lines.append(rank_shift(A, pair, width).text())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(format_structure(coded.structure))
    sys.stdout.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------- corpus

def _suite_karp():
    graphs = all_graphs(3)
    bad = total = 0
    for S, T in itertools.product(graphs, repeat=2):
        for k in range(3):
            for a in itertools.permutations(range(S.n), k):
                for b in itertools.permutations(range(T.n), k):
                    total += 1
                    bad += sigma1_oracle(S, a, T, b) != bf_le(S, a, T, b, 1)
    return total, bad


def _suite_rank():
    graphs = all_graphs(3, 1)
    bad = sum(scott_rank(S) != scott_rank_direct(S) for S in graphs)
    return len(graphs), bad


def _suite_iso():
    graphs = all_graphs(3)
    total = bad = 0
    for A, B in itertools.product(graphs, repeat=2):
        total += 1
        TA, TB = embed_tree(A, min(3, A.n), 2), embed_tree(B, min(3, B.n), 2)
        bad += is_isomorphic(A, B) != (tree_iso(TA, TB) is not None)
    return total, bad


def _suite_membership():
    total = bad = 0
    for A in all_graphs(3, 1):
        T = embed_tree(A, A.n, 2)
        r = scott_rank(A)
        for alpha in (1, 2, 3):
            total += 1
            bad += membership_verdict(T, alpha).ok != (alpha >= r)
    return total, bad


def _forcing_corpus():
    for A in all_graphs(2, 1):
        yield A, embed_tree(A, A.n, 2)


def _suite_forcing():
    total = bad = 0
    inventory = fm.formula_inventory()
    for A, T in _forcing_corpus():
        for f in inventory:
            k = fm.max_var_index(f)
            negated = fm.neg(f)
            for i in sorted(T.nodes):
                below = T.descendants(i)
                total += 1
                if forces(T, i, f):
                    bad += not all(forces(T, j, f) for j in below)
                    bad += any(forces(T, j, negated) for j in below)
                if k <= T.d:
                    bad += not any(forces(T, j, f) or forces(T, j, negated) for j in below)
            for alpha in (1, 2):
                p = build_generic_path(T, None, alpha)
                if k > len(p.nodes) - 1:
                    continue
                B = extract_structure(T, p.nodes)
                truth = fm.evaluate(B, f, {f"x{j + 1}": j for j in range(k)})
                total += 1
                bad += truth != any(forces(T, j, f) for j in p.nodes)
    return total, bad


def _suite_definability():
    total = bad = 0
    inventory = fm.formula_inventory()
    for A, T in _forcing_corpus():
        vocab = vocabulary_of(T)
        for f in inventory:
            g = force_formula(f, vocab)
            total += 1
            direct = [i for i in sorted(T.nodes) if forces(T, i, f)]
            bad += direct != defined_nodes(T, g, vocab)
            c, cg = fm.classify(f), fm.classify(g)
            want = ("sigma", 1) if c.rank == 0 else (c.side, c.rank)
            bad += (cg.side, cg.rank) != want
    return total, bad


def _suite_generic():
    total = bad = 0
    for A, T in _forcing_corpus():
        for alpha in (1, 2):
            paths = [p for p in root_paths(T) if is_generic(T, p, alpha)]
            built = build_generic_path(T, None, alpha)
            total += 1
            bad += not built.ok
            for p in paths + [built.nodes]:
                B = extract_structure(T, p)
                total += 1
                bad += not is_isomorphic(B, A) or scott_rank(B) > alpha
    return total, bad


def _daisy_sets():
    cof = ["cofinite:", "cofinite:1", "cofinite:1,3", "cofinite:2,4,6", "cofinite:5",
           "cofinite:1,2,3,4", "periodic:m=1,r=0,t=0", "periodic:m=2,r=0,r=1,t=3",
           "cofinite:7", "cofinite:3,8"]
    coinf = ["periodic:m=2,r=0,t=0", "finite:0,2,5", "finite:0", "periodic:m=3,r=0,t=0",
             "periodic:m=3,r=0,r=1,t=0", "finite:0,1,2,3", "periodic:m=4,r=0,r=2,t=2",
             "periodic:m=5,r=0,t=0", "finite:0,4", "periodic:m=2,r=0,t=5"]
    return cof, coinf


def _suite_daisy():
    cof, coinf = _daisy_sets()
    total = bad = 0
    for text, want in [(t, 1) for t in cof] + [(t, 2) for t in coinf]:
        W = EnumeratedSet.parse(text)
        total += 1
        bad += classify_daisy(W).rank != want or daisy_probe(W) != want
        for s in range(7):
            bunch = daisy_bunch(W, 3, s)
            members = W.stage(s)
            total += 1
            bad += any(bunch.petals[i] != petal_lengths(members, i) for i in range(3))
            bad += bunch.structure.n != bunch.vertex_count()
    return total, bad


def _suite_coding():
    pair = find_surrogate_pair(1, 9)
    total = bad = 0
    for A in all_graphs(3, 1):
        report = verify_coding_bf(A, pair, 1)
        total += report.checks.get("a", 0)
        bad += report.count("a")
    return total, bad


SUITES = [
    ("karp-level-1", _suite_karp),
    ("rank-oracles", _suite_rank),
    ("embedding-iso", _suite_iso),
    ("tree-membership", _suite_membership),
    ("forcing-properties", _suite_forcing),
    ("forcing-definability", _suite_definability),
    ("generic-paths", _suite_generic),
    ("daisy", _suite_daisy),
    ("coding-level-1", _suite_coding),
]


def cmd_corpus(args):
    rows = []
    failed = False
    for name, fn in SUITES:
        total, bad = fn()
        failed = failed or bad > 0
        rows.append(f"{name:<22} {'pass' if bad == 0 else 'fail':<5} {total:>7} cases {bad:>5} failures")
    _write(args, "\n".join(rows) + "\n")
    return 1 if failed else 0


COMMANDS = {
    "parse": cmd_parse, "orbits": cmd_orbits, "bf": cmd_bf, "rank": cmd_rank,
    "embed": cmd_embed, "check-tree": cmd_check_tree, "force": cmd_force,
    "emit-axioms": cmd_emit_axioms, "generic": cmd_generic, "iso": cmd_iso,
    "daisy": cmd_daisy, "code": cmd_code, "surrogate": cmd_surrogate, "corpus": cmd_corpus,
}


def build_parser():
    p = argparse.ArgumentParser(prog="scottbench")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--in", dest="inputs", action="append", metavar="FILE")
    p.add_argument("--out")
    p.add_argument("--alpha", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=["text", "csv", "sexpr"], default="text")
    p.add_argument("--length", type=int, default=1, help="tuple length for orbits")
    p.add_argument("--left", help="left tuple for bf, e.g. '0 1'")
    p.add_argument("--right", help="right tuple for bf")
    p.add_argument("--ext", type=int, help="extension bound")
    p.add_argument("--node", type=int)
    p.add_argument("--formula", action="append")
    p.add_argument("--weak", action="store_true")
    p.add_argument("--agreement-base", choices=["sigma", "nu"], default="sigma")
    p.add_argument("--witnesses", action="store_true")
    p.add_argument("--scott", metavar="FILE", help="structure whose Scott sentence is added")
    p.add_argument("--set", help="enumerated set, e.g. cofinite:1,3")
    p.add_argument("--centers", type=int)
    p.add_argument("--stage", type=int)
    p.add_argument("--verify", type=int, metavar="M")
    p.add_argument("--rank-shift", action="store_true")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"scottbench: error: {e}", file=sys.stderr)
        return 2
    except INPUT_ERRORS as e:
        print(f"scottbench: error: {e}", file=sys.stderr)
        return 2
    return code or 0
