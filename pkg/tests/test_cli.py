import pytest

from scottbench.cli import main
from scottbench.core import complete_graph, disjoint_union, format_structure, path_graph, star
from scottbench.fs_tree import embed_tree, full_node_count, parse_tree


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, S in [("k2", complete_graph(2)), ("p3", path_graph(3)),
                    ("k13k14", disjoint_union(star(3), star(4)))]:
        p = tmp_path / f"{name}.struct"
        p.write_text(format_structure(S))
        out[name] = str(p)
    out["dir"] = tmp_path
    return out


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_rank_of_two_stars(files, capsys):
    # every orbit of a finite structure is existentially definable, so rank 1
    code, out = run(capsys, "rank", "--in", files["k13k14"])
    assert code == 0
    assert out.out == "1\n"


def test_embed_then_check_tree(files, capsys):
    tree = str(files["dir"] / "k2.tree")
    code, _ = run(capsys, "embed", "--in", files["k2"], "--depth", "2", "--width", "2",
                  "--out", tree)
    assert code == 0
    T = parse_tree(open(tree).read())
    assert len(T) == 1 + 2 * 2 + 2 * 4 == full_node_count(2, 2, 2)
    assert len({v.tuple for v in embed_tree(complete_graph(2), 2, 2).ordered()}) == 5
    code, out = run(capsys, "check-tree", "--in", tree, "--alpha", "1")
    lines = out.out.splitlines()
    assert code == 0
    assert sum(line.split(": ")[1].startswith("pass") for line in lines[:6]) == 6
    assert lines[6] == "member of T^1 (within budget)"


def test_bf_and_orbits(files, capsys):
    code, out = run(capsys, "bf", "--in", files["p3"], "--in", files["p3"],
                    "--left", "0", "--right", "1", "--alpha", "1")
    assert (code, out.out) == (0, "false\n")
    code, out = run(capsys, "orbits", "--in", files["p3"], "--length", "1")
    assert out.out == "(0) (2)\n(1)\n"


def test_force_labels_pi_verdicts(files, capsys):
    tree = str(files["dir"] / "k2.tree")
    run(capsys, "embed", "--in", files["k2"], "--depth", "2", "--out", tree)
    code, out = run(capsys, "force", "--in", tree, "--node", "0", "--formula",
                    "(and (forall (u v) (qfree (atom - E u v))))")
    assert out.out == "false (sound-within-budget)\n"
    code, out = run(capsys, "force", "--in", tree, "--node", "0", "--weak", "--formula",
                    "(or (exists (u v) (qfree (atom + E u v))))")
    assert out.out == "true\n"


def test_emit_axioms_metadata(files, capsys):
    tree = str(files["dir"] / "k2.tree")
    run(capsys, "embed", "--in", files["k2"], "--depth", "2", "--out", tree)
    code, out = run(capsys, "emit-axioms", "--in", tree, "--scott", files["k2"],
                    "--formula", "(or (exists (u) (qfree (atom + E x1 u))))")
    lines = out.out.splitlines()
    assert code == 0
    assert "# classification: Pi_2" in lines
    assert "# holds on input tree: true" in lines
    assert lines[-1].startswith("(and ")


def test_generic_and_iso(files, capsys):
    tree = str(files["dir"] / "k2.tree")
    run(capsys, "embed", "--in", files["k2"], "--depth", "2", "--out", tree)
    code, out = run(capsys, "generic", "--in", tree, "--alpha", "1")
    assert code == 0 and out.out.startswith("path: 0 1 5\n")
    code, out = run(capsys, "iso", "--in", files["k2"], "--in", files["p3"], "--alpha", "1")
    assert out.out.splitlines()[0] == "not isomorphic"


def test_daisy_and_code(files, capsys):
    code, out = run(capsys, "daisy", "--set", "cofinite:1,3")
    assert out.out.splitlines()[1] == "rank: 1"
    code, out = run(capsys, "daisy", "--set", "finite:0,2", "--centers", "2", "--stage", "2")
    assert "c_0: petals 3 5" in out.out.splitlines()
    code, out = run(capsys, "code", "--in", files["k2"], "--verify", "2", "--rank-shift")
    assert "item a: 112 checks, 0 violations" in out.out
    assert "SR(A)=1 SR(B)=1 expected 2: fail (surrogate limitation)" in out.out


def test_usage_errors_exit_two(files, capsys):
    assert main(["bf"]) == 2
    assert main(["force", "--in", files["p3"], "--node", "0"]) == 2
    assert main(["daisy"]) == 2
    assert main(["rank", "--in", str(files["dir"] / "missing")]) == 2
    assert main(["daisy", "--set", "odd:1"]) == 2
    with pytest.raises(SystemExit) as e:
        main(["nonsense"])
    assert e.value.code == 2
