from __future__ import annotations

import json

import pytest

from alextopos import corpus
from alextopos.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", ["trivial", "mod2", "mod3", "saturate"])
def test_figure_goldens(tmp_path, name):
    out = tmp_path / "fig.dot"
    assert main(["etale", "render", "--monoid", "nat.json", "--mset", f"{name}.json", "--window", "1..9",
                 "--out", str(out)]) == 0
    assert out.read_bytes() == corpus.corpus_file(f"golden/fig_{name}.dot").read_bytes()


def test_pattern_golden(capsys):
    code, out, _ = run(capsys, "groupoid", "pattern", "--monoid", "nat_2eq5.json", "--size", "11")
    assert code == 0 and out == corpus.corpus_file("golden/pattern_2eq5.txt").read_text()


def test_monoid_info(capsys):
    code, out, _ = run(capsys, "monoid", "info", "--monoid", "nat_1eq2.json", "--format", "json")
    info = json.loads(out)
    assert code == 0 and info["stable"] and info["idempotents"] == ["(0)", "(1)"]


def test_coset_poset_ascii(capsys):
    code, out, _ = run(capsys, "coset-poset", "--monoid", "nat_z2.json", "--window", "0..2", "--format", "ascii")
    assert code == 0 and out == "(0);0 -> (1);0\n(1);0 -> (2);0\n"


def test_etale_build_json(capsys):
    code, out, _ = run(capsys, "etale", "build", "--monoid", "nat.json", "--mset", "mod2.json", "--radius", "3")
    data = json.loads(out)
    assert code == 0 and len(data["nodes"]) == 14 and data["fiber_labels"]["(0)|1"] == "1"


def test_groupoid_commands(capsys):
    code, out, _ = run(capsys, "groupoid", "check", "--monoid", "nat_2eq5.json", "--radius", "5", "--budget", "500")
    assert code == 0 and out.startswith("PASS") and "FAIL" not in out
    code, out, _ = run(capsys, "groupoid", "iso", "--monoid", "nat.json", "--radius", "5", "--budget", "500")
    assert code == 0 and "FAIL" not in out
    code, out, _ = run(capsys, "groupoid", "induced", "--monoid", "nat_2eq5.json", "--mset", "mod2.json",
                       "--radius", "6")
    assert code == 0 and "monotone=False,valid=False" in out


def test_groupoid_build_is_reproducible(capsys):
    argv = ("groupoid", "build", "--monoid", "nat_1eq2.json", "--radius", "4", "--seed", "7")
    first = run(capsys, *argv)
    assert first == run(capsys, *argv) and first[0] == 0


def test_points(capsys, tmp_path):
    assert run(capsys, "points", "free", "--k", "1")[1] == "principal\n"
    assert run(capsys, "points", "free", "--k", "2", "--prefix", "x2", "--period", "x2*x1")[1] == \
        "tail:(x1*x2)^inf\n"
    poset = tmp_path / "disc.json"
    poset.write_text(json.dumps({"nodes": ["1", "2", "3"], "leq": []}))
    code, out, _ = run(capsys, "points", "finite", "--poset", str(poset), "--perm", "2,1,3", "--perm", "2,3,1")
    assert code == 0 and out.startswith("points: 1\n")


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--check", "ambient", "--check", "render.covers-brute-force")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 6 and all(x.startswith("PASS check=") for x in lines)


@pytest.mark.parametrize("argv", [
    ["etale", "render", "--monoid", "nat.json", "--mset", "mod2.json", "--window", "9..1"],
    ["etale", "render", "--monoid", "missing.json", "--mset", "mod2.json"],
    ["points", "free", "--k", "2", "--prefix", "x1*x1^-1"],
    ["coset-poset", "--monoid", "nat.json", "--depth", "0"],
    ["verify", "--check", "no-such-check"],
    ["groupoid", "induced", "--monoid", "nat.json"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["groupoid", "explode", "--monoid", "nat.json"])
    assert exc.value.code == 2


def test_window_errors_exit_3(capsys):
    code, _, err = run(capsys, "groupoid", "pattern", "--monoid", "nat_2eq5.json", "--size", "11", "--radius", "5")
    assert code == 3 and "stable core" in err
    code, _, _ = run(capsys, "etale", "build", "--monoid", "nat.json", "--mset", "mod2.json", "--window", "1..3",
                     "--format", "json")
    assert code == 0


def test_verify_all_passes_on_the_corpus(capsys):
    code, out, _ = run(capsys, "verify", "--all")
    lines = out.splitlines()
    assert code == 0 and len(lines) >= 30
    assert not [x for x in lines if not x.startswith("PASS")]
