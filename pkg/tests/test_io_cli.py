from __future__ import annotations

import json
import subprocess
import sys

import pytest

from conftest import FIXTURES
from matfol import io
from matfol.cli import EXIT_ERROR, EXIT_OK, main
from matfol.errors import FormatError

MATROID_FILES = sorted(
    p.name for p in FIXTURES.glob("*.json")
    if p.name not in {"malformed_edge.json", "truncated.json"}
    and not p.name.startswith(("mdwc_", "two_sum", "path_of", "three_sum", "bad_"))
)
TREE_FILES = ["two_sum_triangles.json", "path_of_triangles.json", "three_sum_k4.json",
              "three_sum_mixed.json", "bad_three_sum.json"]
MDWC_FILES = ["mdwc_k4.json", "mdwc_k4_triple.json", "mdwc_bond_c4.json"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    assert code == EXIT_OK, err
    return json.loads(out)


# -- file formats ----------------------------------------------------------------------------


@pytest.mark.parametrize("name", MATROID_FILES)
def test_matroid_round_trip(name):
    m = io.matroid_from_json(io.load_json(FIXTURES / name))
    data = io.matroid_to_json(m)
    again = io.matroid_from_json(json.loads(io.dump_json(data)))
    assert io.matroid_to_json(again) == data
    assert again.elements == m.elements
    assert again.rank_table() == m.rank_table()


@pytest.mark.parametrize("name", TREE_FILES)
def test_tree_round_trip(name):
    t = io.tree_from_json(io.load_json(FIXTURES / name))
    data = io.tree_to_json(t)
    again = io.tree_from_json(json.loads(io.dump_json(data)))
    assert io.tree_to_json(again) == data
    assert set(again.nodes) == set(t.nodes)


@pytest.mark.parametrize("name", MDWC_FILES)
def test_mdwc_round_trip(name):
    inst = io.mdwc_from_json(io.load_json(FIXTURES / name))
    data = io.mdwc_to_json(inst)
    again = io.mdwc_from_json(json.loads(io.dump_json(data)))
    assert io.mdwc_to_json(again) == data
    assert again.triples == inst.triples


def test_format_errors_name_the_field(tmp_path):
    with pytest.raises(FormatError) as exc:
        io.matroid_from_json(io.load_json(FIXTURES / "malformed_edge.json"))
    assert exc.value.field == "edges[0].v"
    with pytest.raises(FormatError, match="invalid JSON"):
        io.load_json(FIXTURES / "truncated.json")
    with pytest.raises(FormatError, match="cannot read"):
        io.load_json(tmp_path / "missing.json")
    with pytest.raises(FormatError) as exc:
        io.matroid_from_json({"type": "binary", "rows": 2, "elements": [{"id": "a", "vector": "102"}]})
    assert exc.value.field == "elements[0].vector"
    with pytest.raises(FormatError) as exc:
        io.matroid_from_json({"type": "wheel"})
    assert exc.value.field == "type"
    bad_weight = io.mdwc_to_json(io.mdwc_from_json(io.load_json(FIXTURES / "mdwc_k4_triple.json")))
    del bad_weight["triples"][0]["w"][""]
    with pytest.raises(FormatError, match="missing weight"):
        io.mdwc_from_json(bad_weight)


# -- command line ---------------------------------------------------------------------------------


def test_decide(capsys):
    code, out, _ = run(capsys, "decide", "--matroid", FIXTURES / "k3.json",
                       "--sentence", FIXTURES / "u23_sentence.txt")
    assert code == EXIT_OK and out.strip() == "TRUE"
    code, out, _ = run(capsys, "decide", "--matroid", FIXTURES / "k4.json",
                       "--sentence", FIXTURES / "has_loop.txt")
    assert code == EXIT_OK and out.strip() == "FALSE"
    data = run_json(capsys, "decide", "--matroid", FIXTURES / "loopy.json",
                    "--sentence", FIXTURES / "has_loop.txt")
    assert data["verdict"] is True
    assert data["d"] == 1 and data["stats"]["leaves"][0]["k"] == 1


@pytest.mark.parametrize("matroid", ["k3.json", "k4.json", "u23.json", "u33.json", "loopy.json", "theta.json"])
@pytest.mark.parametrize("sentence", ["u23_sentence.txt", "has_loop.txt", "combo.txt"])
def test_decide_both_modes_agree(capsys, matroid, sentence):
    code, out, err = run(capsys, "decide", "--mode", "both", "--matroid", FIXTURES / matroid,
                         "--sentence", FIXTURES / sentence)
    assert code == EXIT_OK, err
    assert out.strip() in ("TRUE", "FALSE")


def test_gaifman(capsys):
    data = run_json(capsys, "gaifman", "--matroid", FIXTURES / "k3.json", "--d", 3)
    assert data["edges"] == [["e12", "e13"], ["e12", "e23"], ["e13", "e23"]]
    dp = run_json(capsys, "gaifman", "--decomposition", FIXTURES / "three_sum_k4.json", "--d", 4)
    assert dp["edges"]


def test_distance(capsys):
    data = run_json(capsys, "distance", "--matroid", FIXTURES / "k4.json", "--pair", "e12", "e34")
    assert data["distance"] == 4
    data = run_json(capsys, "distance", "--matroid", FIXTURES / "k4.json", "--d", 3, "--pair", "e12", "e34")
    assert data["distance"] is None
    code, out, _ = run(capsys, "distance", "--matroid", FIXTURES / "k3.json")
    assert code == EXIT_OK and len(out.splitlines()) == 3


def test_mdwc(capsys):
    for solver in ("auto", "brute", "graphic"):
        data = run_json(capsys, "mdwc", "--instance", FIXTURES / "mdwc_k4_triple.json", "--solver", solver)
        assert data["value"] == 3
    data = run_json(capsys, "mdwc", "--instance", FIXTURES / "mdwc_bond_c4.json", "--solver", "cographic")
    assert data["value"] == 2
    data = run_json(capsys, "mdwc", "--instance", FIXTURES / "mdwc_k4.json", "--coloring", "monte_carlo")
    assert data["value"] == 4


def test_circuit(capsys):
    data = run_json(capsys, "circuit", "--decomposition", FIXTURES / "two_sum_triangles.json",
                    "--f1", "p", "--f2", "q", "--d", 4)
    assert data["length"] == 4
    code, out, _ = run(capsys, "circuit", "--decomposition", FIXTURES / "two_sum_triangles.json",
                       "--f1", "p", "--f2", "q", "--d", 3)
    assert code == EXIT_OK and out.strip() == "inf"


def test_validate(capsys):
    data = run_json(capsys, "validate", "--decomposition", FIXTURES / "bad_three_sum.json")
    assert data["valid"] is False
    assert any("not a circuit in both" in v for v in data["violations"])
    data = run_json(capsys, "validate", "--matroid", FIXTURES / "r10.json")
    assert data["valid"] is True


def test_branchwidth(capsys):
    assert run_json(capsys, "branchwidth", "--matroid", FIXTURES / "k4.json")["branch_width"] == 3


def test_errors_exit_with_status_2(capsys):
    code, _, err = run(capsys, "validate", "--matroid", FIXTURES / "malformed_edge.json")
    assert code == EXIT_ERROR and "edges[0].v" in err
    code, _, err = run(capsys, "validate", "--matroid", FIXTURES / "truncated.json")
    assert code == EXIT_ERROR and "invalid JSON" in err
    code, _, err = run(capsys, "decide", "--matroid", FIXTURES / "k3.json")
    assert code == EXIT_ERROR and "--sentence" in err
    code, _, err = run(capsys, "distance", "--matroid", FIXTURES / "k3.json", "--pair", "e12", "zz")
    assert code == EXIT_ERROR and "zz" in err


def test_budget_from_environment(capsys, monkeypatch):
    args = ("decide", "--mode", "brute", "--matroid", FIXTURES / "r10.json",
            "--sentence", FIXTURES / "u23_sentence.txt")
    monkeypatch.setenv("MATFOL_BUDGET", "10")
    code, _, err = run(capsys, *args)
    assert code == EXIT_ERROR and "budget" in err.lower()
    # R10 has no 3-element circuit, so it has no U_{2,3} restriction
    code, out, _ = run(capsys, *args, "--budget", 10**6)
    assert code == EXIT_OK and out.strip() == "FALSE"
    monkeypatch.setenv("MATFOL_BUDGET", "lots")
    code, _, err = run(capsys, *args)
    assert code == EXIT_ERROR and "MATFOL_BUDGET" in err


def test_output_is_deterministic(capsys):
    args = ("mdwc", "--instance", FIXTURES / "mdwc_k4.json", "--coloring", "monte_carlo", "--seed", 7, "--json")
    first = run(capsys, *args)
    assert all(run(capsys, *args) == first for _ in range(3))
    args = ("decide", "--matroid", FIXTURES / "theta.json", "--sentence", FIXTURES / "combo.txt", "--json")
    first = run(capsys, *args)
    assert run(capsys, *args) == first


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "matfol", "gaifman", "--matroid", str(FIXTURES / "k3.json"), "--d", "2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == EXIT_OK
    assert proc.stdout.strip() == ""


def test_disagreeing_pipelines_exit_with_status_3(capsys, monkeypatch):
    import matfol.cli as cli

    monkeypatch.setattr(cli, "decide_sentence", lambda *a, **kw: False)
    code, out, err = run(capsys, "decide", "--mode", "both", "--matroid", FIXTURES / "k3.json",
                         "--sentence", FIXTURES / "u23_sentence.txt")
    assert code == cli.EXIT_MISMATCH
    assert "mismatch" in err
