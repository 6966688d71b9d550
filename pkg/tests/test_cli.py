"""CLI surface: schemas, determinism, exit codes, worked values."""

from __future__ import annotations

import json


from rtails.cli import main
from rtails.serialize import (
    class0_from_json,
    class0_to_json,
    rtclass_from_json,
    rtclass_to_json,
    tree_from_json,
    tree_to_json,
)
from rtails.trees import H0, build_tree
from rtails.cycles import z_cycle
from rtails.rtclasses import f_class


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


CHAIN_42 = {
    "vertices": [
        {"genus": "g", "legs": []},
        {"genus": 0, "legs": [4]},
        {"genus": 0, "legs": [1, 2, 3]},
    ],
    "edges": [[1, 0], [2, 1]],
    "exp_half": {"1+": 1},
    "exp_leg": {},
}


def test_tree_json_roundtrip():
    for blob_tree in [
        build_tree([[1, 2, H0], [3, 4]], [(0, 1)], half_exp={(0, 1): 2}),
        build_tree([[], [1], [2, 3]], [(0, 1), (1, 2)], rt_root=0, half_exp={(1, 0): 1}),
    ]:
        tree, dec = blob_tree
        back_tree, back_dec = tree_from_json(tree_to_json(tree, dec))
        assert (back_tree, back_dec) == (tree, dec)


def test_class_json_roundtrip():
    x = z_cycle(4, 2, 1)
    assert class0_from_json(class0_to_json(x)) == x
    y = f_class("k", "g", 3)
    assert rtclass_from_json(rtclass_to_json(y)) == y


def test_coeff_42(tmp_path, capsys):
    path = tmp_path / "chain.json"
    path.write_text(json.dumps(CHAIN_42))
    code, out, err = run_cli(capsys, "coeff", "--graph", str(path))
    assert code == 0
    assert out.splitlines() == ["42", "weightings: 9"]
    code, out, _ = run_cli(capsys, "coeff", "--graph", str(path), "--brute")
    assert out.splitlines()[0] == "42"


def test_zcycle_latex_mentions_coefficients(capsys):
    code, out, _ = run_cli(capsys, "zcycle", "--n", "4", "--i", "3", "--j", "2", "--format", "latex")
    assert code == 0
    for c in ("75", "21", "18", "9", "3"):
        assert c in out


def test_verify_vanishing_exit_code(capsys):
    code, out, err = run_cli(capsys, "verify", "vanishing", "--max-n", "4")
    assert code == 0
    assert out.count("pass") == len(out.strip().splitlines())
    assert "time" in err


def test_verify_output_deterministic(capsys):
    _, out1, _ = run_cli(capsys, "verify", "closed-forms", "--max-n", "4")
    _, out2, _ = run_cli(capsys, "verify", "closed-forms", "--max-n", "4")
    assert out1 == out2


def test_fclass_json_deterministic(capsys):
    _, out1, _ = run_cli(capsys, "fclass", "--n", "3", "--format", "json")
    _, out2, _ = run_cli(capsys, "fclass", "--n", "3", "--format", "json")
    assert out1 == out2
    blob = json.loads(out1)
    assert len(blob["terms"]) == 14  # 8 shapes over labelings


def test_pair_cli(tmp_path, capsys):
    x = z_cycle(3, 2, 1)
    klass = tmp_path / "class.json"
    klass.write_text(json.dumps(class0_to_json(x)))
    tree, _ = build_tree([[1, 2, 3, H0]], [])
    stratum = tmp_path / "stratum.json"
    stratum.write_text(json.dumps(tree_to_json(tree)))
    code, out, _ = run_cli(capsys, "pair", "--klass", str(klass), "--stratum", str(stratum))
    assert code == 0
    assert out.strip() == "0"


def test_usage_errors(capsys):
    code, _, _ = run_cli(capsys, "zcycle", "--n", "4")
    assert code == 2
    code, _, _ = run_cli(capsys, "fclass")
    assert code == 2
    code, _, _ = run_cli(capsys, "relations", "--g", "2", "--n", "2")
    assert code == 2


def test_relations_emit(capsys):
    code, out, _ = run_cli(capsys, "relations", "--g", "2", "--n", "3", "--format", "json")
    assert code == 0
    blob = json.loads(out)
    assert blob["k"] == "1"
    assert blob["terms"]


def test_trees_count(capsys):
    code, out, _ = run_cli(capsys, "trees", "--n", "4", "--format", "text")
    assert code == 0
    assert out.splitlines()[0] == "26"
    code, out, _ = run_cli(capsys, "trees", "--n", "3", "--rt", "--format", "json")
    blob = json.loads(out)
    assert blob["count"] == 8


def test_verify_parallel_matches_serial(capsys):
    _, out1, _ = run_cli(capsys, "verify", "collide0", "--max-n", "4")
    _, out2, _ = run_cli(capsys, "verify", "collide0", "--max-n", "4", "--jobs", "2")
    assert out1 == out2
