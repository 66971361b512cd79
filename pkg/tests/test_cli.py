import json
import pathlib
import subprocess
import sys

import pytest

from stmodloc.cli import main

ROOT = pathlib.Path(__file__).resolve().parents[1]
FIXTURE = str(ROOT / "fixtures" / "M_P_n.json")


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(argv, capsys):
    code, out, _ = run(argv, capsys)
    return code, json.loads(out)


def test_resolve_betti(capsys):
    code, obj = run_json(["resolve", "--algebra", '{"p":2,"exponents":[2,2]}', "--length", "6"],
                         capsys)
    assert code == 0 and obj["betti"] == [1, 2, 3, 4, 5, 6, 7]
    code, obj = run_json(["resolve", "--algebra", '{"p":2,"exponents":[2]}'], capsys)
    assert code == 0 and set(obj["betti"]) == {1}


@pytest.mark.parametrize("argv", [
    ["resolve", "--algebra", '{"p":4,"exponents":[4]}'],
    ["resolve", "--algebra", "not json"],
    ["resolve", "--algebra", "[2]"],
    ["resolve", "--algebra", '{"p":2,"exponents":[2]}', "--length", "0"],
    ["verify", "canon-seq", "--p", "2", "--H", "[2]", "--n", "0"],
    ["verify", "rank2-iso", "--n", "1"],
    ["verify", "rank2-iso", "--p", "2", "--n", "1", "--corrupt"],
    ["support", "--module", "/nonexistent.json"],
    ["endo", "--H", '{"p":2,"exponents":[2]}', "--N", "0"],
    ["bogus"],
])
def test_invalid_input_exits_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2


def test_budget_bounds(capsys):
    code, _, _ = run(["--budget", str(2**25), "resolve", "--algebra", "[2]", "--p", "2"], capsys)
    assert code == 2


def test_verify_canon_seq_and_corruption(capsys):
    code, obj = run_json(["verify", "canon-seq", "--p", "2", "--H", "[2]", "--n", "3"], capsys)
    assert code == 0 and obj["result"] == "pass"
    code, obj = run_json(["verify", "canon-seq", "--p", "2", "--H", "[2]", "--n", "3",
                          "--corrupt"], capsys)
    assert code == 1 and obj["result"] == "fail"


def test_verify_rank2(capsys):
    code, obj = run_json(["verify", "rank2-iso", "--p", "3", "--n", "2"], capsys)
    assert code == 0
    assert obj["report"]["dim_N"] == obj["report"]["dim_omega"] == 19


@pytest.mark.parametrize("check,extra", [
    ("lemma31", ["--p", "2", "--H", "[2,2]", "--n", "2"]),
    ("tensor-window", ["--p", "2", "--H", "[2]", "--n", "2"]),
    ("locality-decay", ["--p", "2", "--H", "[2]", "--n", "1"]),
    ("locality-decay", ["--p", "2", "--H", "[2]", "--n", "1", "--control"]),
])
def test_other_checks_pass(check, extra, capsys):
    code, obj = run_json(["verify", check] + extra, capsys)
    assert code == 0, obj


def test_endo_flags(capsys):
    code, obj = run_json(["endo", "--H", '{"p":2,"exponents":[2,2]}', "--N", "6"], capsys)
    assert code == 0 and obj["flags"]["radical_square_zero"]
    code, obj = run_json(["endo", "--H", '{"p":2,"exponents":[2]}', "--N", "6"], capsys)
    assert code == 0 and obj["flags"]["periodic_structure"]
    assert obj["localization"]["match"]


def test_endo_coproduct_option_is_byte_identical(capsys):
    base = run(["endo", "--H", '{"p":2,"exponents":[2]}', "--N", "5"], capsys)[1]
    for kind in ("group_like", "primitive"):
        out = run(["endo", "--H", '{"p":2,"exponents":[2]}', "--N", "5", "--coproduct", kind],
                  capsys)[1]
        assert out == base


def test_support_fixture(capsys):
    code, obj = run_json(["support", "--module", FIXTURE, "--D", "1"], capsys)
    assert code == 0
    free = {tuple(e["lambda"]): e["free"] for e in obj}
    assert free == {(1, 0): True, (1, 1): True, (0, 1): False}


def test_corrupt_fixture_fails_loudly(tmp_path, capsys):
    obj = json.loads(pathlib.Path(FIXTURE).read_text())
    obj["actions"][0]["entries"][0][0] = 1  # X_1 is no longer nilpotent
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code, _, err = run(["support", "--module", str(bad)], capsys)
    assert code == 2 and "error" in err


def test_tate_and_omega(capsys):
    code, obj = run_json(["tate", "--H", "[2,2]", "--p", "2", "--N", "4"], capsys)
    assert code == 0 and obj["duality"]
    assert [r["dim"] for r in obj["dims"]] == [4, 3, 2, 1, 1, 2, 3, 4, 5]
    code, obj = run_json(["omega", "--algebra", "[2,2]", "--p", "2", "--n", "-2"], capsys)
    assert code == 0 and obj["dim"] == 5


def test_text_format_mirrors_json(capsys):
    code, out, _ = run(["--format", "text", "resolve", "--algebra", "[3]", "--p", "3",
                        "--length", "2"], capsys)
    assert code == 0 and "betti: [1, 1, 1]" in out


def test_determinism_across_processes():
    cmd = [sys.executable, "-m", "stmodloc", "endo", "--H", '{"p":3,"exponents":[3]}', "--N", "4"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
