from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from permfix import cli


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_exact_i_example(capsys):
    code, out, _ = run(capsys, "exact-i", "--n", "4", "--k", "2,2", "--d", "1,1")
    assert code == 0
    assert out.splitlines()[0].startswith("n,k,d,p")
    assert rows(out)[0]["p"] == "5/12"


def test_delta_table(capsys):
    code, out, _ = run(capsys, "delta", "--m", "2..5")
    table = rows(out)
    assert [r["m"] for r in table] == ["2", "3", "4", "5"]
    for r, ref in zip(table, ("0.08607", "0.27017", "0.50655", "0.77734")):
        assert f"{float(r['delta']):.5f}" == ref


def test_dominant(capsys):
    _, out, _ = run(capsys, "dominant", "--nu", "5")
    row = rows(out)[0]
    assert row["dominant"] == "(4,1)" and float(row["exponent"]) == 0.75
    _, out, _ = run(capsys, "dominant", "--nu", "4", "--candidates", "--format", "json")
    data = json.loads(out)
    assert [d["partition"] for d in data if d["dominant"]] == ["(1,1,1,1)"]


def test_json_rationals(capsys):
    code, out, _ = run(capsys, "exact-I", "--n", "4", "--nu", "2", "--format", "json")
    assert json.loads(out)[0]["exact"] == "2/3"


def test_lset_json_and_csv(capsys):
    _, out, _ = run(capsys, "lset", "--c", "1,1", "--m", "2", "--format", "json")
    assert json.loads(out) == {"m": 2, "total": 3, "tuples": [[0], [1], [2], [3]]}
    _, out, _ = run(capsys, "lset", "--c", "1,2,3", "--m", "2", "--star", "--size-only")
    assert rows(out)[0]["size"] == "7"


def test_mc_deterministic(capsys):
    args = ["mc-I", "--n", "6", "--nu", "2", "--trials", "5000", "--seed", "3"]
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args, "--threads", "4")
    assert first == second
    _, other, _ = run(capsys, *args[:-1], "4")
    assert other != first


def test_seed_from_environment(capsys, monkeypatch):
    args = ["mc-i", "--k", "2,2", "--trials", "3000"]
    monkeypatch.setenv("PERMFIX_SEED", "77")
    _, env_out, _ = run(capsys, *args)
    monkeypatch.delenv("PERMFIX_SEED")
    _, flag_out, _ = run(capsys, *args, "--seed", "77")
    assert env_out == flag_out


def test_config_file(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("PERMFIX_SEED", raising=False)
    cfg = tmp_path / "c.cfg"
    cfg.write_text("output_format = json\ntrials = 10\n")
    _, out, _ = run(capsys, "mc-i", "--k", "2,2", "--config", str(cfg))
    assert json.loads(out)[0]["trials"] == 10
    _, out, _ = run(capsys, "mc-i", "--k", "2,2", "--config", str(cfg), "--format", "csv")
    assert out.startswith("n,k,d,estimate")


@pytest.mark.parametrize(
    "argv,code,kind",
    [
        (["nope"], 2, "usage"),
        (["exact-i"], 2, "usage"),
        (["gf-bound", "--n", "8"], 2, "usage"),
        (["exact-i", "--k", "60"], 3, "cap_exceeded"),
        (["exact-i", "--k", "3,2", "--d", "2,1"], 4, "divisibility"),
        (["exact-I", "--n", "6", "--nu", "4"], 4, "domain"),
        (["exact-i", "--n", "5", "--k", "2,2"], 4, "domain"),
    ],
)
def test_errors(capsys, argv, code, kind):
    got, out, err = run(capsys, *argv)
    assert got == code
    assert out == ""
    assert json.loads(err.strip().splitlines()[-1])["error"] == kind


def test_other_subcommands(capsys):
    checks = [
        (["fdiv", "--n", "4", "--d", "2"], "p", "3/8"),
        (["gbound", "--a", "1,2,3", "--m", "2"], "g_bound", "7"),
        (["sieve-count", "--n", "4", "--k", "1", "--c", "0"], "count", "9"),
        (["kset-cycles", "--perm", "(1 2)", "--m", "4", "--k", "2"], "cycles", "4"),
        (["min-degree", "--perm", "(1 2)(3 4 5)"], "min_degree", "2"),
        (["wreath", "--m", "5", "--k", "2", "--r", "2"], "min_degree", "60"),
        (["wreath", "--m", "2", "--base", "1,2;1,2", "--top", "(1 2)"], "cycles", "3"),
        (["gf-bound", "--n", "12", "--nu", "6", "--with-exact"], "exact_I", "27398/66825"),
    ]
    for argv, column, value in checks:
        code, out, _ = run(capsys, *argv)
        assert code == 0, argv
        assert rows(out)[0][column] == value, argv


def test_gf_cm_table(capsys):
    _, out, _ = run(capsys, "gf-bound", "--cm", "3")
    assert [r["c_m"] for r in rows(out)][:3] == ["1", "1", "0.75"]


def test_local_global_and_mc_min_degree(capsys):
    code, out, _ = run(capsys, "local-global", "--n", "8..10:2", "--trials", "500")
    assert code == 0 and [r["n"] for r in rows(out)] == ["8", "10"]
    code, out, _ = run(capsys, "min-degree", "--n", "20", "--alpha", "0.5", "--trials", "500")
    assert code == 0 and 0 <= float(rows(out)[0]["estimate"]) <= 1


def test_oracle_suite(capsys):
    code, out, _ = run(capsys, "oracle-suite", "--n-max", "5")
    assert code == 0
    assert all(r["match"] == "true" for r in rows(out))


def test_help_describes_each_subcommand():
    for name, (_, text) in cli.COMMANDS.items():
        proc = subprocess.run(
            [sys.executable, "-m", "permfix.cli", name, "--help"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        assert " ".join(text.split()[:3]) in " ".join(proc.stdout.split())


def test_parse_helpers():
    assert cli.parse_int_list("2..5") == [2, 3, 4, 5]
    assert cli.parse_int_list("8..14:3,20") == [8, 11, 14, 20]
    assert cli.parse_perm("(1 3)", 4).images == (3, 2, 1, 4)
    assert cli.parse_perm("2,1,3").images == (2, 1, 3)
