from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from ktheory.cli import main

from cli_cases import CASES, EXIT, GOLDEN, render

REGEN = os.environ.get("KTHEORY_REGEN_GOLDEN") == "1"

# required payload keys per subcommand (the documented JSON schemas)
SCHEMAS = {
    "groth": {"backend", "group", "pretty", "canonical_map"},
    "k0": set(),
    "k1": set(),
    "clutch": {"p", "n", "f", "grid", "partition", "residual", "trace_dev"},
    "winding": {"loop", "samples", "winding"},
    "rho": {"t", "rho", "odd_part", "beta", "gamma", "delta"},
    "loopchain": set(),
    "pigl": {"p", "group", "pretty"},
    "kfq": {"q", "group", "pretty"},
    "k2-symbols": {"q", "generator", "m", "group", "pretty"},
    "kcoeff": set(),
    "bernoulli": {"k", "value", "c", "d"},
    "kz-table": {"n", "group", "pretty", "source", "formula"},
    "k2q": {"bound", "group", "pretty", "factors"},
    "pseudoisotopy": {"i", "value", "cross_check", "agrees"},
    "replay": {"verified", "ops", "ring"},
}


def run(argv, capsys):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, capsys):
    text = render(*run(CASES[name], capsys))
    path = GOLDEN / f"{name}.out"
    if REGEN:
        GOLDEN.mkdir(exist_ok=True)
        path.write_text(text, encoding="utf-8")
    assert text == path.read_text(encoding="utf-8")
    assert text.startswith(f"$ exit {EXIT.get(name, 0)}\n")
    # a second run in the same process is byte-identical
    assert render(*run(CASES[name], capsys)) == text


@pytest.mark.parametrize("name", sorted(n for n, a in CASES.items() if "--json" in a))
def test_json_documents(name, capsys):
    code, out, _ = run(CASES[name], capsys)
    doc = json.loads(out)
    assert set(doc) >= {"status", "command", "payload", "citations"}
    assert {"ok": 0, "input-error": 2, "verification-error": 3}[doc["status"]] == code
    if doc["status"] != "ok":
        assert "diagnostic" in doc and doc["diagnostic"] is not None
        return
    payload = doc["payload"]
    rows = payload if isinstance(payload, list) else [payload]
    for row in rows:
        assert SCHEMAS[doc["command"]] <= set(row)
    assert json.loads(json.dumps(doc, ensure_ascii=False)) == doc


def test_documented_examples(capsys):
    _, out, _ = run(["kz-table", "--from", "23", "--to", "23"], capsys)
    assert out.splitlines()[1].split() == ["23", "|", "Z/65520", "|", "conjecture-formula", "|", "r=7,k=6"]
    assert run(["rho", "7"], capsys)[1] == "0\n"
    code, out, _ = run(["--json", "clutch", "--p", "2", "--n", "1", "--f", "z^k", "--k", "0", "--grid", "32"], capsys)
    payload = json.loads(out)["payload"]
    assert code == 0 and payload["chern_int"] == 0 and payload["residual"] < 1e-9


@pytest.mark.parametrize("workers", [2, 3, 4, 8])
def test_workers_do_not_change_output(workers, capsys):
    base = ["clutch", "--n", "2", "--f", "diag", "--powers", "1,-2", "--json"]
    one = run(base + ["--workers", "1"], capsys)[1]
    many = run(base + ["--workers", str(workers)], capsys)[1]
    assert one == many


def test_flag_position(capsys):
    assert run(["--json", "rho", "7"], capsys)[1] == run(["rho", "7", "--json"], capsys)[1]


@pytest.mark.parametrize(
    "argv",
    [["bogus"], [], ["rho"], ["rho", "x"], ["clutch", "--p", "3"], ["kfq"], ["k1", "--circle", "spin"]],
)
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    assert "usage:" in capsys.readouterr().err


def test_replay(tmp_path, capsys):
    _, out, _ = run(["--json", "k1", "--field", "Q", "--matrix", "[[1,2,3],[0,1,4],[5,6,0]]"], capsys)
    doc = tmp_path / "cert.json"
    doc.write_text(out)
    code, text, _ = run(["replay", str(doc)], capsys)
    assert code == 0 and text.startswith("certificate verified")
    bare = tmp_path / "bare.json"
    cert = json.loads(out)["payload"]["certificate"]
    bare.write_text(json.dumps(cert))
    assert run(["replay", str(bare)], capsys)[0] == 0
    cert["ops"][-1]["lambda"] = "99"
    bare.write_text(json.dumps(cert))
    code, _, err = run(["replay", str(bare)], capsys)
    assert code == 3 and "verification-error" in err
    assert run(["replay", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_file_and_stdin_inputs(tmp_path, capsys, monkeypatch):
    import io

    m = tmp_path / "m.txt"
    m.write_text("generators: a b; relations: 6a = 0")
    assert run(["groth", "--monoid", f"@{m}"], capsys)[1].startswith("S(M) = Z ⊕ Z/6")
    monkeypatch.setattr(sys, "stdin", io.StringIO("[[0,1],[1,0]]"))
    assert "class: -1" in run(["k1", "--field", "Q", "--matrix", "-"], capsys)[1]
    csv = tmp_path / "f.csv"
    rows = ["theta,re00,im00"] + [f"{t},{c},{s}" for t, c, s in _circle(32)]
    csv.write_text("\n".join(rows))
    code, out, _ = run(["--json", "clutch", "--f", "table", "--table", f"@{csv}"], capsys)
    assert code == 0 and json.loads(out)["payload"]["chern_int"] == -1
    assert run(["winding", "--csv", f"@{csv}"], capsys)[1] == "1\n"


def _circle(n):
    import math

    for i in range(n):
        t = 2 * math.pi * i / n
        yield t, math.cos(t), math.sin(t)


def test_console_script_is_byte_identical():
    argv = ["ktheory", "kz-table", "--from", "20", "--to", "31"]
    runs = [subprocess.run(argv, capture_output=True, check=True).stdout for _ in range(2)]
    assert runs[0] == runs[1]
    mod = subprocess.run([sys.executable, "-m", "ktheory.cli", *argv[1:]], capture_output=True, check=True).stdout
    assert mod == runs[0]
    assert b"Z/65520" in runs[0]


def test_subprocess_exit_codes():
    assert subprocess.run(["ktheory", "bogus"], capture_output=True).returncode == 2
    assert subprocess.run(["ktheory", "k0", "--matrix", "[[2]]"], capture_output=True).returncode == 3
    assert subprocess.run(["ktheory", "kfq", "--q", "6", "--index", "1"], capture_output=True).returncode == 2
