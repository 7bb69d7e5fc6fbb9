from __future__ import annotations

import json
import math
import subprocess
from pathlib import Path

import jsonschema
import pytest

from spectra_lab.cli import canonical_json, main

DOCS = Path(__file__).resolve().parents[1] / "docs"
EX = DOCS / "examples"
REPORT_SCHEMA = json.loads((DOCS / "run_report.schema.json").read_text())
MAP_SCHEMA = json.loads((DOCS / "map_document.schema.json").read_text())


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    report = json.loads(out) if out.strip() else None
    if report is not None:
        jsonschema.validate(report, REPORT_SCHEMA)
        assert out.strip() == canonical_json(report)
    return code, report, err


def test_example_maps_match_schema():
    for path in EX.glob("*.json"):
        jsonschema.validate(json.loads(path.read_text()), MAP_SCHEMA)


def test_spectrum(capsys):
    code, rep, _ = run_cli(capsys, "spectrum", "--map", EX / "z2_plus_1.json", "--period", 1)
    assert code == 0
    assert [c["minpoly"] for c in rep["result"]["classes"]] == [["0", "1"], ["4", "-2", "1"]]
    assert [c["norm"] for c in rep["result"]["classes"]] == ["0", "4"]
    L = rep["result"]["lengths"]["L"]
    assert L[0] == 0 and L[1:] == pytest.approx([2.0, 2.0], rel=1e-15)
    code, rep, _ = run_cli(capsys, "spectrum", "--map", EX / "z2.json", "--period", 3)
    assert rep["result"]["lengths"]["L"].count(8.0) == 7
    code, rep, err = run_cli(capsys, "spectrum", "--map", EX / "z2.json", "--period", 0)
    assert code == 2 and rep is None and "period" in json.loads(err)["error"]


def test_rank(capsys):
    assert run_cli(capsys, "rank", "--map", EX / "z2_plus_1.json", "--max-period", 3)[1]["result"]["dims"] == [1, 1, 2]
    assert run_cli(capsys, "rank", "--map", EX / "z2.json", "--max-period", 6)[1]["result"]["dims"] == [1] * 6
    dims = run_cli(capsys, "rank", "--map", EX / "z2_minus_1.json", "--max-period", 4)[1]["result"]["dims"]
    assert max(dims) <= 1


def test_sieve(capsys):
    code, rep, _ = run_cli(capsys, "sieve", "--map", EX / "z2_plus_1.json", "--prime-min", 2, "--prime-max", 100)
    assert code == 0
    assert {"p": 5, "cycle_len": 3} in [{"p": h["p"], "cycle_len": h["cycle_len"]} for h in rep["result"]["hits"]]
    code, par, _ = run_cli(capsys, "sieve", "--map", EX / "z2_plus_1.json", "--prime-min", 2,
                           "--prime-max", 100, "--jobs", 2)
    assert par["result"] == rep["result"]
    code, rep, err = run_cli(capsys, "sieve", "--map", EX / "z2.json", "--prime-min", 2, "--prime-max", 50)
    assert code == 2 and "no non-preperiodic critical point" in err
    code, _, _ = run_cli(capsys, "sieve", "--map", EX / "z2_plus_1.json", "--prime-min", 60, "--prime-max", 50)
    assert code == 2


def test_certify(capsys):
    code, rep, _ = run_cli(capsys, "certify", "--map", EX / "z2_plus_1.json", "--target-dim", 2,
                           "--prime-max", 100, "--max-period", 4)
    assert code == 0 and rep["result"]["verified"] and rep["result"]["primes"] == [2, 5]
    assert all(isinstance(x, str) for row in rep["result"]["phi_matrix"] for x in row)
    code, rep, err = run_cli(capsys, "certify", "--map", EX / "z2.json", "--target-dim", 2)
    assert code == 3 and rep["result"]["achieved_dim"] == 1 and "budget exceeded" in rep["error"]
    code, rep, _ = run_cli(capsys, "certify", "--map", EX / "z2_minus_1.json", "--target-dim", 1)
    assert code == 0 and rep["result"]["achieved_dim"] == 1


def test_lyapunov_pcf_equidist(capsys):
    code, rep, _ = run_cli(capsys, "lyapunov", "--map", EX / "z2.json", "--samples", 20000, "--seed", 1)
    assert code == 0 and abs(rep["result"]["value"] - math.log(2)) < 0.01
    code, rep, _ = run_cli(capsys, "pcf", "--map", EX / "z2_minus_1.json")
    assert rep["result"]["verdict"] == "PCF"
    assert max(c["steps"] for c in rep["result"]["evidence"]["certificate"]) == 2
    code, rep, _ = run_cli(capsys, "equidist", "--map", EX / "z2_minus_tenth.json", "--period", 8,
                           "--fn", "coord1", "--samples", 20000, "--seed", 1)
    assert code == 0 and rep["result"]["gap"] <= 0.05 and rep["result"]["fix_count"] == 257
    code, _, _ = run_cli(capsys, "equidist", "--map", EX / "z2.json", "--period", 2, "--fn", "bogus",
                         "--samples", 10, "--seed", 1)
    assert code == 2


def test_seed_is_mandatory(capsys):
    code = main(["lyapunov", "--map", str(EX / "z2.json"), "--samples", "10"])
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["rank", "--map", EX / "z2_plus_1.json", "--max-period", 3],
    ["lyapunov", "--map", EX / "lattes.json", "--samples", 3000, "--seed", 5],
    ["sieve", "--map", EX / "wandering_quadratic.json", "--prime-min", 2, "--prime-max", 60],
])
def test_report_reproducible_from_params_and_map(capsys, tmp_path, argv):
    _, rep, _ = run_cli(capsys, *argv)
    doc = tmp_path / "map.json"
    doc.write_text(json.dumps(rep["map"]))
    again = [rep["command"], "--map", doc]
    for k, v in rep["params"].items():
        flag = "--" + k.replace("_", "-")
        if isinstance(v, bool):
            if v:
                again.append(flag)
        elif v is not None:
            again += [flag, v]
    _, rep2, _ = run_cli(capsys, *again)
    assert rep2["result"] == rep["result"] and rep2["params"] == rep["params"]


def test_invalid_inputs_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"num": ["1", "1"], "den": ["1"]}')  # degree 1
    assert run_cli(capsys, "rank", "--map", bad, "--max-period", 2)[0] == 2
    bad.write_text("not json")
    assert run_cli(capsys, "rank", "--map", bad, "--max-period", 2)[0] == 2
    bad.write_text('{"num": ["1/0"], "den": ["1"]}')
    assert run_cli(capsys, "rank", "--map", bad, "--max-period", 2)[0] == 2
    bad.write_text('{"num": [1.5, 0, 1], "den": ["1"]}')
    assert run_cli(capsys, "rank", "--map", bad, "--max-period", 2)[0] == 2
    bad.write_text('{"num": ["1"], "den": ["1"], "extra": 1}')
    assert run_cli(capsys, "rank", "--map", bad, "--max-period", 2)[0] == 2
    assert run_cli(capsys, "rank", "--map", tmp_path / "missing.json", "--max-period", 2)[0] == 2
    assert main(["rank", "--max-period", "2"]) == 2
    assert main(["frobnicate"]) == 2


def test_budget_exit_3(capsys, monkeypatch):
    monkeypatch.setenv("SPECLAB_BUDGET_MB", "0.00001")
    code, rep, err = run_cli(capsys, "rank", "--map", EX / "z2_plus_1.json", "--max-period", 6)
    assert code == 3 and rep is None and json.loads(err)["exit_code"] == 3


def test_internal_error_exit_4(capsys, monkeypatch):
    import spectra_lab.cli as cli

    def boom(f, args):
        raise RuntimeError("synthetic")

    monkeypatch.setitem(cli.COMMANDS, "rank", boom)
    code = main(["rank", "--map", str(EX / "z2.json"), "--max-period", "1"])
    assert code == 4 and "internal error" in capsys.readouterr().err


def test_output_file_and_stdin(tmp_path):
    out = tmp_path / "r.json"
    doc = (EX / "z2_plus_1.json").read_text()
    res = subprocess.run(["spectra-lab", "rank", "--map", "-", "--max-period", "2", "-o", str(out)],
                         input=doc, capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == ""
    assert json.loads(out.read_text())["result"]["dims"] == [1, 1]


def test_canonical_json_rejects_nan():
    with pytest.raises(ValueError):
        canonical_json({"x": float("nan")})
    assert canonical_json({"b": 1, "a": [0.1, "1/3"]}) == '{"a":[0.1,"1/3"],"b":1}'
