import io
import json
import shutil
import subprocess
import sys
from importlib import resources

import pytest

from formlab.catalog import builtin_model
from formlab.cli import main
from formlab.modelfile import model_to_dict


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


# cohomology tables -------------------------------------------------------------


def test_cohom_csv_on_central_fiber():
    code, text = run("cohom", "nakamura_hp", "--theory", "bc", "--format", "csv")
    assert code == 0
    rows = text.strip().splitlines()[1:]
    assert len(rows) == 16
    nonzero = {(r.split(",")[1], r.split(",")[2]): int(r.split(",")[3]) for r in rows if r.split(",")[3] != "0"}
    assert len(nonzero) == 16
    assert nonzero[("1", "1")] == 7


def test_cohom_deformed_fiber():
    code, text = run("cohom", "nakamura_family", "--param", "t=1/2", "--theory", "bc", "--format", "json")
    assert code == 0
    dims = json.loads(text)["dims"]
    assert dims["1,1"] == 3 and dims["2,2"] == 3 and dims["2,0"] == 1


def test_cohom_orbifold_dolbeault():
    code, text = run("cohom", "iwasawa_orbifold", "--theory", "dolbeault", "--format", "json")
    dims = json.loads(text)["dims"]
    assert {k: v for k, v in dims.items() if v} == {"0,0": 1, "1,1": 4, "3,0": 1, "0,3": 1, "2,2": 4, "3,3": 1}


def test_cohom_expected_diff(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"0,0": 1, "1,1": 4, "3,0": 1, "0,3": 1, "2,2": 4, "3,3": 1}))
    assert run("cohom", "iwasawa_orbifold", "--theory", "dolbeault", "--expected", str(good))[0] == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"cells": {"0,0": 1, "1,1": 5}}))
    code, text = run("cohom", "iwasawa_orbifold", "--theory", "dolbeault", "--expected", str(bad))
    assert code == 1
    assert "MISMATCH" in text


def test_output_is_byte_deterministic():
    args = ("cohom", "nakamura_family", "--param", "t=i/3", "--theory", "aeppli", "--format", "json")
    assert run(*args) == run(*args)


@pytest.mark.parametrize(
    "argv",
    [
        ("cohom", "nowhere", "--theory", "bc"),
        ("cohom", "nakamura_family", "--theory", "bc"),
        ("cohom", "nakamura_family", "--param", "t=2", "--theory", "bc"),
        ("cohom", "nakamura_family", "--param", "t=1/0", "--theory", "bc"),
        ("cohom", "nakamura_family", "--param", "t", "--theory", "bc"),
        ("cohom", "iwasawa", "--theory", "etale"),
        ("cohom", "/does/not/exist.json", "--theory", "bc"),
        ("frobnicate",),
    ],
)
def test_input_errors_exit_2(argv):
    assert run(*argv)[0] == 2


# model files ---------------------------------------------------------------------


def test_model_show_and_validate(tmp_path):
    code, text = run("model", "show", "iwasawa_orbifold", "--format", "json")
    assert code == 0 and json.loads(text)["invariant_under"] == "sigma"
    path = tmp_path / "orb.json"
    path.write_text(text)
    assert run("model", "validate", str(path)) == (0, "iwasawa_orbifold: valid\n")
    code, text = run("model", "show", "nakamura_hp")
    assert "d e2 = -e1^e2" in text


def test_invalid_model_file_exits_3(tmp_path):
    doc = model_to_dict(builtin_model("iwasawa"))
    doc["d_eta"][2] = [{"coeff": "1", "holo": [], "anti": [1, 2]}]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert run("model", "validate", str(path))[0] == 3
    assert run("cohom", str(path), "--theory", "bc")[0] == 3


def test_malformed_model_file_exits_2(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"name": "x"}')
    assert run("model", "validate", str(path))[0] == 2


# verdict commands ------------------------------------------------------------------


def test_ddbar_and_formality():
    code, text = run("ddbar", "nakamura_hp", "--format", "json")
    assert code == 0 and json.loads(text)["verdict"] is False
    code, text = run("formality", "nakamura_hp", "--flavor", "bc", "--format", "json")
    doc = json.loads(text)
    assert doc["verdict"] is False
    assert doc["witness"][:2] == ["e1^e2", "x(-1,1)*e3^E1"]
    assert json.loads(run("formality", "nakamura_family", "--param", "t=1/2", "--flavor", "bc", "--format", "json")[1])["verdict"]


@pytest.mark.parametrize(
    "argv",
    [
        ("abc", "iwasawa_orbifold", "--a", "e1^E1", "--b", "e2^E2", "--c", "e2^E2"),
        ("abc", "nakamura_hp", "--a", "e1^e2", "--b", "x(-1,1)*e3^E1", "--c", "E1^E2"),
        ("dolbeault", "solv_family", "--param", "t1=1", "--param", "t2=0", "--a", "e3", "--b", "e3", "--c", "E3"),
    ],
)
def test_massey_examples(argv):
    code, text = run("massey", *argv, "--format", "json")
    assert code == 0
    assert json.loads(text)["verdict"] == "nonVanishing"


def test_massey_errors():
    assert run("massey", "abc", "nakamura_hp", "--a", "e1^^e2", "--b", "e1", "--c", "e1")[0] == 2
    assert run("massey", "dolbeault", "iwasawa", "--a", "e1", "--b", "e2", "--c", "e1")[0] == 3
    assert run("massey", "abc", "iwasawa", "--a", "e3", "--b", "e1", "--c", "e2")[0] == 3
    assert run("massey", "abc", "nakamura_hp", "--a", "x(3,-3)*e1", "--b", "e1", "--c", "e1")[0] == 2


def test_lattice_commands(tmp_path):
    code, text = run("fixed-points", "iwasawa", "--action", "sigma", "--format", "json")
    doc = json.loads(text)
    assert code == 0 and doc["count"] == 16 and ["0", "0", "1/2+1/2i"] in doc["points"]
    doc = json.loads(run("fixed-points", "iwasawa", "--action", "psi", "--format", "json")[1])
    assert doc["kind"] == "curves" and doc["count"] == 8
    assert run("fixed-points", "iwasawa", "--action", "tau")[0] == 2
    out = tmp_path / "inv.json"
    code, text = run("invariant", "iwasawa", "--action", "sigma", "--out", str(out))
    assert code == 0 and text.startswith("16 monomials")
    assert run("cohom", str(out), "--theory", "derham", "--format", "json")[0] == 0


# sweeps -----------------------------------------------------------------------------


def test_sweep_across_family():
    code, text = run("sweep", "nakamura_family", "--param", "t=0,1/2,i/3,3/5", "--checks", "ddbar,bc-formality,abc-massey", "--format", "json")
    assert code == 0
    rows = json.loads(text)["rows"]
    assert [r["value"] for r in rows] == ["0", "1/2", "i/3", "3/5"]
    assert (rows[0]["ddbar"], rows[0]["bc-formality"], rows[0]["abc-massey"]) == ("FALSE", "FALSE", "nonVanishing")
    for r in rows[1:]:
        assert r["ddbar"] == r["bc-formality"] == "TRUE"
        assert r["abc-massey"] in ("vanishes", "undefined")


def test_sweep_edge_cases():
    code, text = run("sweep", "nakamura_family", "--param", "t=", "--checks", "ddbar", "--format", "json")
    assert code == 0 and json.loads(text)["rows"] == []
    assert run("sweep", "nakamura_family", "--param", "t=0,2")[0] == 2
    assert run("sweep", "nakamura_family", "--param", "t=0", "--checks", "vibes")[0] == 2
    assert run("sweep", "iwasawa", "--param", "t=0")[0] == 2
    code, text = run("sweep", "solv_family", "--param", "t2=0,1/2", "--fix", "t1=1", "--checks", "ddbar", "--format", "csv")
    assert code == 0 and text.splitlines()[0] == "t2,ddbar"


# verify ---------------------------------------------------------------------------------


def test_verify_only_orbifold():
    code, text = run("verify", "--only", "orbifold")
    assert code == 0
    assert [line.split(":")[0] for line in text.splitlines() if line.startswith("[")] == [
        "[PASS] criterion 1",
        "[PASS] criterion 2",
        "[PASS] criterion 8",
    ]
    assert run("verify", "--only", "nothing-here")[0] == 2


def test_verify_corrupted_data_names_the_cell(tmp_path):
    src = resources.files("formlab") / "data" / "expected.json"
    data = json.loads(src.read_text())
    data["orbifold"]["dolbeault"]["1,1"] = 5
    (tmp_path / "expected.json").write_text(json.dumps(data))
    code, text = run("verify", "--only", "1", "--data-dir", str(tmp_path))
    assert code == 1
    assert "[FAIL] criterion 1" in text and "(1,1)" in text


def test_verify_missing_data_dir(tmp_path):
    assert run("verify", "--only", "1", "--data-dir", str(tmp_path / "nope"))[0] == 2


def test_threads_variable(monkeypatch):
    monkeypatch.setenv("FORMLAB_THREADS", "4")
    assert run("model", "show", "iwasawa")[0] == 0
    monkeypatch.setenv("FORMLAB_THREADS", "zero")
    assert run("model", "show", "iwasawa")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "formlab", "model", "validate", "iwasawa"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "iwasawa: valid\n"
    if shutil.which("formlab"):
        proc = subprocess.run(["formlab", "--help"], capture_output=True, text=True)
        assert proc.returncode == 0 and "sweep" in proc.stdout
