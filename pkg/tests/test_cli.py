import csv
import io
import json

import pytest

from macjsc.cli import main
from macjsc.instances import lossless_adder_system


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def test_info(capsys):
    code, out = run(["info"], capsys)
    assert code == 0
    d = json.loads(out.out)
    assert "cover80" in d["presets"]


def test_region_exit_codes(capsys, tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps(lossless_adder_system(("Z1", "Z2", "V")).to_dict()))
    code, out = run(["region", "--spec", str(spec)], capsys)
    assert code == 0
    assert json.loads(out.out)["verdict"] == "feasible"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"preset": "cover80"}))
    assert run(["region", "--spec", str(bad)], capsys)[0] == 2


def test_region_orthogonal_error(capsys):
    code, out = run(["region", "--preset", "cover80", "--orthogonal"], capsys)
    assert code == 1
    assert "orthogonal" in out.err


def test_usage_error_exits_64(capsys):
    with pytest.raises(SystemExit) as e:
        main(["region", "--format", "xml"])
    assert e.value.code == 64
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 64


def test_missing_file_is_runtime_error(capsys, tmp_path):
    code, out = run(["region", "--spec", str(tmp_path / "nope.json")], capsys)
    assert code == 1


def test_multi_csv(capsys):
    code, out = run(["multi", "--preset", "full-side-info", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.out)))
    assert [r["label"] for r in rows] == ["A={1}", "A={2}", "A={1,2}"]
    # text and csv use 6 significant digits
    assert rows[2]["lhs"] == "1.41186"


def test_gmac_sweep_csv(capsys):
    code, out = run(["gmac", "--sweep", "0", "0.5", "3", "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out.out)))
    assert len(rows) == 3 and float(rows[0]["Isum"]) == pytest.approx(1.5)


def test_gmac_full_precision_json(capsys):
    code, out = run(["gmac", "--rho", "0.3"], capsys)
    d = json.loads(out.out)
    assert d["I1"] == pytest.approx(0.5 * __import__("math").log2(1 + 3 * 0.91), abs=1e-15)


def test_fit_then_mc(capsys, tmp_path):
    fit = tmp_path / "fit.json"
    code, _ = run(["fit", "--starts", "1", "--maxfev", "500", "--out", str(fit)], capsys)
    assert code == 0
    d = json.loads(fit.read_text())
    assert "source" in d and "spec" in d
    code, out = run(["mc", "--spec", str(fit), "--target", "I1c", "--n", "5000"], capsys)
    assert code == 0
    est = json.loads(out.out)["estimates"]["I1c"]
    assert est["n"] == 5000 and est["value"] > 0


def test_mc_gaussian_text(capsys):
    code, out = run(["mc", "--gaussian", "0.3", "--n", "5000", "--format", "text"], capsys)
    assert code == 0 and "I(X1;Y|X2)" in out.out


def test_sim_csv(capsys):
    code, out = run(["sim", "--preset", "independent", "--trials", "20", "--n", "4", "6", "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out.out)))
    assert [r["n"] for r in rows] == ["4", "6"]


def test_byte_identical_json(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        main(["sim", "--preset", "random-input", "--trials", "30", "--n", "4", "--seed", "3", "--out", str(p)])
    assert a.read_bytes() == b.read_bytes()


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("MACJSC_THREADS", "1")
    code, out = run(["info"], capsys)
    assert json.loads(out.out)["threads"] == 1


@pytest.mark.slow
def test_reproduce_quick_touches_every_module(capsys, tmp_path):
    out = tmp_path / "report.json"
    main(["paper", "--quick", "--format", "json", "--out", str(out)])
    d = json.loads(out.read_text())
    prefixes = {c["id"].split(".")[0] for c in d["claims"]}
    assert {"entropy", "ladder", "rd", "corr-bound", "gmac", "multi", "fit", "mc", "sim"} <= prefixes
    assert len({c["id"] for c in d["claims"]}) == len(d["claims"])
    assert {c["provenance"] for c in d["claims"]} == {"exact", "closed-form", "optimizer", "monte-carlo", "simulation"}
