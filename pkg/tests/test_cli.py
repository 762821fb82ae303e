import csv
import io
import json

import pytest

from ccmodel import cli
from ccmodel.model_core import critical_coupling


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def data(out):
    return json.loads(out)["data"]


def test_critical(capsys):
    code, out, _ = run(["critical", "--format", "json"], capsys)
    assert code == 0
    assert data(out)[0]["G_cr"] == critical_coupling()


def test_outputs_carry_scheme(capsys):
    code, out, _ = run(["masses", "--M", "1", "--G", "3", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["metadata"]["scheme"] is None or "bare" in doc["metadata"]["scheme"]
    row = doc["data"][0]
    assert row["scheme_G"] == pytest.approx(3.0)
    assert "scheme_bare_lam" in row


def test_csv_round_trip(capsys):
    code, out, _ = run(["spectrum", "--G", "2", "--grid", "0:1:3", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 9
    assert {r["branch"] for r in rows} == {"A", "Atilde", "B"}
    assert all(float(r["scheme_G"]) == 2.0 for r in rows)


def test_emit_csv_keeps_full_precision_and_empty_header():
    text = cli.emit([{"x": 0.1 + 0.2, "flag": True, "nested": {"b": 1}}], "csv")
    row = next(csv.DictReader(io.StringIO(text)))
    assert float(row["x"]) == 0.1 + 0.2
    assert row["flag"] == "true"
    assert json.loads(row["nested"]) == {"b": 1}
    assert cli.emit([], "csv") == "\n"


def test_bound_no_solution_exit_code(capsys):
    code, out, _ = run(["bound", "--G", "5", "--channel", "isovector", "--format", "json"], capsys)
    assert code == 0
    assert data(out)[0]["exists"] is False
    code, _, err = run(["bound", "--G", "1.0", "--require-solution", "--format", "json"], capsys)
    assert code == 3
    assert "no isoscalar bound state" in err


def test_bound_wavefunction_samples(capsys):
    code, out, _ = run(["bound", "--G", "3", "--wavefunction-samples", "4", "--format", "json"], capsys)
    assert code == 0
    wf = data(out)[0]["wavefunction"]
    assert len(wf["k"]) == 4 and wf["self_consistency"] < 1e-8


@pytest.mark.parametrize("argv", [
    ["bound"],
    ["spectrum", "--grid", "1:2"],
    ["spectrum", "--G", "2", "--m", "1", "--lambda", "1"],
    ["oracle", "--modes", "4"],
    ["nope"],
])
def test_usage_errors(argv, capsys):
    code, _, _ = run(argv, capsys)
    assert code == 2


def test_bare_parameter_path(capsys):
    code, out, _ = run(["vacuum", "--m", "1.5", "--lambda", "2", "--format", "json"], capsys)
    assert code == 0
    row = data(out)[0]
    assert row["energy_density"] == pytest.approx(row["energy_density_physical_form"], rel=1e-9)


def test_config_file_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"G": 3.0, "M": 2.0}))
    _, out, _ = run(["vacuum", "--config", str(cfg), "--format", "json"], capsys)
    assert data(out)[0]["G"] == pytest.approx(3.0)
    _, out, _ = run(["vacuum", "--config", str(cfg), "--G", "5", "--format", "json"], capsys)
    row = data(out)[0]
    assert row["G"] == pytest.approx(5.0)
    assert row["scheme_M"] == pytest.approx(2.0)


def test_grid_is_deterministic_across_jobs(capsys):
    argv = ["bound", "--grid", "1.5:10:6", "--format", "csv"]
    _, serial, _ = run(argv + ["--jobs", "1"], capsys)
    _, parallel, _ = run(argv + ["--jobs", "3"], capsys)
    assert serial == parallel


def test_cache_replays_records(tmp_path, capsys):
    cache = tmp_path / "cache.jsonl"
    argv = ["masses", "--G", "4", "--format", "csv", "--cache", str(cache)]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert first == second
    assert len(cache.read_text().splitlines()) == 1


def test_out_file(tmp_path, capsys):
    out = tmp_path / "t.json"
    code, stdout, _ = run(["table1", "--format", "json", "--out", str(out)], capsys)
    assert code == 0 and stdout == ""
    rows = json.loads(out.read_text())["data"]
    assert any(r["G"] == 5.0 for r in rows)


def test_series_reports_reference_beside_fit(capsys):
    _, out, _ = run(["series", "--format", "json"], capsys)
    rows = data(out)
    first = [r for r in rows if r["order"] == 1]
    assert {r["series"]: r["reference"] for r in first} == {"coupling": 9.0, "cutoff": 3.0}


def test_oracle_command(capsys):
    code, out, _ = run(["oracle", "--modes", "1", "--format", "json"], capsys)
    assert code == 0
    assert data(out)[0]["passed"] is True


def test_verify_all_subset(capsys):
    code, _, err = run(["verify-all", "--criteria", "3,5", "--format", "json"], capsys)
    assert code == 0
    assert "[PASS] criterion 3" in err and "[PASS] criterion 5" in err
    code, out, err = run(["verify-all", "--criteria", "2", "--format", "json"], capsys)
    assert code == 4
    assert "[FAIL] criterion 2" in err
    code, _, _ = run(["verify-all", "--criteria", "12", "--format", "json"], capsys)
    assert code == 2
