import csv
import json
import math

import pytest

from diracfbg import cli


def run(tmp_path, *argv):
    return cli.main(list(argv))


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_bands_csv_and_sidecar(tmp_path):
    out = tmp_path / "bands.csv"
    assert cli.main(["bands", "--set", "grid.points=1201", "-o", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["E", "rhs", "in_band", "q"]
    assert len(rows) == 1201
    meta = json.loads((tmp_path / "bands.csv.json").read_text())
    assert meta["config"]["params"]["V0"] == pytest.approx(math.pi / 2)
    assert meta["config"]["schema_version"] == 1
    assert len(meta["bands"]) == 9
    gap_rows = [r for r in rows if r["in_band"] == "0"]
    assert all(r["q"] == "" for r in gap_rows)


def test_bands_free_particle(tmp_path):
    out = tmp_path / "b.json"
    assert cli.main(["bands", "--set", "params.V0=0", "--format", "json", "-o", str(out)]) == 0
    meta = json.loads(out.read_text())
    assert meta["bands"] == [[-6.0, pytest.approx(-1.0, abs=1e-9)], [pytest.approx(1.0, abs=1e-9), 6.0]]
    assert len(meta["columns"]["E"]) == 4001


def test_bands_config_file_and_pi_expression(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"schema_version": 1, "params": {"V0": "pi/2", "a": 2}, "grid": {"min": 0, "max": 3, "points": 11}}))
    out = tmp_path / "o.csv"
    assert cli.main(["bands", "--config", str(cfg), "-o", str(out)]) == 0
    meta = json.loads((tmp_path / "o.csv.json").read_text())
    assert meta["config"]["params"]["V0"] == pytest.approx(math.pi / 2)


def test_malformed_json_exit_2(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert cli.main(["bands", "--config", str(cfg)]) == 2
    assert "malformed JSON" in capsys.readouterr().err


@pytest.mark.parametrize(
    "sets,msg",
    [
        (["params.m0=-1"], "m0"),
        (["grid.points=1"], "grid.points"),
        (["grid.min=3", "grid.max=1"], "grid.min < grid.max"),
        (["params.a=oops"], "params.a"),
    ],
)
def test_invalid_config_names_invariant(sets, msg, capsys):
    argv = ["bands"]
    for s in sets:
        argv += ["--set", s]
    assert cli.main(argv) == 2
    assert msg in capsys.readouterr().err


def test_schema_version_checked(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"schema_version": 99}))
    assert cli.main(["units", "--config", str(cfg)]) == 2


def test_tamm_report(tmp_path):
    out = tmp_path / "t.json"
    args = ["tamm", "--set", 'scales={"n0": 1.45, "delta_n": 1e-4, "lambda_B": 1.56e-6}', "-o", str(out)]
    assert cli.main(args) == 0
    rep = json.loads(out.read_text())
    (state,) = rep["states"]
    assert state["E0"] == pytest.approx(1.474, abs=1e-3)
    lo, hi = state["gap"]
    assert lo < state["E0"] < hi
    assert state["detuning"]["unit"] == "GHz"
    assert state["detuning"]["value"] == pytest.approx(9.77, rel=1e-3)


def test_tamm_tiny_V1_empty(tmp_path):
    out = tmp_path / "t.json"
    assert cli.main(["tamm", "--set", "params.V1=0.0001", "-o", str(out)]) == 0
    assert json.loads(out.read_text())["states"] == []


def test_tamm_degenerate_exit_2(capsys):
    assert cli.main(["tamm", "--set", "params.V0=pi"]) == 2
    assert "V0 degenerate" in capsys.readouterr().err


def test_spectrum_kp(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["spectrum", "--set", "grid.points=601", "-o", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["E", "T", "T_dB", "R", "arg_t", "conservation_residual", "ok"]
    assert all(float(r["conservation_residual"]) <= 1e-8 for r in rows)
    assert all(float(r["T_dB"]) >= -300 for r in rows)
    meta = json.loads((tmp_path / "s.csv.json").read_text())
    assert meta["grating"]["n_slips"] == 25
    assert meta["grating"]["ramp_step"] == pytest.approx(10 / 4000)
    assert meta["failures"] == 0


def test_spectrum_tamm_flags_resonance(tmp_path):
    out = tmp_path / "s.csv"
    args = ["spectrum", "--set", "grating.type=tamm", "--set", "grid.min=1.40", "--set", "grid.max=1.55",
            "--set", "grid.points=3001", "-o", str(out)]
    assert cli.main(args) == 0
    meta = json.loads((tmp_path / "s.csv.json").read_text())
    near = [p for p in meta["resonances"] if abs(p["E"] - 1.474) < 0.01]
    assert len(near) == 1
    assert near[0]["prominence_dB"] > 20


def test_spectrum_tamm_surface_state_on_coarse_grid(tmp_path):
    # default [-6, 6] grid steps over the peak; the surface_states block still finds it
    out = tmp_path / "s.csv"
    assert cli.main(["spectrum", "--set", "grating.type=tamm", "-o", str(out)]) == 0
    (state,) = json.loads((tmp_path / "s.csv.json").read_text())["surface_states"]
    assert state["E0"] == pytest.approx(1.474, abs=1e-3)
    assert state["grid_E"] == pytest.approx(1.476)
    assert abs(state["peak_E"] - state["E0"]) < 1e-3
    assert state["peak_T_dB"] - state["grid_T_dB"] > 20


def test_spectrum_uncoupled_uniform(tmp_path):
    out = tmp_path / "s.json"
    args = ["spectrum", "--set", "grating.type=uniform", "--set", "grating.m0=0", "--set", "grid.points=101",
            "--format", "json", "-o", str(out)]
    assert cli.main(args) == 0
    cols = json.loads(out.read_text())["columns"]
    assert all(abs(v) < 1e-12 for v in cols["T_dB"])


def test_spectrum_failures_exit_3(tmp_path):
    out = tmp_path / "s.csv"
    args = ["spectrum", "--set", "grating.type=uniform", "--set", "grating.apodized=false", "--set", "grating.L=900",
            "--set", "grid.min=-0.5", "--set", "grid.max=0.5", "--set", "grid.points=11", "-o", str(out)]
    assert cli.main(args) == 3
    rows = read_csv(out)
    assert any(r["ok"] == "0" and r["T"] == "" for r in rows)


def test_spectrum_bad_grating_type(capsys):
    assert cli.main(["spectrum", "--set", "grating.type=chirped"]) == 2
    assert "grating.type" in capsys.readouterr().err


def test_units_report(tmp_path):
    out = tmp_path / "u.json"
    assert cli.main(["units", "--set", "energies=[1.474]", "--set", "lengths=[50, 2]", "-o", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["Z"]["unit"] == "mm" and rep["Z"]["value"] == pytest.approx(4.97, rel=1e-3)
    assert rep["T"]["unit"] == "ps" and rep["T"]["value"] == pytest.approx(24.0, rel=2e-3)
    assert rep["f_unit"]["unit"] == "GHz" and rep["f_unit"]["value"] == pytest.approx(6.63, rel=1e-3)
    assert rep["detunings"][0]["value"] == pytest.approx(9.77, rel=1e-3)
    assert rep["lengths"][0]["value"] == pytest.approx(250, rel=1e-2)


def test_units_zero_delta_n_exit_2():
    assert cli.main(["units", "--set", "scales.delta_n=0"]) == 2


def test_deterministic_output(tmp_path):
    out = tmp_path / "a.csv"
    blobs = []
    for _ in range(2):
        assert cli.main(["spectrum", "--set", "grating.type=tamm", "--set", "grid.points=301", "-o", str(out)]) == 0
        blobs.append((out.read_bytes(), (tmp_path / "a.csv.json").read_bytes()))
    assert blobs[0] == blobs[1]


def test_float_format_17_digits():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert cli.fmt(True) == "1"
    assert cli.fmt(None) == ""


def test_stdout_output(capsys):
    assert cli.main(["units"]) == 0
    assert json.loads(capsys.readouterr().out)["Z"]["unit"] == "mm"


def test_parse_value():
    assert cli.parse_value("pi/2") == pytest.approx(math.pi / 2)
    assert cli.parse_value("-2*pi") == pytest.approx(-2 * math.pi)
    assert cli.parse_value("[1, 2]") == [1, 2]
    assert cli.parse_value("kp") == "kp"
    assert cli.parse_value("true") is True
