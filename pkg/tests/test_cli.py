import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from ptcoulomb.cli import RunConfig, UsageError, dump_json, grid_values, main, run


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_example(capsys):
    code, out, _ = call(capsys, "spectrum", "--N", "2", "--d", "4")
    rep = json.loads(out)
    assert code == 0
    assert rep["E"] == {"num": "7", "den": "1"}
    assert rep["all_real"] and len(rep["real_charges"]) == 3


def test_table1_example(capsys):
    code, out, _ = call(capsys, "table1", "--format", "pretty")
    assert code == 0
    assert out.count("ok: True") == 6
    assert "status: PASS" in out


def test_perturb_example(capsys):
    code, out, _ = call(capsys, "perturb", "--N", "2", "--level", "2", "--order", "1")
    rep = json.loads(out)
    assert code == 0
    assert rep["Y_corrections"][1] == {"num": "0", "den": "1"}
    assert [v["num"] for v in rep["h_corrections"][1]] == ["0", "4", "0"]


def test_json_round_trip_is_byte_identical(capsys):
    for argv in (["spectrum", "--N", "3", "--d", "1.5"], ["secular", "--N", "2", "--c", "1/3"],
                 ["perturb", "--N", "3", "--level", "1", "--lambda", "0.05"]):
        _, out, _ = call(capsys, *argv)
        assert json.dumps(json.loads(out), indent=2, sort_keys=True) + "\n" == out


@pytest.mark.parametrize("argv", [
    ["spectrum", "--N", "2", "--c", "1", "--d", "3"],
    ["spectrum", "--N", "2", "--c", "1", "--lambda", "0.5"],
    ["spectrum", "--N", "2", "--bogus"],
    ["spectrum", "--N", "x"],
    ["spectrum"],
    ["spectrum", "--N", "1", "--format", "csv"],
    ["sweep", "--N", "1", "--param", "d", "--start", "3", "--stop", "2", "--step", "0.1"],
    ["sweep", "--N", "1", "--param", "d", "--start", "1", "--stop", "2", "--step", "0"],
    ["critical-d", "--N", "0"],
    ["perturb", "--N", "2", "--level", "5"],
    ["nonsense"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = call(capsys, *argv)
    assert code == 2
    assert out == ""
    assert "usage:" in err


def test_failed_check_exits_1(capsys):
    code, out, _ = call(capsys, "sturmian", "--N", "1", "--c", "5/2", "--f", "-5")
    assert code == 1 and json.loads(out)["is_solution"] is False
    code, out, _ = call(capsys, "sturmian", "--N", "1", "--c", "5/2", "--f", "-6")
    assert code == 0 and json.loads(out)["is_solution"] is True


def test_verify_modes(capsys):
    for argv in (["verify", "sl2"], ["verify", "lie", "--N", "2", "--c", "5/2"],
                 ["verify", "shift", "--seed", "1"], ["verify", "ode", "--N", "1", "--c", "2.5"]):
        code, out, _ = call(capsys, *argv)
        rep = json.loads(out)
        assert code == 0, argv
        assert rep["pass"] is True
        assert set(rep) == {"mode", "inputs", "pass", "metrics"}


def test_config_file_flags_win(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"N": 3, "d": "4", "format": "json"}))
    _, out, _ = call(capsys, "spectrum", "--config", str(cfg))
    assert json.loads(out)["N"] == 3
    _, out, _ = call(capsys, "spectrum", "--config", str(cfg), "--N", "1")
    rep = json.loads(out)
    assert rep["N"] == 1 and rep["d"] == {"num": "4", "den": "1"}
    cfg.write_text(json.dumps({"N": 1, "colour": "red"}))
    assert call(capsys, "spectrum", "--config", str(cfg))[0] == 2


def _csv(out):
    return list(csv.reader(io.StringIO(out)))


def test_sweep_brackets_transition(capsys):
    code, out, _ = call(capsys, "sweep", "--N", "2", "--param", "d", "--start", "1.5", "--stop", "4",
                        "--step", "0.01", "--format", "csv")
    rows = _csv(out)
    assert code == 0 and len(rows) == 252
    real = [(float(r[0]), all(r[k] == "1" for k in (7, 8, 9))) for r in rows[1:]]
    switch = [d for (d, ok), (_, prev) in zip(real[1:], real) if ok and not prev]
    assert len(switch) == 1 and 2.9865 <= switch[0] < 2.9865 + 0.01


def test_sweep_order_is_deterministic(capsys):
    argv = ["sweep", "--N", "3", "--param", "c", "--start", "1", "--stop", "4", "--step", "0.25",
            "--format", "csv"]
    _, serial, _ = call(capsys, *argv)
    _, parallel, _ = call(capsys, *argv, "--jobs", "3")
    assert serial == parallel


def test_single_point_sweep_matches_spectrum(capsys):
    _, out, _ = call(capsys, "sweep", "--N", "2", "--param", "d", "--start", "4", "--stop", "4", "--step", "1")
    row = json.loads(out)["rows"][0]
    _, out, _ = call(capsys, "spectrum", "--N", "2", "--d", "4")
    rep = json.loads(out)
    assert row[1:4] == [z["re"] for z in rep["charges"]]
    assert row[4:7] == [z["im"] for z in rep["charges"]]


def test_lambda_sweep_series_columns(capsys):
    code, out, _ = call(capsys, "sweep", "--N", "1", "--param", "lambda", "--start", "0.001", "--stop", "0.1",
                        "--step", "0.033", "--level", "0", "--order", "4", "--format", "csv")
    rows = _csv(out)
    assert rows[0][-1] == "Y_exact" and rows[0][-2] == "Y_order4"
    for r in rows[1:]:
        lam = float(r[0])
        assert float(r[-1]) == pytest.approx(-(1 - 4 * lam * lam) ** 0.5, abs=1e-12)
        assert abs(float(r[-2]) - float(r[-1])) < 10 * lam ** 6


def test_wavefunction_csv(capsys):
    code, out, _ = call(capsys, "wavefunction", "--N", "1", "--d", "2.5", "--steps", "5", "--format", "csv")
    rows = _csv(out)
    assert rows[0] == ["x", "re_psi", "im_psi", "abs2"]
    assert [float(v) for v in rows[3]] == [0.0, 5.0, 0.0, 25.0]


def test_grid_values_exact():
    assert grid_values(Fraction(0), Fraction(1), Fraction(1, 4)) == [0, Fraction(1, 4), Fraction(1, 2),
                                                                     Fraction(3, 4), 1]
    with pytest.raises(UsageError):
        grid_values(Fraction(1), Fraction(0), Fraction(1))


def test_run_api():
    code, text = run(RunConfig("spectrum", N=1, d=Fraction(3), output="pretty"))
    assert code == 0 and "all_real: True" in text
    assert dump_json({"x": Fraction(1, 3), "z": 1 + 2j}) == (
        '{\n  "x": {\n    "den": "3",\n    "num": "1"\n  },\n  "z": {\n    "im": 2.0,\n    "re": 1.0\n  }\n}\n')


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ptcoulomb", "spectrum", "--N", "1", "--d", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["all_real"] is True
