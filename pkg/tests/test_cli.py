import json
import subprocess
import sys

import pytest

from ddit.cli import main
from ddit.io import read_csv_columns


def run(argv, capsysbinary):
    code = main(argv)
    out, err = capsysbinary.readouterr()
    return code, out, err.decode()


def test_spectrum_csv_stdout(capsysbinary):
    code, out, err = run(["spectrum", "--preset", "fig2a", "--format", "csv"], capsysbinary)
    assert code == 0 and err == ""
    cols = read_csv_columns(out)
    assert cols["detuning"].size == 2001


def test_grid_override_and_out_file(tmp_path, capsysbinary):
    target = tmp_path / "s.json"
    code, out, _ = run(["spectrum", "--preset", "fig2b", "--grid", "-1", "1", "5",
                        "--format", "json", "--out", str(target)], capsysbinary)
    assert code == 0 and out == b""
    data = json.loads(target.read_text())
    assert data["grid"] == {"start": -1.0, "stop": 1.0, "count": 5}
    assert data["kind"] == "cavity"


def test_deterministic_output(capsysbinary):
    first = run(["spectrum", "--preset", "fig4d"], capsysbinary)[1]
    second = run(["spectrum", "--preset", "fig4d"], capsysbinary)[1]
    assert first == second


def test_validate_report(capsysbinary):
    code, out, _ = run(["validate", "--preset", "fig2a", "--format", "json"], capsysbinary)
    report = json.loads(out)
    assert code == 0
    assert report["closed_vs_general_max_rel"] <= 1e-10
    assert report["oracle_vs_general_absorption_sup"] < 0.05


def test_validate_skips_what_cannot_run(capsysbinary):
    code, out, _ = run(["validate", "--preset", "supp-fs-N7", "--format", "json"], capsysbinary)
    report = json.loads(out)
    assert code == 0
    assert report["closed_vs_general_max_rel"].startswith("skipped")
    assert report["oracle_vs_general_absorption_sup"].startswith("skipped")


def test_rates_scan(capsysbinary):
    code, out, _ = run(["rates", "--preset", "fig3b", "--scan-d", "0.05", "1.2", "200"],
                       capsysbinary)
    assert code == 0
    assert abs(read_csv_columns(out)["d"][0] - 0.35355) < 1e-5


@pytest.mark.parametrize("extra", [[], ["--closed"]])
def test_rates_plain(extra, capsysbinary):
    code, out, _ = run(["rates", "--preset", "fig3d"] + extra, capsysbinary)
    cols = read_csv_columns(out)
    assert code == 0 and abs(cols["rate"].sum() - 1) < 1e-12


def test_windows_and_eigen(capsysbinary):
    code, out, _ = run(["windows", "--preset", "fig4c", "--format", "json"], capsysbinary)
    assert code == 0 and len(json.loads(out)["windows"]) == 4
    code, out, _ = run(["eigen", "--preset", "fig2b"], capsysbinary)
    assert code == 0 and b"v2" in out


def test_preset_list_and_show(capsysbinary):
    code, out, _ = run(["preset", "--list"], capsysbinary)
    assert code == 0 and b"supp-cav-N15" in out
    code, out, _ = run(["preset", "fig2a"], capsysbinary)
    assert code == 0 and b"omega_p = 0.03" in out


def test_config_file(tmp_path, capsysbinary):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("preset = fig4a\nbackend = closed\nformat = json\n")
    code, out, _ = run(["spectrum", "--config", str(cfg)], capsysbinary)
    assert code == 0 and json.loads(out)["type"] == "Spectrum"


@pytest.mark.parametrize("argv", [
    ["spectrum", "--preset", "nope"],
    ["spectrum"],
    ["spectrum", "--config", "/nonexistent/file.cfg"],
    ["spectrum", "--preset", "fig2a", "--grid", "1", "0", "10"],
    ["spectrum", "--preset", "fig2a", "--backend", "magic"],
    ["bogus"],
])
def test_input_errors_exit_1(argv, capsysbinary):
    code, out, err = run(argv, capsysbinary)
    assert code == 1 and out == b""
    assert err


def test_parse_error_line_reported(tmp_path, capsysbinary):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("n = 1\nwhat = 2\n")
    code, _, err = run(["spectrum", "--config", str(cfg)], capsysbinary)
    assert code == 1 and "line 2" in err


@pytest.mark.parametrize("argv", [
    ["spectrum", "--preset", "supp-fs-N7", "--backend", "oracle"],
    ["spectrum", "--preset", "supp-fs-N7", "--backend", "closed"],
    ["windows", "--preset", "supp-fs-N15", "--grid", "-1.5", "1.5", "101"],
])
def test_solver_errors_exit_2(argv, capsysbinary):
    code, out, err = run(argv, capsysbinary)
    assert code == 2 and out == b"" and err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ddit", "preset", "--list"],
                          capture_output=True, check=False)
    assert proc.returncode == 0 and b"fig2a" in proc.stdout
