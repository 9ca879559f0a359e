import json
import math
import subprocess
import sys

import pytest

from stabsim.atoms import dataset_to_dict, dump_dataset
from stabsim.cli import build_parser, grid, run
from stabsim.table import read_csv_rows

SUBCOMMANDS = ["validate", "quasienergies", "widths", "delta-opt", "g-opt", "zero-point",
               "propagate", "scan", "window", "profile", "ratio", "smoothing", "fit-deltaopt",
               "scale-check"]


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(out):
    meta, header, rows = read_csv_rows(out)
    return meta, [dict(zip(header, r)) for r in rows]


def test_grid_syntax():
    assert grid("0.5") == [0.5]
    assert grid("0:1:3") == [0.0, 0.5, 1.0]
    assert grid("-600:100:3") == [-600.0, -250.0, 100.0]
    assert grid("1,2.5,-3") == [1.0, 2.5, -3.0]
    with pytest.raises(Exception):
        grid("0:1:0")


def test_zero_point(capsys):
    code, out, _ = call(capsys, "zero-point", "--atom", "He2")
    assert code == 0
    meta, rows = table(out)
    assert float(rows[0]["x0"]) == pytest.approx(0.156, rel=0.01)
    assert float(rows[0]["delta0"]) == pytest.approx(-13.3, rel=0.01)
    assert meta["dataset"] == "He2"
    assert len(meta["dataset_sha256"]) == 64


def test_propagate_single_channel(capsys):
    code, out, _ = call(capsys, "propagate", "--atom", "He2", "--x", "0", "--delta", "0",
                        "--theta", "0.1", "--envelope", "rect")
    assert code == 0
    meta, rows = table(out)
    assert float(rows[0]["w_res"]) == pytest.approx(0.3222, abs=1e-4)
    assert rows[0]["method"] == "analytic"
    for key in ("tolerance", "envelope", "version", "dataset_sha256", "command"):
        assert key in meta


def test_propagate_missing_delta(capsys):
    code, _, err = call(capsys, "propagate", "--atom", "He2", "--x", "0", "--theta", "0.1")
    assert code == 2
    assert "--delta" in err


def test_bad_number_names_flag(capsys):
    code, _, err = call(capsys, "propagate", "--atom", "He2", "--x", "0", "--delta", "abc",
                        "--theta", "0.1")
    assert code == 2
    assert "--delta" in err


@pytest.mark.parametrize("argv", [["bogus"], ["zero-point", "--atom", "He2", "--frobnicate"], []])
def test_usage_errors(capsys, argv):
    assert call(capsys, *argv)[0] == 2


def test_unknown_atom(capsys):
    code, _, err = call(capsys, "zero-point", "--atom", "Xe")
    assert code == 2
    assert "He2" in err


def test_validate_builtin_and_bad_file(capsys, tmp_path, he):
    code, out, _ = call(capsys, "validate", "--atom", "He2")
    assert code == 0 and "factorization" in out
    doc = dataset_to_dict(he)
    doc["alpha"]["a12"] = [38.74, 10.0]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, out, _ = call(capsys, "validate", "--atom", str(bad))
    assert code == 1 and "fail" in out
    code, _, err = call(capsys, "zero-point", "--atom", str(bad))
    assert code == 1 and "factorization" in err


def test_dataset_file_used(capsys, tmp_path, he):
    path = tmp_path / "he.json"
    path.write_text(dump_dataset(he))
    code, out, _ = call(capsys, "zero-point", "--atom", str(path))
    assert code == 0
    assert float(table(out)[1][0]["x0"]) == pytest.approx(0.15608, abs=1e-5)


def test_malformed_dataset_file(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{")
    assert call(capsys, "zero-point", "--atom", str(path))[0] == 1


def test_degenerate_dataset_exit_1(capsys, tmp_path, he):
    ds = he.replace(a2w2=complex(-479.96, 0), a12=complex(38.74, 0))
    path = tmp_path / "flat.json"
    path.write_text(dump_dataset(ds))
    code, _, err = call(capsys, "zero-point", "--atom", str(path))
    # imag parts zeroed: validation already fails on factorization
    assert code == 1


def test_delta_opt_and_g_opt(capsys):
    code, out, _ = call(capsys, "delta-opt", "--atom", "He2")
    rows = table(out)[1]
    assert float(rows[0]["slope"]) == pytest.approx(-83.57, rel=5e-3)
    code, out, _ = call(capsys, "g-opt", "--atom", "He2", "--x", "0,0.156")
    rows = table(out)[1]
    assert float(rows[0]["g_plus"]) == pytest.approx(1.605)
    assert rows[0]["asymptotic"] == "inf"
    assert float(rows[1]["g_plus"]) == pytest.approx(0.842, abs=1e-3)


def test_g_opt_three_level_dataset(capsys):
    code, _, err = call(capsys, "g-opt", "--atom", "H3", "--x", "1")
    assert code == 0  # H has Im a1(w2) = 0 as well


def test_quasienergies_grid(capsys):
    code, out, _ = call(capsys, "quasienergies", "--atom", "He2", "--x", "0:1:3",
                        "--delta", "-13.3")
    rows = table(out)[1]
    assert len(rows) == 3
    for r in rows:
        assert float(r["g_plus"]) <= float(r["g_minus"])


def test_widths_csv_to_file_with_gnuplot(capsys, tmp_path):
    out_path = tmp_path / "w.csv"
    code, out, _ = call(capsys, "widths", "--atom", "He2", "--delta", "-13.3", "--x", "0:1:101",
                        "--out", str(out_path), "--gnuplot", str(tmp_path / "w.gp"))
    assert code == 0
    meta, header, rows = read_csv_rows(out_path.read_text())
    assert meta["summary.crossings"] == "2"
    assert len(rows) == 101
    script = tmp_path / "w.gp"
    assert script.exists() and "w.csv" in script.read_text()


def test_scan_with_law(capsys):
    code, out, _ = call(capsys, "scan", "--atom", "He2", "--delta", "-100", "--x", "0.5:3:6",
                        "--theta", "0.1", "--law", "closed")
    meta, rows = table(out)
    assert {r["curve"] for r in rows} == {"delta=-100", "peak_envelope"}


def test_scan_parallel_identical(capsys):
    base = ["scan", "--atom", "He2", "--delta", "-100,-250", "--x", "0.5:3:4", "--theta", "0.1",
            "--envelope", "sin2"]
    _, one, _ = call(capsys, *base)
    _, two, _ = call(capsys, *base, "--workers", "2")
    strip = lambda text: [l for l in text.splitlines() if not l.startswith("# command")]  # noqa: E731
    assert strip(one) == strip(two)


def test_window_profile_ratio_smoothing(capsys):
    code, out, _ = call(capsys, "window", "--atom", "He2", "--x", "3", "--delta-ref", "-300",
                        "--theta-ref", "1", "--i1", "0.2:3:15")
    assert code == 0 and float(table(out)[0]["summary.window_w_i"]) < 0.3
    code, out, _ = call(capsys, "profile", "--atom", "He2", "--x", "3", "--theta", "0.12",
                        "--delta", "-600:100:71")
    assert code == 0 and table(out)[0]["summary.fano_like"] == "1"
    code, out, _ = call(capsys, "ratio", "--atom", "He2", "--x", "0,1", "--theta", "0.1")
    rows = table(out)[1]
    assert float(rows[0]["w2_over_w1"]) == 0 and rows[0]["w1_over_w2"] == "inf"
    assert float(rows[1]["w2_over_w1"]) == pytest.approx(0.18304013036439985, rel=1e-9)
    code, out, _ = call(capsys, "smoothing", "--atom", "H3", "--levels", "3", "--delta", "-530",
                        "--theta", "0.1", "--a", "100,0.1", "--x", "2:4:3")
    assert code == 0 and len(table(out)[1]) == 6


def test_fit_deltaopt_small_grid_is_usage_error(capsys):
    code, _, err = call(capsys, "fit-deltaopt", "--atom", "He2", "--theta", "0.1", "--x", "1,2")
    assert code == 2


def test_fit_deltaopt_failure_exit_1(capsys):
    code, _, err = call(capsys, "fit-deltaopt", "--atom", "He2", "--envelope", "rect",
                        "--theta", "0.001", "--x", "0.5,1,2", "--scan-points", "9")
    assert code == 1 and "no interior maximum" in err


def test_scale_check(capsys):
    code, out, _ = call(capsys, "scale-check", "--atom", "He2", "--delta-abs", "-2", "--eps1-sq",
                        "0.02", "--eps2-sq", "0.04", "--tau", "5", "--lambda", "10",
                        "--envelope", "sin2")
    meta, rows = table(out)
    assert code == 0
    assert float(meta["summary.w_res_difference"]) < 2e-10
    assert rows[0]["x"] == rows[1]["x"] and rows[0]["theta"] == rows[1]["theta"]


def test_analytic_method_requires_rect(capsys):
    code, _, _ = call(capsys, "propagate", "--atom", "He2", "--x", "1", "--delta", "0",
                      "--theta", "0.1", "--envelope", "sin2", "--method", "analytic")
    assert code == 2


@pytest.mark.parametrize("name", SUBCOMMANDS)
def test_help_lists_flags(name, capsys):
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args([name, "--help"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    assert "--atom" in out
    if "--x" in out:
        assert "dimensionless" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stabsim.cli", "zero-point", "--atom", "H2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    rows = table(proc.stdout)[1]
    assert float(rows[0]["x0"]) == pytest.approx(0.272, rel=0.01)
    assert math.isfinite(float(rows[0]["delta0"]))
