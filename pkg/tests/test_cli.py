import json
import subprocess
import sys

import numpy as np
import pytest

from outer_billiard.cli import main


@pytest.fixture
def spec_files(tmp_path):
    paths = {}
    for name, data in {
        "circle": {"kind": "circle", "radius": 1.0},
        "ellipse": {"kind": "ellipse", "a": 2.0, "b": 1.0},
        "bad": {"kind": "ellipse", "a": 1.0, "b": 2.0},
        "nonconvex": {"kind": "fourier_support", "coeffs": [[0, 1, 0], [3, 0.3, 0]]},
    }.items():
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(data))
        paths[name] = str(path)
    return paths


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def fields(out):
    return dict(line.split(": ", 1) for line in out.strip().splitlines())


def test_curve_info_circle(spec_files, capsys):
    code, out, _ = run(["curve-info", "--spec", spec_files["circle"]], capsys)
    assert code == 0
    info = fields(out)
    assert info["length"] == "6.2831853071795862"
    assert info["lazutkin_L"] == "6.2831853071795862"
    assert float(info["defect"]) == pytest.approx(0.0, abs=1e-12)


def test_curve_info_ellipse(spec_files, capsys):
    code, out, _ = run(["curve-info", "--spec", spec_files["ellipse"]], capsys)
    assert code == 0
    info = fields(out)
    assert float(info["length"]) == pytest.approx(9.6884482205, rel=1e-10)
    assert float(info["k_min"]) == pytest.approx(0.25)
    assert float(info["k_max"]) == pytest.approx(2.0)
    assert float(info["total_turning"]) == pytest.approx(2 * np.pi, rel=1e-12)
    assert float(info["defect"]) < 0


@pytest.mark.parametrize("name", ["bad", "nonconvex"])
def test_bad_spec_exit_code(spec_files, capsys, name):
    code, _, err = run(["curve-info", "--spec", spec_files[name]], capsys)
    assert code == 2
    assert err


def test_missing_spec_is_usage_error(capsys, tmp_path):
    assert run(["curve-info"], capsys)[0] == 1
    assert run(["curve-info", "--spec", str(tmp_path / "none.json")], capsys)[0] == 1


def test_orbit_pentagon(spec_files, capsys, tmp_path):
    out_path = tmp_path / "orbit.csv"
    code, _, _ = run(
        ["orbit", "--spec", spec_files["circle"], "--s0", "0", "--s1", repr(2 * np.pi / 5), "--steps", "5", "--out", str(out_path)],
        capsys,
    )
    assert code == 0
    rows = out_path.read_text().splitlines()
    assert rows[0] == "step,s0,s1,eps,Px,Py,residual"
    assert len(rows) == 7
    last = rows[-1].split(",")
    first = rows[1].split(",")
    assert float(last[4]) == pytest.approx(float(first[4]), abs=1e-12)
    assert max(abs(float(r.split(",")[-1])) for r in rows[2:]) < 1e-12


def test_orbit_inside_point(spec_files, capsys):
    code, _, err = run(["orbit", "--spec", spec_files["circle"], "--px", "0.1", "--py", "0", "--steps", "3"], capsys)
    assert code == 3
    assert "InsidePoint" in err


def test_orbit_step_failure_names_step(spec_files, capsys):
    code, _, err = run(
        ["orbit", "--spec", spec_files["circle"], "--s0", "0", "--s1", "3.1415", "--steps", "3", "--tol-residual", "1e-30"],
        capsys,
    )
    assert code == 3
    assert "step 1" in err


def test_orbit_needs_start(spec_files, capsys):
    assert run(["orbit", "--spec", spec_files["circle"]], capsys)[0] == 1


def test_beta_circle(spec_files, capsys, tmp_path):
    out_path = tmp_path / "beta.json"
    code, out, _ = run(["beta", "--spec", spec_files["circle"], "--qmin", "8", "--qmax", "128", "--out", str(out_path)], capsys)
    assert code == 0
    b3 = [line for line in out.splitlines() if line.startswith("b3:")][0]
    assert float(b3.split()[-1]) < 1e-8
    data = json.loads(out_path.read_text())
    assert data["q"] == [8, 16, 32, 64, 128]
    assert (tmp_path / "beta.csv").read_text().startswith("q,beta,beta_minus_ell_over_q")


def test_beta_ellipse_defect(spec_files, capsys):
    code, out, _ = run(["beta", "--spec", spec_files["ellipse"], "--qmin", "8", "--qmax", "64"], capsys)
    assert code == 0
    assert float(fields(out)["defect"]) < 0


@pytest.mark.parametrize("args", [["--qmin", "2", "--qmax", "64"], ["--qmin", "8", "--qmax", "32"]])
def test_beta_usage_errors(spec_files, capsys, args):
    assert run(["beta", "--spec", spec_files["circle"], *args], capsys)[0] == 1


def test_beta_output_is_byte_identical(spec_files, capsys, tmp_path):
    blobs = []
    for i in range(2):
        path = tmp_path / f"b{i}.json"
        run(["beta", "--spec", spec_files["ellipse"], "--qmin", "4", "--qmax", "32", "--out", str(path)], capsys)
        blobs.append(path.read_bytes() + (tmp_path / f"b{i}.csv").read_bytes())
    assert blobs[0] == blobs[1]


def test_caustic(capsys, tmp_path):
    out_path = tmp_path / "caustic.csv"
    code, out, _ = run(["caustic", "--a", "2", "--b", "1", "--lambda", "1", "--steps", "300", "--chords", "10", "--out", str(out_path)], capsys)
    assert code == 0
    info = fields(out)
    assert float(info["max_deviation_over_length"]) < 1e-8
    assert float(info["max_orthogonality_residual"]) < 1e-9
    assert out_path.read_text().startswith("step,Px,Py,deviation")


def test_caustic_circles(capsys):
    code, out, _ = run(["caustic", "--a", "1", "--b", "1", "--lambda", "0.5", "--steps", "300", "--chords", "5"], capsys)
    assert code == 0
    assert float(fields(out)["max_deviation_over_length"]) < 1e-10


@pytest.mark.parametrize("lam", ["0", "-1"])
def test_caustic_bad_lambda(capsys, lam):
    assert run(["caustic", "--a", "2", "--b", "1", "--lambda", lam], capsys)[0] == 1


def test_mather_scan(spec_files, capsys, tmp_path):
    out_path = tmp_path / "scan.csv"
    code, out, _ = run(["mather-scan", "--spec", spec_files["circle"], "--grid", "6", "--out", str(out_path)], capsys)
    assert code == 0
    assert "max_M" in fields(out)
    assert len(out_path.read_text().splitlines()) == 37


def test_mather_scan_small_grid(spec_files, capsys):
    assert run(["mather-scan", "--spec", spec_files["circle"], "--grid", "1"], capsys)[0] == 1


def test_expansion_check_lazutkin(capsys, tmp_path):
    out_path = tmp_path / "lz.csv"
    code, out, _ = run(["expansion-check", "--which", "lazutkin", "--out", str(out_path)], capsys)
    assert code == 0
    assert "PASS" in out
    assert out_path.read_text().startswith("check,step,remainder")


def test_unknown_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 1


def test_bad_tolerance_is_usage_error(spec_files, capsys):
    args = ["orbit", "--spec", spec_files["circle"], "--s0", "0", "--s1", "1", "--tol-root", "-1"]
    assert run(args, capsys)[0] == 1


def test_module_entry_point(spec_files):
    proc = subprocess.run(
        [sys.executable, "-m", "outer_billiard", "curve-info", "--spec", spec_files["circle"]],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("length: 6.2831853071795862")
