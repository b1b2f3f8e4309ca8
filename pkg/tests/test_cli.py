import csv
import io
import math
import subprocess
import sys

import pytest

from qhj_impulse.cli import ENSEMBLE_COLUMNS, PERTURB_COLUMNS, TRAJECTORY_COLUMNS, main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_headers_are_pinned():
    assert ",".join(TRAJECTORY_COLUMNS) == "t,x,direction,cycle,sheet_epoch"
    assert ",".join(ENSEMBLE_COLUMNS) == (
        "epsilon,n,mean_e1,stderr_e1,left_wall_plus,right_wall_plus,right_wall_minus,"
        "left_wall_minus,interior_zero,n_skipped,copenhagen_e1_original,copenhagen_e1_errata"
    )
    assert ",".join(PERTURB_COLUMNS) == (
        "F,epsilon,gamma,T,tau0,case,sheet_time,window_lo,window_hi,"
        "e1_trajectory,e1_copenhagen_original,e1_copenhagen_errata"
    )


def test_verify_defaults_pass():
    code, text = run("verify")
    assert code == 0
    assert "FAIL" not in text


def test_verify_single_group():
    code, text = run("verify", "--group", "wronskian")
    assert code == 0
    assert {line.split()[1] for line in text.splitlines() if line.startswith("PASS")} == {"wronskian:"}


def test_verify_invalid_microstate_from_config(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[microstate]\na = 1\nb = 1\nc = 2\n")
    code, _ = run("verify", "--config", str(cfg))
    assert code == 1


def test_trajectory_flat_sawtooth():
    code, text = run("trajectory", "--n-points", "9")
    assert code == 0
    rows = rows_of(text)
    xs = [float(r["x"]) for r in rows]
    expected = [-1, -0.5, 0, 0.5, 1, 0.5, 0, -0.5, -1]
    assert xs == pytest.approx(expected, abs=1e-12)
    assert [r["direction"] for r in rows] == ["+x"] * 4 + ["-x"] * 4 + ["+x"]


def test_trajectory_empty():
    code, text = run("trajectory", "--n-points", "0")
    assert code == 0 and text == "t,x,direction,cycle,sheet_epoch\n"


def test_trajectory_files(tmp_path):
    out = tmp_path / "traj.csv"
    code, _ = run("trajectory", "--a", "2", "--b", "3", "--c", "1", "--n-points", "40", "--cycles", "2", "--out", str(out))
    assert code == 0
    assert (tmp_path / "traj_plot.py").exists() and (tmp_path / "traj.png").exists()
    assert b"\r" not in out.read_bytes()
    assert max(int(r["cycle"]) for r in rows_of(out.read_text())) == 2


def test_perturb_flat_left_wall():
    # particle at x = -0.97 on the +x sheet
    code, text = run("perturb", "--eps", "0.05", "--gamma", repr(-0.97 * 2 / math.pi))
    assert code == 0
    assert "case left_wall_plus" in text
    value = float(text.split("trajectory E1: ")[1].split()[0])
    assert value == pytest.approx(math.pi / 2, abs=1e-14)


def test_perturb_interior_vs_copenhagen(tmp_path):
    out = tmp_path / "p.csv"
    code, _ = run("perturb", "--gamma", "0", "--out", str(out))
    row = rows_of(out.read_text())[0]
    assert row["case"] == "interior_zero" and float(row["e1_trajectory"]) == 0.0
    assert float(row["e1_copenhagen_original"]) == pytest.approx(4.0988299445488844e-5, rel=1e-12)


def test_perturb_zero_force():
    code, text = run("perturb", "--F", "0", "--gamma", repr(-0.97 * 2 / math.pi))
    assert "trajectory E1: 0.0" in text or "trajectory E1: -0.0" in text
    assert "Copenhagen E1 (original): 0.0" in text


def test_ensemble_sweep_rows_and_determinism(tmp_path):
    args = ["ensemble", "--n", "20000", "--sweep", "0.05,0.1,0.2,0.3", "--seed", "11", "--no-figure"]
    run(*args, "--threads", "1", "--out", str(tmp_path / "a.csv"))
    run(*args, "--threads", "4", "--out", str(tmp_path / "b.csv"))
    a, b = (tmp_path / "a.csv").read_bytes(), (tmp_path / "b.csv").read_bytes()
    assert a == b
    assert [float(r["epsilon"]) for r in rows_of(a.decode())] == [0.05, 0.1, 0.2, 0.3]
    assert (tmp_path / "a_plot.py").exists()


def test_ensemble_emitted_script_runs(tmp_path):
    out = tmp_path / "e.csv"
    code, _ = run("ensemble", "--n", "5000", "--out", str(out))
    assert code == 0 and (tmp_path / "e.png").exists()
    png = tmp_path / "again.png"
    subprocess.run([sys.executable, str(tmp_path / "e_plot.py"), str(png)], check=True, capture_output=True)
    assert png.stat().st_size > 0


def test_ensemble_samples(tmp_path):
    samples = tmp_path / "s.csv"
    code, _ = run("ensemble", "--n", "300", "--source", "random", "--count", "3", "--samples-out", str(samples))
    assert code == 0
    assert len(rows_of(samples.read_text())) == 300


@pytest.mark.parametrize(
    "argv,code",
    [
        (["perturb", "--a", "5", "--b", "0.5", "--c", "-1"], 2),
        (["perturb", "--eps", "1.5"], 1),
        (["perturb", "--bogus"], 1),
        (["ensemble", "--n", "10", "--out", "/nonexistent-dir/x.csv"], 3),
        (["verify", "--config", "/nonexistent-dir/c.ini"], 3),
    ],
)
def test_exit_codes(argv, code):
    try:
        got, _ = run(*argv)
    except SystemExit as exc:
        got = exc.code
    assert got == code
