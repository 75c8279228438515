import csv
import json

import pytest

from fracsplit.cli import main
from fracsplit.snapshot import read_binary

COMMON = """
[model]
sigma = {sigma}
beta = {beta}

[reaction]
kind = quadratic

[scheme]
variant = {variant}
dt = {dt}
t_end = {t_end}
"""


def write_cfg(tmp_path, body, name="run.ini"):
    p = tmp_path / name
    p.write_text(body)
    return str(p)


def domain(length, points, extra=""):
    return f"[domain]\nlength = {length}\npoints = {points}\n{extra}\n"


def run(argv, capsys):
    code = main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_simulate_blowup(tmp_path, capsys):
    body = domain(32.0, 64) + COMMON.format(sigma=1.0, beta=0.5, variant="lie_full", dt=1e-3, t_end=2.0) + \
        "[initial]\nkind = constant\nparams = 1.0\n[output]\nstride = 250\n"
    out = tmp_path / "o"
    code, stdout, _ = run(["simulate", "--config", write_cfg(tmp_path, body), "--out", str(out)], capsys)
    assert code == 0
    assert json.loads(stdout)["status"] == "blew_up"
    man = json.loads((out / "manifest.json").read_text())
    assert man["status"] == "blew_up"
    assert man["t_star"] == pytest.approx(1.0, abs=0.01)
    for key in ("command", "code_version", "started_utc", "wall_clock_seconds", "config", "config_text"):
        assert key in man
    assert man["config_text"] == body
    assert [s["time"] for s in man["snapshots"]] == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
    assert read_binary(out / "snap_00003.bin").time == pytest.approx(0.75)


def test_simulate_is_reproducible(tmp_path, capsys):
    body = domain(16.0, 64) + COMMON.format(sigma=0.5, beta=0.7, variant="strang", dt=0.01, t_end=0.2) + \
        "[initial]\nkind = random_bounded\nparams = 0.5\nseed = 99\n[output]\nformat = csv\nstride = 5\n"
    cfg = write_cfg(tmp_path, body)
    run(["simulate", "--config", cfg, "--out", str(tmp_path / "a")], capsys)
    run(["simulate", "--config", cfg, "--out", str(tmp_path / "b"), "--stride", "5"], capsys)
    files = sorted(p.name for p in (tmp_path / "a").glob("snap_*.csv"))
    assert len(files) == 5
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_kernel_cauchy(tmp_path, capsys):
    body = domain(200.0, 4096) + COMMON.format(sigma=1.0, beta=0.5, variant="strang", dt=1.0, t_end=1.0) + \
        "[initial]\nkind = constant\nparams = 0.0\n[kernel]\nwindow = 5, 40\n"
    out = tmp_path / "k"
    code, _, _ = run(["kernel", "--config", write_cfg(tmp_path, body), "--out", str(out)], capsys)
    assert code == 0
    rows = list(csv.DictReader((out / "kernel.csv").open()))
    assert list(rows[0]) == ["x", "value", "closed_form"]
    zero = next(r for r in rows if float(r["x"]) == 0.0)
    assert float(zero["value"]) == pytest.approx(0.31831, abs=1e-4)
    assert float(zero["closed_form"]) == pytest.approx(1 / 3.141592653589793, rel=1e-15)
    fit = list(csv.DictReader((out / "tail_fit.csv").open()))
    assert float(fit[0]["slope"]) == pytest.approx(-2.0, abs=0.1)
    man = json.loads((out / "manifest.json").read_text())
    assert man["mass"] == pytest.approx(1.0, abs=1e-12)


def test_converge_strang(tmp_path, capsys):
    body = domain(20.0, 128) + COMMON.format(sigma=1.0, beta=1.0, variant="strang", dt=0.05, t_end=0.5) + \
        "levels = 4\n[initial]\nkind = gaussian_bump\nparams = 0.5, 10.0, 0.7071067811865476\n"
    out = tmp_path / "c"
    code, _, _ = run(["converge", "--config", write_cfg(tmp_path, body), "--out", str(out)], capsys)
    assert code == 0
    rows = list(csv.DictReader((out / "converge.csv").open()))
    assert [r["variant"] for r in rows] == ["strang"] * 4
    assert float(rows[0]["slope"]) == pytest.approx(2.0, abs=0.3)
    errs = [float(r["sup_error"]) for r in rows]
    assert errs == sorted(errs, reverse=True)


def test_decompose(tmp_path, capsys):
    body = domain(100.53096491487338, 1024, "period = 6.283185307179586\ncells = 16") + \
        COMMON.format(sigma=1.0, beta=0.5, variant="strang", dt=0.01, t_end=0.2) + \
        "[initial]\nkind = peregrine_sum\nparams = 0.1, 0.1\n[output]\nstride = 5\n"
    out = tmp_path / "d"
    code, _, _ = run(["decompose", "--config", write_cfg(tmp_path, body), "--out", str(out)], capsys)
    assert code == 0
    rows = list(csv.DictReader((out / "decompose.csv").open()))
    assert list(rows[0]) == ["time", "sum_consistency_error", "outer_sup_w", "projector_error"]
    assert len(rows) == 5
    assert max(float(r["sum_consistency_error"]) for r in rows) <= 1e-10
    assert float(rows[0]["projector_error"]) <= 1e-6


def test_config_error_exit(tmp_path, capsys):
    body = domain(32.0, 64) + COMMON.format(sigma=1.0, beta=1.5, variant="strang", dt=0.1, t_end=1.0) + \
        "[initial]\nkind = constant\nparams = 0.1\n"
    code, _, err = run(["simulate", "--config", write_cfg(tmp_path, body), "--out", str(tmp_path / "x")], capsys)
    assert code == 2
    msg = json.loads(err.strip())
    assert msg["kind"] == "config" and "model.beta must lie in (0,1]" in msg["message"]
    code, _, _ = run(["simulate", "--config", str(tmp_path / "missing.ini")], capsys)
    assert code == 2


def test_decompose_requires_peregrine(tmp_path, capsys):
    body = domain(32.0, 64) + COMMON.format(sigma=1.0, beta=1.0, variant="strang", dt=0.1, t_end=1.0) + \
        "[initial]\nkind = constant\nparams = 0.1\n"
    code, _, _ = run(["decompose", "--config", write_cfg(tmp_path, body), "--out", str(tmp_path / "x")], capsys)
    assert code == 2


def test_numeric_error_exit(tmp_path, capsys):
    body = domain(32.0, 64) + COMMON.format(sigma=1.0, beta=1.0, variant="strang", dt=0.5, t_end=2.0) + \
        "[initial]\nkind = constant\nparams = 1.0\n"
    code, _, err = run(["converge", "--config", write_cfg(tmp_path, body), "--out", str(tmp_path / "x")], capsys)
    assert code == 3
    assert json.loads(err.strip())["kind"] == "numeric"
