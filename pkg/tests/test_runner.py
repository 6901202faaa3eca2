"""End-to-end run loop and CLI subcommand behavior."""

import csv
import math
from pathlib import Path

import numpy as np
import pytest

from gbdd.cli import main
from gbdd.config import parse_config
from gbdd.diagnostics import CSV_COLUMNS
from gbdd.runner import run_simulation
from gbdd.snapshots import read_snapshot

BASE = (
    "grid.n1 = 32\n"
    "grid.n2 = 32\n"
    "grid.length = 6.283185307179586\n"
    "init.kind = GaussianPlus\n"
    "init.sigma = 0.6\n"
    "time.scheme = IFRK2\n"
)


def _run(tmp_path, extra, sub="out"):
    out = tmp_path / sub
    cfg = parse_config(BASE + extra + f"output.dir = {out}\n")
    return run_simulation(cfg), out


def _rows(out: Path):
    with (out / "diagnostics.csv").open() as fh:
        return list(csv.reader(fh))


def test_clean_run_artifacts(tmp_path):
    code, out = _run(tmp_path, "time.dt = 0.025\ntime.t_end = 0.1\noutput.every = 2\n")
    assert code == 0
    rows = _rows(out)
    assert rows[0] == list(CSV_COLUMNS)
    # initial record, step 2, step 4 (the final step is on cadence anyway)
    assert len(rows) == 4
    ts = [float(r[0]) for r in rows[1:]]
    assert ts == pytest.approx([0.0, 0.05, 0.1])
    assert all(math.isfinite(float(v)) for r in rows[1:] for v in r[:-1])
    assert all(math.isnan(float(r[-1])) for r in rows[1:])  # tracking off

    snaps = sorted(p.name for p in out.glob("snap_*.gbds"))
    assert snaps == ["snap_000000.gbds", "snap_000002.gbds", "snap_000004.gbds"]
    back = read_snapshot(out / "snap_000004.gbds")
    assert back.t == pytest.approx(0.1)

    manifest = (out / "manifest.txt").read_text()
    assert "outcome = clean" in manifest
    assert "steps = 4" in manifest and "records = 3" in manifest
    assert "init.kind = GaussianPlus" in manifest
    assert "moc.track = false" in manifest


def test_final_record_forced_off_cadence(tmp_path):
    code, out = _run(tmp_path, "time.dt = 0.03\ntime.t_end = 0.1\noutput.every = 3\n")
    assert code == 0
    # 4 steps (0.03 x3 plus a 0.01 closer); records at 0, step 3, final step 4
    snaps = sorted(p.name for p in out.glob("snap_*.gbds"))
    assert snaps == ["snap_000000.gbds", "snap_000003.gbds", "snap_000004.gbds"]
    assert float(_rows(out)[-1][0]) == pytest.approx(0.1)


def test_deterministic_csv(tmp_path):
    _, out1 = _run(tmp_path, "time.dt = 0.05\ntime.t_end = 0.15\n", sub="a")
    _, out2 = _run(tmp_path, "time.dt = 0.05\ntime.t_end = 0.15\n", sub="b")
    assert (out1 / "diagnostics.csv").read_bytes() == (out2 / "diagnostics.csv").read_bytes()


def test_moc_tracking_column(tmp_path):
    code, out = _run(
        tmp_path,
        "time.dt = 0.05\ntime.t_end = 0.1\nmoc.track = true\nmoc.delta = 0.1\n",
    )
    assert code == 0
    vals = [float(r[-1]) for r in _rows(out)[1:]]
    assert all(math.isfinite(v) and v > 0.0 for v in vals)


def test_nan_abort_artifacts(tmp_path):
    out = tmp_path / "boom"
    cfg = parse_config(
        "grid.n1 = 32\n"
        "grid.n2 = 32\n"
        "grid.length = 6.283185307179586\n"
        "init.kind = SingleMode\n"
        "init.amplitude = 1e60\n"
        "model.kappa = 0\n"
        "model.alpha = 1.0\n"
        "time.scheme = IFEuler\n"
        "time.dt = 1.0\n"
        "time.t_end = 5.0\n"
        f"output.dir = {out}\n"
    )
    with np.errstate(over="ignore", invalid="ignore"):
        assert run_simulation(cfg) == 2
    lines = (out / "diagnostics.csv").read_text().splitlines()
    assert "# aborted=nan" in lines
    last = lines[-1].split(",")
    assert math.isfinite(float(last[0]))
    assert all(math.isnan(float(v)) for v in last[1:])
    assert "outcome = aborted=nan" in (out / "manifest.txt").read_text()


def test_blowup_seed_carries_into_first_record(tmp_path):
    code, out = _run(
        tmp_path, "time.dt = 0.05\ntime.t_end = 0.05\ndiag.blowup0 = 7.0\n"
    )
    assert code == 0
    rows = _rows(out)
    col = list(CSV_COLUMNS).index("blowup_integral")
    assert float(rows[1][col]) == 7.0
    assert float(rows[2][col]) > 7.0


# ---------------------------------------------------------------------------
# CLI


def test_cli_simulate_and_out_override(tmp_path, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(BASE + "time.dt = 0.05\ntime.t_end = 0.05\noutput.dir = ignored\n")
    out = tmp_path / "cli_out"
    code = main(["simulate", "--config", str(cfg_file), "--out", str(out)])
    assert code == 0
    assert (out / "diagnostics.csv").exists()
    assert "clean completion" in capsys.readouterr().out


def test_cli_simulate_bad_config(tmp_path, capsys):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("grid.n1 = 63\n")
    assert main(["simulate", "--config", str(cfg_file)]) == 1
    assert "line 1" in capsys.readouterr().err
    assert main(["simulate", "--config", str(tmp_path / "missing.cfg")]) == 1


def test_cli_certify_pass_and_fail(tmp_path, capsys):
    out = tmp_path / "cert.csv"
    code = main(
        ["certify", "--alpha", "1.5", "--delta", "0.01",
         "--n-samples", "64", "--out", str(out)]
    )
    assert code == 0
    text = capsys.readouterr().out
    assert "PASS" in text
    with out.open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["xi", "omega", "omega_prime", "Omega", "Psi", "margin", "err_bound"]
    assert all(float(r[5]) + float(r[6]) < 0.0 for r in rows[1:])

    code = main(
        ["certify", "--alpha", "1.5", "--delta", "0.01", "--a1", "1e6",
         "--n-samples", "64", "--out", str(tmp_path / "fail.csv")]
    )
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_cli_certify_bad_modulus(tmp_path, capsys):
    code = main(
        ["certify", "--alpha", "1.5", "--delta", "0.9",
         "--out", str(tmp_path / "x.csv")]
    )
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_cli_kernel(tmp_path, capsys):
    out = tmp_path / "kern.csv"
    code = main(["kernel", "--alpha", "1.0", "--r-max", "4.0", "--n", "9",
                 "--out", str(out)])
    assert code == 0
    assert "PASS" in capsys.readouterr().out
    with out.open() as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 10
    r, val, closed, abserr = map(float, rows[1])
    assert r == 0.0
    assert val == pytest.approx(1.0 / (2 * math.pi), rel=1e-6)
    assert closed == pytest.approx(1.0 / (2 * math.pi), rel=1e-12)


def test_cli_opcheck(capsys):
    assert main(["opcheck", "--n", "16", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
