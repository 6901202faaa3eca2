"""Simulation loop: stepping, periodic records, snapshots, manifest.

Artifacts per run directory:
  diagnostics.csv  one row per record, 17 fixed columns, %.17g floats
  snap_%06d.gbds   binary state snapshots at the record cadence (step index)
  manifest.txt     effective config echo, library versions, wall time

Determinism: identical config produces a bit-identical diagnostics.csv; the
manifest is the only artifact carrying wall-clock values. A NaN abort writes
an `# aborted=nan` marker plus a final all-nan record and exits with 2.
"""

from __future__ import annotations

import math
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import _accel
from .config import RunConfig
from .diagnostics import CSV_COLUMNS, compute_record, default_displacements
from .model import InitKind, Variant
from .snapshots import write_snapshot
from .stepping import StepNaNError, cfl_dt, step


def _format_row(values) -> str:
    return ",".join("%.17g" % v for v in values)


def _package_version() -> str:
    try:
        from importlib.metadata import version

        return version("gbdd")
    except Exception:
        return "unknown"


def _effective_config_lines(cfg: RunConfig) -> list[str]:
    lines = [
        f"grid.n1 = {cfg.n1}",
        f"grid.n2 = {cfg.n2}",
        "grid.length = %.17g" % cfg.length,
        f"model.variant = {cfg.variant.value}",
        "model.kappa = %.17g" % cfg.kappa,
        "model.alpha = %.17g" % cfg.alpha,
    ]
    if cfg.beta is not None:
        lines.append("model.beta = %.17g" % cfg.beta)
    lines.append(f"init.kind = {cfg.init_kind.value}")
    if cfg.init_kind is InitKind.FROM_SNAPSHOT:
        lines.append(f"init.path = {cfg.path}")
    else:
        lines.append("init.amplitude = %.17g" % cfg.amplitude)
        lines.append("init.sigma = %.17g" % cfg.sigma)
        if cfg.center_x is not None:
            lines.append("init.center_x = %.17g" % cfg.center_x)
        if cfg.center_y is not None:
            lines.append("init.center_y = %.17g" % cfg.center_y)
        if cfg.init_kind is InitKind.SINGLE_MODE:
            lines.append(f"init.mode1 = {cfg.mode1}")
            lines.append(f"init.mode2 = {cfg.mode2}")
            lines.append("init.phase = %.17g" % cfg.phase)
    lines += [
        f"time.scheme = {cfg.scheme.value}",
        "time.dt = %.17g" % cfg.dt,
        "time.cfl = %.17g" % cfg.cfl,
        "time.t_end = %.17g" % cfg.t_end,
        f"output.every = {cfg.every}",
        f"output.dir = {cfg.out_dir}",
        "diag.p = %.17g" % cfg.p,
        "diag.m = %.17g" % cfg.m,
    ]
    if cfg.blowup0 != 0.0:
        lines.append("diag.blowup0 = %.17g" % cfg.blowup0)
    if cfg.moc_delta is not None:
        lines.append("moc.delta = %.17g" % cfg.moc_delta)
    if cfg.moc_gamma is not None:
        lines.append("moc.gamma = %.17g" % cfg.moc_gamma)
    lines.append(f"moc.track = {'true' if cfg.moc_track else 'false'}")
    return lines


def _write_manifest(
    out: Path, cfg: RunConfig, wall_s: float, steps: int, records: int, outcome: str
):
    if _accel.USING_NUMBA:
        import numba

        accel = f"numba {numba.__version__}"
    else:
        accel = "numpy fallback" + (" (disabled by env)" if _accel.HAS_NUMBA else "")
    text = "\n".join(
        [
            "# gbdd run manifest",
            f"package = gbdd {_package_version()}",
            f"python = {sys.version.split()[0]}",
            f"numpy = {np.__version__}",
            f"scipy = {scipy.__version__}",
            f"accel = {accel}",
            f"steps = {steps}",
            f"records = {records}",
            "wall_time_s = %.3f" % wall_s,
            f"outcome = {outcome}",
            "",
            "[config]",
        ]
        + _effective_config_lines(cfg)
    )
    (out / "manifest.txt").write_text(text + "\n", encoding="utf-8")


def run_simulation(cfg: RunConfig) -> int:
    """Run to cfg.t_end, writing artifacts into cfg.out_dir; 0 on success."""
    t_start = time.perf_counter()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    state = cfg.initial_state()
    params = cfg.model_params()
    stepcfg = cfg.stepper_config()
    modulus = cfg.modulus()
    displacements = (
        default_displacements(state.grid) if modulus is not None else None
    )

    csv_path = out / "diagnostics.csv"
    n_steps = 0
    n_records = 0
    prev = None
    with csv_path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")

        def record():
            nonlocal prev, n_records
            try:
                # Norms can overflow to inf one or two steps before the
                # state itself leaves float range; fold that into the same
                # abort path instead of crashing mid-record.
                with np.errstate(over="ignore", invalid="ignore"):
                    rec = compute_record(
                        state,
                        params,
                        p=cfg.p,
                        m=cfg.m,
                        prev=prev,
                        blowup_seed=cfg.blowup0,
                        modulus=modulus,
                        displacements=displacements,
                    )
            except ValueError as err:
                raise StepNaNError(state.t, str(err)) from err
            fh.write(_format_row(rec.row()) + "\n")
            write_snapshot(out / ("snap_%06d.gbds" % n_steps), state)
            prev = rec
            n_records += 1

        try:
            record()
            while state.t < cfg.t_end - 1e-14 * max(1.0, cfg.t_end):
                dt = cfg.dt if cfg.dt > 0.0 else cfl_dt(state, params, stepcfg)
                dt = min(dt, cfg.t_end - state.t)
                state = step(state, params, stepcfg, dt=dt)
                n_steps += 1
                if n_steps % cfg.every == 0 or state.t >= cfg.t_end - 1e-14 * max(
                    1.0, cfg.t_end
                ):
                    record()
        except StepNaNError as exc:
            fh.write("# aborted=nan\n")
            fh.write(
                _format_row([exc.t] + [math.nan] * (len(CSV_COLUMNS) - 1)) + "\n"
            )
            _write_manifest(
                out, cfg, time.perf_counter() - t_start, n_steps, n_records,
                "aborted=nan",
            )
            return 2

    _write_manifest(
        out, cfg, time.perf_counter() - t_start, n_steps, n_records, "clean"
    )
    return 0
