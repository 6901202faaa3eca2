"""Integrating-factor time integration and the successive-approximation mode.

The dissipation is diagonal in spectral space, so each step applies the exact
semigroup e^{-kappa dt |k|^alpha} and treats only the transport term with an
explicit Runge-Kutta rule in the integrating-factor frame. With the transport
switched off a step of any scheme reduces to one exact semigroup multiply.

``picard_solve`` mirrors the successive-approximation construction: iterate
n+1 solves the linear transport-diffusion equation whose velocity is frozen
from iterate n. Each linear solve runs the same stepper with the stage
velocities replayed from a recording of the previous iterate's stage states,
so the iteration's fixed point is exactly the direct nonlinear scheme's
discrete solution.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .grid import Grid2D, RealField2D
from .model import (
    DensityState,
    ModelParams,
    Variant,
    transport_hat,
    velocity_hat,
)
from .spectral import semigroup_factor, to_physical_array, to_spectral_array

_SINGLE_FIELD = (Variant.SQG_REDUCED, Variant.SQG_TRUE)


class Scheme(Enum):
    IF_EULER = "IFEuler"
    IF_RK2 = "IFRK2"
    IF_RK4 = "IFRK4"


class StepNaNError(RuntimeError):
    """Non-finite values appeared during a step."""

    def __init__(self, t: float, message: str):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class StepperConfig:
    scheme: Scheme = Scheme.IF_RK2
    dt: float = 0.0  # 0 selects adaptive dt from the Courant rule
    cfl: float = 0.5
    t_end: float = 1.0
    nonlinear: bool = True  # test hook: False integrates the pure semigroup

    def __post_init__(self):
        if self.dt < 0.0:
            raise ValueError(f"dt must be >= 0, got {self.dt}")
        if self.dt == 0.0 and not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"adaptive stepping needs cfl in (0, 1], got {self.cfl}")
        if self.t_end < 0.0:
            raise ValueError(f"t_end must be >= 0, got {self.t_end}")


def _semigroup_pair(grid: Grid2D, params: ModelParams, s: float):
    fac_plus = semigroup_factor(grid, s, params.kappa, params.alpha)
    if params.variant in _SINGLE_FIELD:
        # the idle slot of single-scalar variants is left strictly untouched
        fac_minus = np.ones(grid.shape)
    elif params.exponent_minus() == params.alpha:
        fac_minus = fac_plus
    else:
        fac_minus = semigroup_factor(grid, s, params.kappa, params.exponent_minus())
    return fac_plus, fac_minus


def _zero_velocities(grid: Grid2D, variant: Variant):
    n = 2 if variant is Variant.SQG_TRUE else 1
    return tuple(np.zeros(grid.shape, dtype=complex) for _ in range(n))


def _step_hats(grid, hp, hm, params, scheme, dt, *, nonlinear=True, replay=None, record=None):
    """One IF-RK step on spectral coefficient pairs.

    ``replay``: None (self-consistent velocities), the string "zero", or a
    per-stage list of frozen velocity tuples. ``record``, when a list, gets
    the velocities computed from this step's own stage states appended in
    stage order — the recording a successive-approximation pass hands to the
    next iterate.
    """

    def tend(stage, hp_s, hm_s):
        if record is not None:
            record.append(velocity_hat(grid, hp_s, hm_s, params.variant))
        if not nonlinear:
            z = np.zeros_like(hp_s)
            return z, z
        if replay is None:
            u_hats = record[-1] if record is not None else velocity_hat(
                grid, hp_s, hm_s, params.variant
            )
        elif replay == "zero":
            u_hats = _zero_velocities(grid, params.variant)
        else:
            u_hats = replay[stage]
        return transport_hat(grid, hp_s, hm_s, u_hats, params)

    Ep, Em = _semigroup_pair(grid, params, dt)

    if scheme is Scheme.IF_EULER:
        n1p, n1m = tend(0, hp, hm)
        return Ep * (hp + dt * n1p), Em * (hm + dt * n1m)

    if scheme is Scheme.IF_RK2:
        n1p, n1m = tend(0, hp, hm)
        sp = Ep * (hp + dt * n1p)
        sm = Em * (hm + dt * n1m)
        n2p, n2m = tend(1, sp, sm)
        return (
            Ep * hp + 0.5 * dt * (Ep * n1p + n2p),
            Em * hm + 0.5 * dt * (Em * n1m + n2m),
        )

    if scheme is Scheme.IF_RK4:
        Ep2, Em2 = _semigroup_pair(grid, params, 0.5 * dt)
        n1p, n1m = tend(0, hp, hm)
        s2p = Ep2 * (hp + 0.5 * dt * n1p)
        s2m = Em2 * (hm + 0.5 * dt * n1m)
        n2p, n2m = tend(1, s2p, s2m)
        s3p = Ep2 * hp + 0.5 * dt * n2p
        s3m = Em2 * hm + 0.5 * dt * n2m
        n3p, n3m = tend(2, s3p, s3m)
        s4p = Ep * hp + dt * Ep2 * n3p
        s4m = Em * hm + dt * Em2 * n3m
        n4p, n4m = tend(3, s4p, s4m)
        return (
            Ep * hp + (dt / 6.0) * (Ep * n1p + 2.0 * Ep2 * (n2p + n3p) + n4p),
            Em * hm + (dt / 6.0) * (Em * n1m + 2.0 * Em2 * (n2m + n3m) + n4m),
        )

    raise ValueError(f"unknown scheme {scheme!r}")


def cfl_dt(state: DensityState, params: ModelParams, cfg: StepperConfig) -> float:
    """Courant-limited step: cfl * (cell crossing time), capped at 0.5*min(dx).

    The cap itself is not scaled by cfl, so a quiescent state steps at
    exactly the stability cap.
    """
    grid = state.grid
    hp = to_spectral_array(grid, state.theta_plus.values)
    hm = to_spectral_array(grid, state.theta_minus.values)
    u_hats = velocity_hat(grid, hp, hm, params.variant)
    dxs = (grid.dx1, grid.dx2)
    adv = np.inf
    for axis, u_hat in enumerate(u_hats):
        umax = float(np.max(np.abs(to_physical_array(grid, u_hat))))
        adv = min(adv, dxs[axis] / max(umax, 1e-12))
    cap = 0.5 * min(grid.dx1, grid.dx2)
    return min(cfg.cfl * adv, cap)


def step(
    state: DensityState,
    params: ModelParams,
    cfg: StepperConfig,
    dt: float | None = None,
) -> DensityState:
    """Advance one step; dt falls back to cfg.dt, then to the Courant rule."""
    if dt is None:
        dt = cfg.dt if cfg.dt > 0.0 else cfl_dt(state, params, cfg)
    grid = state.grid
    hp = to_spectral_array(grid, state.theta_plus.values)
    hm = to_spectral_array(grid, state.theta_minus.values)
    hp, hm = _step_hats(grid, hp, hm, params, cfg.scheme, dt, nonlinear=cfg.nonlinear)
    plus = to_physical_array(grid, hp)
    minus = to_physical_array(grid, hm)
    t_new = state.t + dt
    if not (np.all(np.isfinite(plus)) and np.all(np.isfinite(minus))):
        raise StepNaNError(t_new, f"non-finite state after step to t={t_new!r}")
    return DensityState(
        theta_plus=RealField2D(grid, plus),
        theta_minus=RealField2D(grid, minus),
        t=t_new,
    )


# ---------------------------------------------------------------------------
# successive approximation


@dataclass
class PicardTrace:
    """Iterates and successive L^p distances of the frozen-velocity iteration."""

    iterates: list[DensityState]
    deltas: list[float]
    p: float
    diverged: bool = False

    def __post_init__(self):
        if any(d < 0.0 for d in self.deltas):
            raise ValueError("deltas must be non-negative")


def _lp(grid: Grid2D, values, p: float) -> float:
    return float((grid.cell_area * np.sum(np.abs(values) ** p)) ** (1.0 / p))


def picard_solve(
    init: DensityState,
    params: ModelParams,
    T: float,
    n_iters: int,
    p: float,
    *,
    scheme: Scheme = Scheme.IF_RK2,
    n_steps: int = 32,
) -> PicardTrace:
    """Frozen-velocity successive approximation over [0, T].

    Iterate 0 transports with velocity zero (pure dissipation of the data);
    iterate n+1 replays, stage by stage, the velocities recorded from iterate
    n's stage states. Distances between consecutive iterates are measured as
    the sup over step times of the summed L^p field differences. Growth of
    the distance over three consecutive iterations is reported as divergence
    (a warning and a flag), not an error.
    """
    if T <= 0.0:
        raise ValueError(f"T must be > 0, got {T}")
    if n_iters < 2:
        raise ValueError(f"n_iters must be >= 2, got {n_iters}")
    if not 1.0 < p < 2.0:
        raise ValueError(f"p must lie in (1, 2), got {p}")
    grid = init.grid
    dt = T / n_steps
    hp0 = to_spectral_array(grid, init.theta_plus.values)
    hm0 = to_spectral_array(grid, init.theta_minus.values)

    def run(replay_recs):
        # replay_recs: None for the zero-velocity iterate, else per-step stage lists
        traj = []
        recs = []
        hp, hm = hp0, hm0
        for k in range(n_steps):
            rec = []
            replay = "zero" if replay_recs is None else replay_recs[k]
            hp, hm = _step_hats(
                grid, hp, hm, params, scheme, dt, replay=replay, record=rec
            )
            traj.append((hp, hm))
            recs.append(rec)
        return traj, recs

    def final_state(traj) -> DensityState:
        hp, hm = traj[-1]
        return DensityState(
            theta_plus=RealField2D(grid, to_physical_array(grid, hp)),
            theta_minus=RealField2D(grid, to_physical_array(grid, hm)),
            t=init.t + T,
        )

    traj, recs = run(None)
    iterates = [final_state(traj)]
    deltas: list[float] = []
    for _ in range(n_iters):
        new_traj, new_recs = run(recs)
        sup = 0.0
        for (hp_new, hm_new), (hp_old, hm_old) in zip(new_traj, traj):
            dplus = _lp(grid, to_physical_array(grid, hp_new - hp_old), p)
            dminus = _lp(grid, to_physical_array(grid, hm_new - hm_old), p)
            sup = max(sup, dplus + dminus)
        deltas.append(sup)
        iterates.append(final_state(new_traj))
        traj, recs = new_traj, new_recs

    # three consecutive increases signal divergence
    diverged = False
    run_up = 0
    for i in range(1, len(deltas)):
        run_up = run_up + 1 if deltas[i] > deltas[i - 1] else 0
        if run_up >= 3:
            diverged = True
            break
    if diverged:
        warnings.warn(
            "successive-approximation distances grew over three consecutive "
            "iterations; the contraction regime likely requires smaller T",
            UserWarning,
            stacklevel=2,
        )
    return PicardTrace(iterates=iterates, deltas=deltas, p=p, diverged=diverged)
