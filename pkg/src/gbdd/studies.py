"""Convergence studies: temporal self-convergence orders and spatial refinement.

Shared by the `convergence` CLI subcommand and the acceptance tests so both
report the same numbers.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import make_grid
from .model import DensityState, InitKind, ModelParams, Variant, init_data
from .spectral import to_spectral
from .stepping import Scheme, StepperConfig, step

ORDER_BANDS = {
    Scheme.IF_EULER: (0.8, 1.2),
    Scheme.IF_RK2: (1.8, 2.2),
    Scheme.IF_RK4: (3.5, 4.5),
}


def _study_state(n: int, sigma: float = 1.0, length: float = 8.0 * math.pi) -> DensityState:
    grid = make_grid(n, n, length, length)
    return init_data(InitKind.GAUSSIAN_PLUS, grid, amplitude=1.0, sigma=sigma)


def _advance(state: DensityState, params: ModelParams, scheme: Scheme, dt: float,
             n_steps: int) -> DensityState:
    cfg = StepperConfig(scheme=scheme, dt=dt, t_end=n_steps * dt)
    for _ in range(n_steps):
        state = step(state, params, cfg, dt=dt)
    return state


def _sup_diff(a: DensityState, b: DensityState) -> float:
    return max(
        float(np.max(np.abs(a.theta_plus.values - b.theta_plus.values))),
        float(np.max(np.abs(a.theta_minus.values - b.theta_minus.values))),
    )


def temporal_orders(
    n: int = 64,
    t_end: float = 0.25,
    kappa: float = 1.0,
    alpha: float = 1.5,
    base_steps: int = 4,
) -> dict[Scheme, float]:
    """Richardson self-convergence order per scheme on a smooth run.

    order = log2(|u_dt - u_{dt/2}| / |u_{dt/2} - u_{dt/4}|) in sup norm.
    """
    params = ModelParams(variant=Variant.THETA_FORM, kappa=kappa, alpha=alpha)
    init = _study_state(n)
    orders: dict[Scheme, float] = {}
    for scheme in Scheme:
        sols = []
        for refine in (1, 2, 4):
            steps = base_steps * refine
            sols.append(_advance(init.copy(), params, scheme, t_end / steps, steps))
        d1 = _sup_diff(sols[0], sols[1])
        d2 = _sup_diff(sols[1], sols[2])
        orders[scheme] = math.log2(d1 / d2)
    return orders


def _restrict_spectral(fine: DensityState, n_coarse: int) -> np.ndarray:
    """theta_plus of the fine solution sampled on the coarse mode set.

    Coarse Nyquist lines are dropped (they have no counterpart convention on
    the fine grid); the result is the physical field on the coarse grid.
    """
    grid_f = fine.grid
    nf = grid_f.n1
    coeffs = to_spectral(fine.theta_plus).coeffs
    mc = np.fft.fftfreq(n_coarse, 1.0 / n_coarse).astype(int)
    keep = np.flatnonzero(np.abs(mc) < n_coarse // 2)
    src = np.where(mc >= 0, mc, nf + mc)
    out = np.zeros((n_coarse, n_coarse), dtype=complex)
    out[np.ix_(keep, keep)] = coeffs[np.ix_(src[keep], src[keep])]
    out *= (n_coarse * n_coarse) / (nf * nf)
    return np.real(np.fft.ifft2(out))


def spatial_errors(
    ns=(64, 128, 256),
    t_end: float = 0.25,
    kappa: float = 1.0,
    alpha: float = 1.5,
    dt: float = 1.0 / 64.0,
    sigma: float = 0.5,
) -> list[float]:
    """Sup-norm error of each coarse run against the finest, on shared modes.

    The same fixed dt is used at every resolution so the comparison isolates
    the spatial discretization. sigma = 0.5 keeps the data's spectrum wide
    enough that the coarse truncation errors sit well above roundoff.
    """
    params = ModelParams(variant=Variant.THETA_FORM, kappa=kappa, alpha=alpha)
    steps = round(t_end / dt)
    if abs(steps * dt - t_end) > 1e-12:
        raise ValueError("t_end must be an integer multiple of dt")
    sols = []
    for n in ns:
        state = _advance(_study_state(n, sigma), params, Scheme.IF_RK2, dt, steps)
        sols.append(state)
    fine = sols[-1]
    errors = []
    for n, sol in zip(ns[:-1], sols[:-1]):
        ref_vals = _restrict_spectral(fine, n)
        errors.append(float(np.max(np.abs(sol.theta_plus.values - ref_vals))))
    return errors
