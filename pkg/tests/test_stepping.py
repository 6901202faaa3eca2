"""Integrating-factor stepper and successive-approximation checks."""

import numpy as np
import pytest

from gbdd.grid import RealField2D, make_grid, sample_field, zeros_like_field
from gbdd.model import (
    DensityState,
    InitKind,
    ModelParams,
    Variant,
    init_data,
    velocity_from_theta,
)
from gbdd.spectral import fractional_semigroup
from gbdd.stepping import (
    PicardTrace,
    Scheme,
    StepNaNError,
    StepperConfig,
    cfl_dt,
    picard_solve,
    step,
)


def _theta_params(kappa=1.0, alpha=1.5):
    return ModelParams(variant=Variant.THETA_FORM, kappa=kappa, alpha=alpha)


def test_stepper_config_validation():
    with pytest.raises(ValueError):
        StepperConfig(dt=-0.1)
    with pytest.raises(ValueError):
        StepperConfig(dt=0.0, cfl=0.0)
    with pytest.raises(ValueError):
        StepperConfig(dt=0.0, cfl=1.5)
    with pytest.raises(ValueError):
        StepperConfig(t_end=-1.0)
    StepperConfig(dt=0.1, cfl=2.0)  # cfl unused once dt is pinned


def test_cfl_quiescent_hits_cap(grid64):
    st = DensityState(zeros_like_field(grid64), zeros_like_field(grid64))
    dt = cfl_dt(st, _theta_params(), StepperConfig(cfl=0.5))
    assert dt == pytest.approx(0.5 * grid64.dx1, rel=1e-12)


def _state_with_umax(n, L, umax):
    g = make_grid(n, n, L, L)
    st = init_data(InitKind.SINGLE_MODE, g, amplitude=1.0, mode=(1, 1))
    u0 = velocity_from_theta(st).max_abs()
    scale = umax / u0
    return DensityState(
        RealField2D(g, scale * st.theta_plus.values), zeros_like_field(g)
    )


def test_cfl_advective_value():
    # dx1 = 6.4/64 = 0.1, umax = 2, cfl = 0.5 -> dt = 0.5 * 0.1/2 = 0.025
    st = _state_with_umax(64, 6.4, 2.0)
    dt = cfl_dt(st, _theta_params(), StepperConfig(cfl=0.5))
    assert dt == pytest.approx(0.025, rel=1e-12)


def test_cfl_halves_with_resolution():
    coarse = cfl_dt(_state_with_umax(64, 6.4, 2.0), _theta_params(), StepperConfig(cfl=0.5))
    fine = cfl_dt(_state_with_umax(128, 6.4, 2.0), _theta_params(), StepperConfig(cfl=0.5))
    assert fine == pytest.approx(coarse / 2, rel=1e-12)


@pytest.mark.parametrize("scheme", list(Scheme))
def test_linear_step_is_exact_semigroup(grid64, scheme, rng):
    vals = rng.standard_normal(grid64.shape)
    st = DensityState(RealField2D(grid64, vals), zeros_like_field(grid64))
    cfg = StepperConfig(scheme=scheme, dt=0.1, nonlinear=False)
    out = step(st, _theta_params(kappa=1.0, alpha=1.0), cfg)
    want = fractional_semigroup(st.theta_plus, 0.1, 1.0, 1.0)
    assert np.max(np.abs(out.theta_plus.values - want.values)) <= 1e-14 * np.abs(vals).max()
    assert out.t == pytest.approx(0.1)


def test_linear_step_single_mode_decay(grid64):
    # sin(2 x1), |k| = 2, kappa=1, alpha=1, dt=0.1 -> factor e^{-0.2}
    st = DensityState(
        sample_field(grid64, lambda X1, X2: np.sin(2 * X1)), zeros_like_field(grid64)
    )
    cfg = StepperConfig(scheme=Scheme.IF_RK4, dt=0.1, nonlinear=False)
    out = step(st, _theta_params(kappa=1.0, alpha=1.0), cfg)
    want = np.exp(-0.2) * st.theta_plus.values
    assert np.max(np.abs(out.theta_plus.values - want)) <= 1e-14


@pytest.mark.parametrize("scheme", list(Scheme))
def test_equal_densities_reduce_to_semigroup(grid64, scheme):
    # theta+ = theta- kills the velocity, so even the nonlinear step is exact
    vals = sample_field(grid64, lambda X1, X2: np.exp(np.sin(X1) + np.cos(2 * X2)))
    st = DensityState(vals, RealField2D(grid64, vals.values.copy()))
    cfg = StepperConfig(scheme=scheme, dt=0.05)
    out = step(st, _theta_params(kappa=2.0, alpha=1.5), cfg)
    want = fractional_semigroup(vals, 0.05, 2.0, 1.5)
    assert np.max(np.abs(out.theta_plus.values - want.values)) <= 1e-13 * vals.max_abs()
    assert np.max(np.abs(out.theta_minus.values - want.values)) <= 1e-13 * vals.max_abs()


def test_dt_priority(grid64):
    st = init_data(InitKind.GAUSSIAN_PLUS, grid64, amplitude=1.0, sigma=0.6)
    cfg = StepperConfig(dt=0.01)
    assert step(st, _theta_params(), cfg).t == pytest.approx(0.01)
    assert step(st, _theta_params(), cfg, dt=0.002).t == pytest.approx(0.002)


def test_l2_non_increase_full_dynamics():
    g = make_grid(32, 32, 8 * np.pi, 8 * np.pi)
    st = init_data(InitKind.TWO_BUMPS, g, amplitude=1.0, sigma=2.0)
    params = _theta_params(kappa=1.0, alpha=1.5)
    cfg = StepperConfig(scheme=Scheme.IF_RK2, dt=0.02)
    l2 = np.sqrt(g.cell_area * (st.theta_plus.values**2 + st.theta_minus.values**2).sum())
    for _ in range(5):
        st = step(st, params, cfg)
        l2_new = np.sqrt(
            g.cell_area * (st.theta_plus.values**2 + st.theta_minus.values**2).sum()
        )
        assert l2_new <= l2 * (1 + 1e-10)
        l2 = l2_new


def test_step_nan_raises():
    g = make_grid(32, 32, 2 * np.pi, 2 * np.pi)
    st = init_data(InitKind.SINGLE_MODE, g, amplitude=1e200)
    cfg = StepperConfig(scheme=Scheme.IF_EULER, dt=1.0)
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(StepNaNError) as exc:
            step(st, _theta_params(kappa=0.0, alpha=1.0), cfg)
    assert exc.value.t == pytest.approx(1.0)


def test_sqg_variants_leave_minus_untouched(grid64):
    rho = sample_field(grid64, lambda X1, X2: np.cos(X1) + 0.3 * np.sin(X2 + X1))
    marker = sample_field(grid64, lambda X1, X2: np.cos(3 * X2))
    st = DensityState(rho, marker)
    params = ModelParams(variant=Variant.SQG_REDUCED, kappa=1.0, alpha=1.5)
    out = step(st, params, StepperConfig(dt=0.05))
    # unit factor and zero tendency: only transform round-trip noise remains
    assert np.max(np.abs(out.theta_minus.values - marker.values)) <= 1e-14
    assert np.max(np.abs(out.theta_plus.values - rho.values)) > 1e-4


# ---------------------------------------------------------------------------
# successive approximation


def _small_state():
    g = make_grid(32, 32, 8 * np.pi, 8 * np.pi)
    return init_data(InitKind.GAUSSIAN_PLUS, g, amplitude=0.1, sigma=1.0)


def test_picard_zero_data_stays_zero(grid64):
    st = DensityState(zeros_like_field(grid64), zeros_like_field(grid64))
    trace = picard_solve(st, _theta_params(), T=0.1, n_iters=3, p=1.5, n_steps=4)
    assert trace.deltas == [0.0, 0.0, 0.0]
    assert all(it.theta_plus.max_abs() == 0.0 for it in trace.iterates)


def test_picard_contracts_on_small_data():
    trace = picard_solve(
        _small_state(), _theta_params(), T=0.05, n_iters=4, p=1.5, n_steps=8
    )
    assert len(trace.iterates) == 5
    assert len(trace.deltas) == 4
    assert not trace.diverged
    assert trace.iterates[-1].t == pytest.approx(0.05)
    for prev, cur in zip(trace.deltas, trace.deltas[1:]):
        if prev > 1e-14:  # below that the two paths sit in roundoff
            assert cur <= 0.9 * prev


def test_picard_limit_matches_direct_stepper():
    params = _theta_params()
    trace = picard_solve(_small_state(), params, T=0.05, n_iters=3, p=1.5, n_steps=8)
    st = _small_state()
    cfg = StepperConfig(scheme=Scheme.IF_RK2, dt=0.05 / 8)
    for _ in range(8):
        st = step(st, params, cfg)
    lim = trace.iterates[-1]
    diff = max(
        np.max(np.abs(lim.theta_plus.values - st.theta_plus.values)),
        np.max(np.abs(lim.theta_minus.values - st.theta_minus.values)),
    )
    assert diff <= 1e-12


def test_picard_validation():
    st = _small_state()
    with pytest.raises(ValueError):
        picard_solve(st, _theta_params(), T=0.0, n_iters=3, p=1.5)
    with pytest.raises(ValueError):
        picard_solve(st, _theta_params(), T=0.1, n_iters=1, p=1.5)
    for bad_p in (1.0, 2.0, 0.5):
        with pytest.raises(ValueError):
            picard_solve(st, _theta_params(), T=0.1, n_iters=3, p=bad_p)


def test_picard_trace_rejects_negative_delta(grid64):
    st = DensityState(zeros_like_field(grid64), zeros_like_field(grid64))
    with pytest.raises(ValueError):
        PicardTrace(iterates=[st], deltas=[-1.0], p=1.5)
