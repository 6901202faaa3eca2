"""Operator spot checks behind the `opcheck` subcommand.

Each check is a cheap, deterministic oracle comparison; the full-strength
versions live in the test suite. Returns (name, passed, detail) triples.
"""

from __future__ import annotations

import math

import numpy as np

from .diagnostics import bernstein_ratio, lebesgue_norm
from .grid import RealField2D, make_grid
from .kernels import dalpha_integral, kernel_value
from .model import (
    DensityState,
    InitKind,
    ModelParams,
    Variant,
    init_data,
    primitive_rho,
    velocity_from_rho,
    velocity_from_theta,
)
from .snapshots import read_snapshot, write_snapshot
from .spectral import (
    SymbolId,
    apply_fractional_laplacian,
    fractional_semigroup,
    spectral_derivative,
    symbol_array,
)
from .stepping import Scheme, StepperConfig, step


def _eigenmode(grid, m1, m2):
    x1, x2 = grid.mesh()
    phase = 2.0 * math.pi * (m1 * x1 / grid.L1 + m2 * x2 / grid.L2)
    return np.cos(phase), np.sin(phase)


def _symbol_value(grid, sym, m1, m2):
    k1 = 2.0 * math.pi * m1 / grid.L1
    k2 = 2.0 * math.pi * m2 / grid.L2
    kk = math.hypot(k1, k2)
    if kk == 0.0:
        return 0.0
    if sym is SymbolId.RIESZ_SQ:
        return (k1 * k2) ** 2 / kk**4
    if sym is SymbolId.VEL_THETA:
        return -1j * k1 * k2**2 / kk**4
    if sym is SymbolId.SQG_U1:
        return -1j * k2 / kk
    if sym is SymbolId.SQG_U2:
        return 1j * k1 / kk
    if sym is SymbolId.INV_D1:
        return 1.0 / (1j * k1) if k1 != 0.0 else 0.0
    raise AssertionError(sym)


def check_symbols(n=64, seed=0, n_modes=20):
    grid = make_grid(n, n, 2.0 * math.pi, 2.0 * math.pi)
    rng = np.random.default_rng(seed)
    worst = 0.0
    half = n // 2
    for _ in range(n_modes):
        m1 = int(rng.integers(-half + 1, half))
        m2 = int(rng.integers(-half + 1, half))
        cosm, sinm = _eigenmode(grid, m1, m2)
        z = cosm + 1j * sinm  # complex exponential mode
        for sym in SymbolId:
            lam = _symbol_value(grid, sym, m1, m2)
            hat = np.fft.fft2(z)
            got = np.fft.ifft2(symbol_array(grid, sym) * hat)
            want = lam * z
            scale = max(np.max(np.abs(want)), 1.0)
            worst = max(worst, float(np.max(np.abs(got - want))) / scale)
    return worst


def run_all(n: int = 64, seed: int = 0):
    results = []
    grid = make_grid(n, n, 2.0 * math.pi, 2.0 * math.pi)
    x1, x2 = grid.mesh()

    worst = check_symbols(n=n, seed=seed)
    results.append(("symbol eigenmodes", worst <= 1e-12, f"worst rel {worst:.2e}"))

    # velocity computed from theta equals velocity computed from the primitive
    rho_vals = np.sin(x1) * np.cos(2.0 * x2) + 0.3 * np.cos(x1 + x2)
    rho = RealField2D(grid, rho_vals)
    theta = spectral_derivative(rho, axis=0)
    zero = RealField2D(grid, np.zeros(grid.shape))
    u_theta = velocity_from_theta(DensityState(theta, zero))
    u_rho = velocity_from_rho(rho, zero)
    dv = float(np.max(np.abs(u_theta.values - u_rho.values)))
    results.append(("velocity theta/rho agreement", dv <= 1e-12, f"sup diff {dv:.2e}"))

    # semigroup on an eigenmode
    cosm, _ = _eigenmode(grid, 3, -2)
    f = RealField2D(grid, cosm)
    kappa, alpha, t = 0.7, 1.5, 0.25
    got = fractional_semigroup(f, t, kappa, alpha).values
    kk = math.hypot(3.0, -2.0)
    want = math.exp(-kappa * t * kk**alpha) * cosm
    ds = float(np.max(np.abs(got - want)))
    results.append(("fractional semigroup eigenmode", ds <= 1e-12, f"sup diff {ds:.2e}"))

    # spectral |D|^alpha against the singular-integral quadrature at one point
    g16 = make_grid(512, 512, 16.0 * math.pi, 16.0 * math.pi)
    xx1, xx2 = g16.mesh()
    c0 = (8.0 * math.pi, 8.0 * math.pi)
    gf = np.exp(-(((xx1 - c0[0]) ** 2) + (xx2 - c0[1]) ** 2) / (2.0 * 0.5**2))
    gfield = RealField2D(g16, gf)
    spec = apply_fractional_laplacian(gfield, 1.0).values
    idx = (256, 256)
    point = (float(xx1[idx]), float(xx2[idx]))

    def gauss(pts):
        pts = np.asarray(pts)
        return np.exp(
            -((pts[..., 0] - c0[0]) ** 2 + (pts[..., 1] - c0[1]) ** 2) / 0.5
        )

    val = dalpha_integral(gauss, point, 1.0, r=0.5)
    rel = abs(spec[idx] - val) / abs(val)
    results.append(
        ("|D|^1 spectral vs singular integral", rel <= 1e-3, f"rel {rel:.2e}")
    )

    # kernel closed form at alpha = 2
    kv, kerr = kernel_value(2.0, 1.0)
    want_k = math.exp(-0.25) / (4.0 * math.pi)
    relk = abs(kv - want_k) / want_k
    results.append(("heat kernel closed form", relk <= 1e-8, f"rel {relk:.2e}"))

    # primitive round trip (reconstruct returns the density, not the primitive)
    theta_state = init_data(InitKind.GAUSSIAN_PLUS, grid, amplitude=1.0, sigma=0.5)
    # the primitive inverts the derivative only off the Nyquist lines; at
    # small n the Gaussian carries real content there, so project it out
    hat = np.fft.fft2(theta_state.theta_plus.values)
    clean = RealField2D(grid, np.fft.ifft2(np.where(grid.nyquist_free, hat, 0.0)).real)
    theta_state = DensityState(clean, zero)
    dec = primitive_rho(theta_state)
    rec = dec.reconstruct("plus")
    dp = float(np.max(np.abs(rec.values - theta_state.theta_plus.values)))
    results.append(("primitive round trip", dp <= 1e-10, f"sup diff {dp:.2e}"))

    # snapshot byte round trip
    buf_path = "/tmp/gbdd_opcheck_snap.gbds"
    write_snapshot(buf_path, theta_state)
    back = read_snapshot(buf_path)
    same = np.array_equal(back.theta_plus.values, theta_state.theta_plus.values)
    results.append(("snapshot round trip", bool(same), "bit-exact" if same else "mismatch"))

    # one dissipative step cannot grow L2
    params = ModelParams(variant=Variant.THETA_FORM, kappa=1.0, alpha=1.5)
    cfg = StepperConfig(scheme=Scheme.IF_RK2, dt=1e-2, t_end=1e-2)
    stepped = step(theta_state, params, cfg, dt=1e-2)
    l2_0 = lebesgue_norm(theta_state.theta_plus, 2.0)
    l2_1 = lebesgue_norm(stepped.theta_plus, 2.0)
    results.append(
        ("L2 non-increase under dissipation", l2_1 <= l2_0 * (1.0 + 1e-12),
         f"{l2_0:.6g} -> {l2_1:.6g}")
    )

    # Bernstein ratio is exactly 1 when the eigenmode sits at |k| = 2^j:
    # mode (2,0) at the bottom edge of block j=1
    eig = RealField2D(grid, np.cos(2.0 * x1))
    br = bernstein_ratio(eig, j=1, k=1, p=2.0, q=2.0)
    results.append(("Bernstein eigenmode ratio", abs(br - 1.0) <= 1e-10, f"{br:.12f}"))

    return results
