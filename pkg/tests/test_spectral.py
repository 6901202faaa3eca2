"""Multiplier algebra checks, anchored by a hand-rolled 8x8 DFT oracle.

The oracle below recomputes every symbol from its formula and applies it
through explicit double sums, with no np.fft involvement, so a sign error
in the library convention cannot cancel itself out here.
"""

import numpy as np
import pytest

from gbdd.grid import RealField2D, make_grid, sample_field
from gbdd.spectral import (
    SymbolId,
    apply_fractional_laplacian,
    apply_multiplier,
    dealias,
    derivative_factor,
    dyadic_block,
    dyadic_block_mask,
    fractional_semigroup,
    imaginary_residue,
    l2_norm_spectral,
    max_dyadic_j,
    semigroup_factor,
    spectral_derivative,
    symbol_array,
    to_physical,
    to_spectral,
)

ALL_SYMBOLS = list(SymbolId)


def _oracle_symbol(sym, k1, k2, nyq1, nyq2):
    """Symbol value from scratch; odd symbols vanish on unpaired Nyquist lines."""
    ksq = k1 * k1 + k2 * k2
    if ksq == 0.0:
        return 0.0
    odd_zero = nyq1 or nyq2
    if sym is SymbolId.RIESZ_SQ:
        return (k1 * k1) * (k2 * k2) / ksq**2
    if odd_zero:
        return 0.0
    if sym is SymbolId.VEL_THETA:
        return -1j * k1 * k2 * k2 / ksq**2
    if sym is SymbolId.SQG_U1:
        return -1j * k2 / np.sqrt(ksq)
    if sym is SymbolId.SQG_U2:
        return 1j * k1 / np.sqrt(ksq)
    if sym is SymbolId.INV_D1:
        return 0.0 if k1 == 0.0 else 1.0 / (1j * k1)
    raise AssertionError(sym)


def _oracle_apply(values, L1, L2, sym):
    n1, n2 = values.shape
    m1 = np.fft.fftfreq(n1, d=1 / n1).astype(int)
    m2 = np.fft.fftfreq(n2, d=1 / n2).astype(int)
    j1 = np.arange(n1)
    j2 = np.arange(n2)
    out = np.zeros((n1, n2), dtype=complex)
    for a, ma in enumerate(m1):
        for b, mb in enumerate(m2):
            coeff = np.sum(
                values
                * np.exp(-2j * np.pi * (ma * j1[:, None] / n1 + mb * j2[None, :] / n2))
            )
            s = _oracle_symbol(
                sym, 2 * np.pi * ma / L1, 2 * np.pi * mb / L2, ma == -n1 // 2, mb == -n2 // 2
            )
            coeff *= s
            out += coeff * np.exp(
                2j * np.pi * (ma * j1[:, None] / n1 + mb * j2[None, :] / n2)
            )
    return out.real / (n1 * n2)


@pytest.mark.parametrize("sym", ALL_SYMBOLS, ids=lambda s: s.name)
def test_multiplier_matches_direct_dft_oracle(sym, rng):
    g = make_grid(8, 8, 2 * np.pi, 4 * np.pi)
    f = RealField2D(g, rng.standard_normal((8, 8)))
    got = apply_multiplier(f, sym).values
    want = _oracle_apply(f.values, g.L1, g.L2, sym)
    assert np.max(np.abs(got - want)) <= 1e-12 * max(1.0, np.max(np.abs(want)))


def test_vel_theta_frozen_sign(grid64):
    # single-mode value pinned by the DFT oracle: sin(x1+x2) -> -(1/4)cos(x1+x2)
    f = sample_field(grid64, lambda X1, X2: np.sin(X1 + X2))
    got = apply_multiplier(f, SymbolId.VEL_THETA)
    want = sample_field(grid64, lambda X1, X2: -0.25 * np.cos(X1 + X2))
    assert np.max(np.abs(got.values - want.values)) <= 1e-12


def test_riesz_sq_single_modes(grid64):
    f = sample_field(grid64, lambda X1, X2: np.cos(X1 + X2))
    got = apply_multiplier(f, SymbolId.RIESZ_SQ)
    assert np.allclose(got.values, 0.25 * f.values, atol=1e-13)
    g1 = sample_field(grid64, lambda X1, X2: np.cos(X1))
    assert apply_multiplier(g1, SymbolId.RIESZ_SQ).max_abs() <= 1e-13


def _expected_eigenmode(sym, k1, k2, phase, X1, X2):
    ksq = k1 * k1 + k2 * k2
    arg = k1 * X1 + k2 * X2
    cosm, sinm = np.cos(arg), np.sin(arg)
    base = cosm if phase == "cos" else sinm
    if ksq == 0.0:
        return 0.0 * base
    if sym is SymbolId.RIESZ_SQ:
        return (k1 * k1) * (k2 * k2) / ksq**2 * base
    if sym is SymbolId.VEL_THETA:
        h = -k1 * k2 * k2 / ksq**2
    elif sym is SymbolId.SQG_U1:
        h = -k2 / np.sqrt(ksq)
    elif sym is SymbolId.SQG_U2:
        h = k1 / np.sqrt(ksq)
    elif sym is SymbolId.INV_D1:
        h = 0.0 if k1 == 0.0 else -1.0 / k1
    else:
        raise AssertionError(sym)
    # multiplier i*h(k): cos -> -h sin, sin -> h cos
    return -h * sinm if phase == "cos" else h * cosm


def test_eigenmode_exactness_all_symbols(grid64, rng):
    X1, X2 = grid64.mesh()
    modes = [(0, 0), (1, 0), (0, 1)]
    while len(modes) < 20:
        m = (int(rng.integers(-21, 22)), int(rng.integers(-21, 22)))
        modes.append(m)
    for m1, m2 in modes:
        for phase in ("cos", "sin"):
            arg = m1 * X1 + m2 * X2
            f = RealField2D(grid64, np.cos(arg) if phase == "cos" else np.sin(arg))
            for sym in ALL_SYMBOLS:
                got = apply_multiplier(f, sym).values
                want = _expected_eigenmode(sym, float(m1), float(m2), phase, X1, X2)
                assert np.max(np.abs(got - want)) <= 1e-12, (sym, m1, m2, phase)


def test_real_closure(grid64, rng):
    f = RealField2D(grid64, rng.standard_normal(grid64.shape))
    for sym in ALL_SYMBOLS:
        fhat = to_spectral(apply_multiplier(f, sym))
        assert imaginary_residue(fhat) <= 1e-12 * f.max_abs()


def test_round_trip(grid64, rng):
    f = RealField2D(grid64, rng.standard_normal(grid64.shape))
    back = to_physical(to_spectral(f))
    assert np.max(np.abs(back.values - f.values)) <= 1e-12 * f.max_abs()


def test_parseval(grid64, rng):
    f = RealField2D(grid64, rng.standard_normal(grid64.shape))
    phys = np.sqrt(np.sum(f.values**2) * grid64.cell_area)
    spec = l2_norm_spectral(to_spectral(f))
    assert spec == pytest.approx(phys, rel=1e-10)


def test_fractional_laplacian_eigenfunctions(grid64):
    for (m1, m2), alpha in [((1, 0), 1.0), ((2, 1), 1.5), ((3, 4), 0.5)]:
        f = sample_field(grid64, lambda X1, X2: np.sin(m1 * X1 + m2 * X2))
        got = apply_fractional_laplacian(f, alpha)
        lam = (m1 * m1 + m2 * m2) ** (alpha / 2)
        assert np.allclose(got.values, lam * f.values, atol=1e-11 * lam)


def test_fractional_laplacian_alpha_range(grid64):
    f = sample_field(grid64, lambda X1, X2: np.cos(X1))
    with pytest.raises(ValueError):
        apply_fractional_laplacian(f, 0.0)
    with pytest.raises(ValueError):
        apply_fractional_laplacian(f, 2.5)


def test_semigroup_single_mode(grid64):
    f = sample_field(grid64, lambda X1, X2: np.sin(2 * X1))
    out = fractional_semigroup(f, 0.5, 1.0, 1.0)
    assert np.allclose(out.values, np.exp(-1.0) * f.values, atol=1e-14)


def test_semigroup_identity_and_mean(grid64):
    f = sample_field(grid64, lambda X1, X2: 3.0 + 0.0 * X1)
    assert np.allclose(fractional_semigroup(f, 2.0, 1.0, 1.5).values, 3.0, atol=1e-13)
    g = sample_field(grid64, lambda X1, X2: np.cos(X1) + 1.0)
    assert np.allclose(fractional_semigroup(g, 0.0, 1.0, 1.5).values, g.values, atol=1e-14)


def test_semigroup_rejects_negative_time(grid64):
    f = sample_field(grid64, lambda X1, X2: np.cos(X1))
    with pytest.raises(ValueError):
        fractional_semigroup(f, -0.1, 1.0, 1.0)


def test_semigroup_composition(grid64):
    fac_s = semigroup_factor(grid64, 0.3, 1.0, 1.5)
    fac_t = semigroup_factor(grid64, 0.45, 1.0, 1.5)
    fac_st = semigroup_factor(grid64, 0.75, 1.0, 1.5)
    assert np.max(np.abs(fac_s * fac_t - fac_st)) <= 1e-12


def test_derivative_factor_is_nyquist_safe():
    g = make_grid(8, 8, 2 * np.pi, 2 * np.pi)
    d1 = derivative_factor(g, 0)
    assert np.all(d1[4, :] == 0.0)
    f = sample_field(g, lambda X1, X2: np.cos(X1))
    got = spectral_derivative(f, 0)
    want = sample_field(g, lambda X1, X2: -np.sin(X1))
    assert np.allclose(got.values, want.values, atol=1e-13)


def test_spectral_derivative_second_axis(grid64):
    f = sample_field(grid64, lambda X1, X2: np.sin(3 * X2))
    got = spectral_derivative(f, 1)
    want = sample_field(grid64, lambda X1, X2: 3 * np.cos(3 * X2))
    assert np.allclose(got.values, want.values, atol=1e-12)


def test_dealias_rules(grid64):
    fhat = to_spectral(sample_field(grid64, lambda X1, X2: np.cos(X1 + X2)))
    once = dealias(fhat)
    twice = dealias(once)
    assert np.array_equal(once.coeffs, twice.coeffs)
    # mode (1,1) inside the retained band on 64^2
    assert np.max(np.abs(once.coeffs - fhat.coeffs)) <= 1e-12

    g8 = make_grid(8, 8, 2 * np.pi, 2 * np.pi)
    nyq = np.zeros((8, 8), dtype=complex)
    nyq[4, 0] = 1.0
    from gbdd.grid import SpectralField2D

    assert not dealias(SpectralField2D(g8, nyq)).coeffs.any()


def test_dyadic_blocks_annulus_membership(grid64):
    f = sample_field(grid64, lambda X1, X2: np.sin(3 * X1))
    kept = dyadic_block(f, 1)
    assert np.allclose(kept.values, f.values, atol=1e-12)
    assert dyadic_block(f, 2).max_abs() <= 1e-13
    const = sample_field(grid64, lambda X1, X2: 5.0 + 0.0 * X1)
    assert np.allclose(dyadic_block(const, -1).values, 5.0, atol=1e-12)


def test_dyadic_partition_of_unity(grid64, rng):
    coeffs = np.zeros(grid64.shape, dtype=complex)
    idx = rng.integers(-20, 21, size=(30, 2))
    for a, b in idx:
        coeffs[a, b] = rng.standard_normal() + 1j * rng.standard_normal()
    from gbdd.grid import SpectralField2D

    coeffs = coeffs + np.conj(coeffs[tuple(np.meshgrid(-np.arange(64), -np.arange(64), indexing="ij"))])
    f = to_physical(SpectralField2D(grid64, coeffs))
    total = np.zeros(grid64.shape)
    for j in range(-1, max_dyadic_j(grid64) + 1):
        total += dyadic_block(f, j).values
    assert np.max(np.abs(total - f.values)) <= 1e-12 * max(1.0, f.max_abs())


def test_dyadic_masks_are_disjoint(grid64):
    acc = np.zeros(grid64.shape, dtype=int)
    for j in range(-1, max_dyadic_j(grid64) + 1):
        acc += dyadic_block_mask(grid64, j).astype(int)
    assert acc.max() == 1


def test_bernstein_band_l2(grid64, rng):
    # sharp annulus [2^j, 2^{j+1}) forces ||D| f|_2 / (2^j |f|_2) into [1/2, 4)
    for j in (1, 2, 3):
        mask = dyadic_block_mask(grid64, j)
        coeffs = np.where(mask, rng.standard_normal(grid64.shape), 0.0).astype(complex)
        from gbdd.grid import SpectralField2D

        f = to_physical(SpectralField2D(grid64, coeffs))
        f = dyadic_block(f, j)  # re-project to restore Hermitian symmetry
        if f.max_abs() == 0.0:
            continue
        num = l2_norm_spectral(to_spectral(apply_fractional_laplacian(f, 1.0)))
        den = l2_norm_spectral(to_spectral(f))
        ratio = num / (2.0**j * den)
        assert 0.5 <= ratio <= 4.0


def test_symbol_array_zero_mode(grid64):
    for sym in ALL_SYMBOLS:
        assert symbol_array(grid64, sym)[0, 0] == 0.0
