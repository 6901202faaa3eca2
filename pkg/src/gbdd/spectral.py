"""Fourier-multiplier operators on periodic 2D fields.

All operators are diagonal in the Fourier basis. Under the numpy transform
convention (forward kernel e^{-i k.x}) the derivative d/dx_j has symbol
i*k_j, so the composite velocity symbols are:

    RieszSq   (d1/|D|)^2 (d2/|D|)^2          ->  k1^2 k2^2 / |k|^4   (real, even)
    VelTheta  R1 R2^2 |D|^{-1}               -> -i k1 k2^2 / |k|^4   (odd)
    SQGu1     -R2 = -d2/|D|                  -> -i k2 / |k|          (odd)
    SQGu2      R1 =  d1/|D|                  ->  i k1 / |k|          (odd)
    InvD1     d1^{-1} on rows with k1 != 0   ->  1/(i k1)            (odd)

Every symbol is 0 at k = 0. Odd (purely imaginary) symbols are also zeroed
on the Nyquist lines: a real field's Nyquist coefficient has no conjugate
partner, so a nonzero imaginary multiplier there would leak an imaginary
part into physical space. The identity VelTheta = RieszSq o InvD1 holds on
the retained modes.
"""

from __future__ import annotations

import enum

import numpy as np

from .grid import Grid2D, RealField2D, SpectralField2D


class SymbolId(enum.Enum):
    RIESZ_SQ = "RieszSq"
    VEL_THETA = "VelTheta"
    SQG_U1 = "SQGu1"
    SQG_U2 = "SQGu2"
    INV_D1 = "InvD1"


class NumpyTransformProvider:
    """Default transform provider built on numpy's FFT.

    Stateless, hence safe to share across threads. A provider that owns
    scratch buffers or plans must be confined to one concurrent lane;
    create one provider per lane in that case.
    """

    def forward(self, values: np.ndarray) -> np.ndarray:
        return np.fft.fft2(values)

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        return np.fft.ifft2(coeffs)


_DEFAULT_PROVIDER = NumpyTransformProvider()


def to_spectral(f: RealField2D, provider=None) -> SpectralField2D:
    provider = provider or _DEFAULT_PROVIDER
    return SpectralField2D(f.grid, provider.forward(f.values))


def to_physical(fhat: SpectralField2D, provider=None) -> RealField2D:
    provider = provider or _DEFAULT_PROVIDER
    return RealField2D(fhat.grid, provider.inverse(fhat.coeffs).real)


def to_spectral_array(grid: Grid2D, values: np.ndarray, provider=None) -> np.ndarray:
    """Array-level forward transform for internal hot paths."""
    provider = provider or _DEFAULT_PROVIDER
    return provider.forward(values)


def to_physical_array(grid: Grid2D, coeffs: np.ndarray, provider=None) -> np.ndarray:
    """Array-level inverse transform; drops the roundoff imaginary part."""
    provider = provider or _DEFAULT_PROVIDER
    return provider.inverse(coeffs).real


def dealias_mask_multiply(grid: Grid2D, coeffs: np.ndarray) -> np.ndarray:
    """Array-level 2/3-rule projection."""
    return np.where(grid.dealias_mask, coeffs, 0.0)


def imaginary_residue(fhat: SpectralField2D, provider=None) -> float:
    """Max |imaginary part| left by the inverse transform (closure check)."""
    provider = provider or _DEFAULT_PROVIDER
    return float(np.max(np.abs(provider.inverse(fhat.coeffs).imag)))


def symbol_array(grid: Grid2D, sym: SymbolId) -> np.ndarray:
    """Complex multiplier table for ``sym`` on the grid's wavenumber lattice."""
    K1 = grid.k1[:, None]
    K2 = grid.k2[None, :]
    k2mag = K1 * K1 + K2 * K2
    with np.errstate(divide="ignore", invalid="ignore"):
        if sym is SymbolId.RIESZ_SQ:
            out = (K1 * K1) * (K2 * K2) / (k2mag * k2mag)
            out = np.where(k2mag > 0.0, out, 0.0).astype(complex)
        elif sym is SymbolId.VEL_THETA:
            out = np.where(k2mag > 0.0, -1j * K1 * (K2 * K2) / (k2mag * k2mag), 0.0)
        elif sym is SymbolId.SQG_U1:
            out = np.where(k2mag > 0.0, -1j * K2 / np.sqrt(k2mag), 0.0)
        elif sym is SymbolId.SQG_U2:
            out = np.where(k2mag > 0.0, 1j * K1 / np.sqrt(k2mag), 0.0)
        elif sym is SymbolId.INV_D1:
            out = np.where(K1 != 0.0, 1.0 / (1j * K1), 0.0)
            out = np.broadcast_to(out, grid.shape).copy()
        else:  # pragma: no cover
            raise ValueError(f"unknown symbol {sym}")
    if sym is not SymbolId.RIESZ_SQ:
        out = np.where(grid.nyquist_free, out, 0.0)
    return out


def apply_multiplier(f: RealField2D, sym: SymbolId, provider=None) -> RealField2D:
    fhat = to_spectral(f, provider)
    out = SpectralField2D(f.grid, fhat.coeffs * symbol_array(f.grid, sym))
    return to_physical(out, provider)


def apply_fractional_laplacian(f: RealField2D, alpha: float, provider=None) -> RealField2D:
    """|D|^alpha f via the multiplier |k|^alpha; the zero mode maps to 0."""
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    fhat = to_spectral(f, provider)
    return to_physical(SpectralField2D(f.grid, fhat.coeffs * f.grid.kmag**alpha), provider)


def semigroup_factor(grid: Grid2D, t: float, kappa: float, alpha: float) -> np.ndarray:
    """Diagonal factor exp(-kappa * t * |k|^alpha); the zero mode factor is 1."""
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    if kappa < 0.0:
        raise ValueError(f"kappa must be >= 0, got {kappa}")
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    return np.exp(-kappa * t * grid.kmag**alpha)


def fractional_semigroup(
    f: RealField2D, t: float, kappa: float, alpha: float, provider=None
) -> RealField2D:
    """Exact heat flow e^{-kappa t |D|^alpha} f."""
    fhat = to_spectral(f, provider)
    fac = semigroup_factor(f.grid, t, kappa, alpha)
    return to_physical(SpectralField2D(f.grid, fhat.coeffs * fac), provider)


def derivative_factor(grid: Grid2D, axis: int) -> np.ndarray:
    """Spectral d/dx_axis factor i*k (odd symbol, Nyquist line zeroed)."""
    if axis == 0:
        ik = 1j * grid.k1[:, None]
    elif axis == 1:
        ik = 1j * grid.k2[None, :]
    else:
        raise ValueError(f"axis must be 0 or 1, got {axis}")
    return np.where(grid.nyquist_free, np.broadcast_to(ik, grid.shape), 0.0)


def spectral_derivative(f: RealField2D, axis: int, provider=None) -> RealField2D:
    fhat = to_spectral(f, provider)
    return to_physical(SpectralField2D(f.grid, fhat.coeffs * derivative_factor(f.grid, axis)), provider)


def dealias(fhat: SpectralField2D) -> SpectralField2D:
    """Zero every coefficient outside the 2/3 band (|m| > n/3 on either axis)."""
    return SpectralField2D(fhat.grid, np.where(fhat.grid.dealias_mask, fhat.coeffs, 0.0))


def dyadic_block_mask(grid: Grid2D, j: int) -> np.ndarray:
    """Sharp-annulus membership: |k| < 1 for j = -1, else 2^j <= |k| < 2^{j+1}."""
    if j < -1:
        raise ValueError(f"dyadic index must be >= -1, got {j}")
    if j == -1:
        return grid.kmag < 1.0
    return (grid.kmag >= 2.0**j) & (grid.kmag < 2.0 ** (j + 1))


def dyadic_block(f: RealField2D, j: int, provider=None) -> RealField2D:
    """Project onto the sharp dyadic annulus j; the blocks sum back to f."""
    fhat = to_spectral(f, provider)
    mask = dyadic_block_mask(f.grid, j)
    return to_physical(SpectralField2D(f.grid, np.where(mask, fhat.coeffs, 0.0)), provider)


def max_dyadic_j(grid: Grid2D) -> int:
    """Largest j with a nonempty annulus on this grid."""
    kmax = float(grid.kmag.max())
    if kmax < 1.0:
        return -1
    return int(np.floor(np.log2(kmax)))


def l2_norm_spectral(fhat: SpectralField2D) -> float:
    """Physical L2 norm computed from coefficients (Parseval)."""
    g = fhat.grid
    scale = np.sqrt(g.L1 * g.L2) / (g.n1 * g.n2)
    return float(scale * np.linalg.norm(fhat.coeffs))
