"""Periodic grid and field containers for the 2D pseudo-spectral solver.

The domain is the flat torus [0, L1) x [0, L2) sampled on an n1 x n2 lattice.
Arrays are indexed ``values[i, j]`` with axis 0 along x1 and axis 1 along x2.
Angular wavenumbers follow the signed FFT ordering k = 2*pi*m/L with m =
0, 1, ..., n/2-1, -n/2, ..., -1, so index 0 is exactly k = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True, eq=False)
class Grid2D:
    """Geometry and Fourier bookkeeping for one periodic box.

    Attributes
    ----------
    n1, n2 : int
        Samples per axis; even and >= 8 (the 2/3 dealiasing rule needs
        even counts).
    L1, L2 : float
        Physical side lengths.
    x1, x2 : ndarray
        1D sample coordinates, ``x1[i] = i*L1/n1``.
    k1, k2 : ndarray
        1D signed angular wavenumbers per axis, ``k = 2*pi*m/L``.
    kmag : ndarray
        2D array of |k| on the full product lattice.
    dealias_mask : ndarray of bool
        True where the integer mode index is within the 2/3 band on both
        axes (|m1| <= n1/3 and |m2| <= n2/3).
    nyquist_free : ndarray of bool
        False on the Nyquist lines (m = -n/2 on either axis). Purely
        imaginary (odd) symbols must vanish there to keep real fields
        real: the Nyquist coefficient has no conjugate partner.
    """

    n1: int
    n2: int
    L1: float
    L2: float
    x1: np.ndarray
    x2: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    kmag: np.ndarray
    dealias_mask: np.ndarray
    nyquist_free: np.ndarray

    @property
    def dx1(self) -> float:
        return self.L1 / self.n1

    @property
    def dx2(self) -> float:
        return self.L2 / self.n2

    @property
    def cell_area(self) -> float:
        return self.dx1 * self.dx2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Return broadcastable coordinate arrays (X1, X2), ij-indexed."""
        return np.meshgrid(self.x1, self.x2, indexing="ij")

    def same_geometry(self, other: "Grid2D") -> bool:
        return (
            self.n1 == other.n1
            and self.n2 == other.n2
            and self.L1 == other.L1
            and self.L2 == other.L2
        )


def make_grid(n1: int, n2: int, L1: float, L2: float) -> Grid2D:
    """Build a :class:`Grid2D` for an n1 x n2 sampling of [0,L1) x [0,L2).

    Parameters
    ----------
    n1, n2 : int
        Even sample counts, at least 8 each.
    L1, L2 : float
        Positive box side lengths.

    Raises
    ------
    ValueError
        If a count is odd or below 8, or a length is not positive.
    """
    for name, n in (("n1", n1), ("n2", n2)):
        if n < 8 or n % 2 != 0:
            raise ValueError(f"{name} must be even and >= 8, got {n}")
    for name, L in (("L1", L1), ("L2", L2)):
        if not L > 0:
            raise ValueError(f"{name} must be positive, got {L}")

    x1 = np.arange(n1) * (L1 / n1)
    x2 = np.arange(n2) * (L2 / n2)
    # fftfreq(n, d=dx) * 2*pi gives 2*pi*m/L in signed FFT order.
    k1 = 2.0 * np.pi * np.fft.fftfreq(n1, d=L1 / n1)
    k2 = 2.0 * np.pi * np.fft.fftfreq(n2, d=L2 / n2)

    K1 = k1[:, None]
    K2 = k2[None, :]
    kmag = np.hypot(np.broadcast_to(K1, (n1, n2)), np.broadcast_to(K2, (n1, n2)))

    m1 = np.fft.fftfreq(n1) * n1  # integer mode indices
    m2 = np.fft.fftfreq(n2) * n2
    keep1 = np.abs(m1) <= n1 / 3.0
    keep2 = np.abs(m2) <= n2 / 3.0
    dealias_mask = keep1[:, None] & keep2[None, :]

    nyq1 = m1 == -(n1 // 2)
    nyq2 = m2 == -(n2 // 2)
    nyquist_free = ~(nyq1[:, None] | nyq2[None, :])

    return Grid2D(
        n1=n1,
        n2=n2,
        L1=float(L1),
        L2=float(L2),
        x1=x1,
        x2=x2,
        k1=k1,
        k2=k2,
        kmag=kmag,
        dealias_mask=dealias_mask,
        nyquist_free=nyquist_free,
    )


@dataclass(frozen=True, eq=False)
class RealField2D:
    """Physical-space samples of a real scalar field on a :class:`Grid2D`."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )

    def validate_finite(self) -> None:
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite samples")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class SpectralField2D:
    """Fourier coefficients in the same index layout as the wavenumber tables."""

    grid: Grid2D
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != self.grid.shape:
            raise ValueError(
                f"coefficient shape {self.coeffs.shape} does not match grid {self.grid.shape}"
            )

    def hermitian_residue(self) -> float:
        """Relative deviation from coeff(-k) = conj(coeff(k)); 0 for real fields."""
        flipped = np.conj(self.coeffs[_negation_index(self.grid.n1)][:, _negation_index(self.grid.n2)])
        scale = float(np.max(np.abs(self.coeffs)))
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.coeffs - flipped)) / scale)


def _negation_index(n: int) -> np.ndarray:
    # index map m -> -m mod n (Nyquist maps to itself)
    return (-np.arange(n)) % n


def sample_field(grid: Grid2D, func: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> RealField2D:
    """Sample ``func(X1, X2)`` on the grid and wrap it as a RealField2D."""
    X1, X2 = grid.mesh()
    vals = np.asarray(func(X1, X2), dtype=float)
    return RealField2D(grid, vals)


def zeros_like_field(grid: Grid2D) -> RealField2D:
    return RealField2D(grid, np.zeros(grid.shape))
