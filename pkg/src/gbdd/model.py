"""State, velocity laws, and tendency assembly for the density transport system.

The two signed densities evolve on a periodic box under a shear-type velocity
that depends nonlocally on the densities themselves, plus fractional
dissipation. Several variants of the coupling are provided:

* ``THETA_FORM``: conservative transport of the densities by
  u1 = (multiplier VEL_THETA applied to theta_plus - theta_minus), u2 = 0.
* ``RHO_FORM``: non-conservative transport of the primitives by
  u1 = (multiplier RIESZ_SQ applied to rho_plus - rho_minus), u2 = 0.
* ``SQG_REDUCED``: single active scalar, same shear velocity law, u.grad form.
* ``SQG_TRUE``: single active scalar with the rotational velocity
  u = (-R2 rho, R1 rho).
* ``GENERALIZED_THETA``: as THETA_FORM but with independent dissipation
  exponents for the two densities.

Single-scalar variants keep the scalar in the ``theta_plus`` slot and leave
``theta_minus`` untouched, so every variant steps through the same interface.

Products are dealiased on both factors (2/3 rule), formed in physical space,
then the result is differentiated spectrally where required and dealiased
again; this removes the quadratic aliasing the conservative form would
otherwise inject at the grid scale.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .grid import Grid2D, RealField2D
from .spectral import (
    SymbolId,
    apply_fractional_laplacian,
    dealias_mask_multiply,
    derivative_factor,
    symbol_array,
    to_physical_array,
    to_spectral_array,
)


class Variant(Enum):
    THETA_FORM = "ThetaForm"
    RHO_FORM = "RhoForm"
    SQG_REDUCED = "SQGReduced"
    SQG_TRUE = "SQGTrue"
    GENERALIZED_THETA = "GeneralizedTheta"


_SINGLE_FIELD = (Variant.SQG_REDUCED, Variant.SQG_TRUE)


@dataclass(frozen=True)
class ModelParams:
    """Variant selector plus dissipation parameters.

    ``beta`` is the dissipation exponent of the minus density and is read
    only by ``GENERALIZED_THETA``; every other variant dissipates both
    densities with ``alpha``.
    """

    variant: Variant
    kappa: float = 0.0
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.kappa < 0.0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not 0.0 < self.beta <= 2.0:
            raise ValueError(f"beta must lie in (0, 2], got {self.beta}")
        if self.variant is Variant.GENERALIZED_THETA and self.alpha == self.beta:
            warnings.warn(
                "equal dissipation exponents: GeneralizedTheta degenerates "
                "to the plain two-density form",
                UserWarning,
                stacklevel=2,
            )

    @property
    def degenerate(self) -> bool:
        return self.variant is Variant.GENERALIZED_THETA and self.alpha == self.beta

    def exponent_minus(self) -> float:
        if self.variant is Variant.GENERALIZED_THETA:
            return self.beta
        return self.alpha


@dataclass
class DensityState:
    """Pair of density fields at a common time.

    Positivity of the data is tracked, never enforced: ``min_values`` exposes
    the current minima as a diagnostic.
    """

    theta_plus: RealField2D
    theta_minus: RealField2D
    t: float = 0.0

    def __post_init__(self):
        if not self.theta_plus.grid.same_geometry(self.theta_minus.grid):
            raise ValueError("density fields must share one grid")
        self.theta_plus.validate_finite()
        self.theta_minus.validate_finite()

    @property
    def grid(self) -> Grid2D:
        return self.theta_plus.grid

    def min_values(self) -> tuple[float, float]:
        return float(self.theta_plus.values.min()), float(self.theta_minus.values.min())

    def copy(self) -> "DensityState":
        return DensityState(
            theta_plus=RealField2D(self.grid, self.theta_plus.values.copy()),
            theta_minus=RealField2D(self.grid, self.theta_minus.values.copy()),
            t=self.t,
        )


# ---------------------------------------------------------------------------
# velocity laws


def velocity_hat(grid: Grid2D, hat_plus, hat_minus, variant: Variant):
    """Spectral velocity components for a variant; tuple of coefficient arrays.

    Shear variants return a 1-tuple (u1_hat,), the rotational variant a
    2-tuple (u1_hat, u2_hat).
    """
    if variant in (Variant.THETA_FORM, Variant.GENERALIZED_THETA):
        diff = hat_plus - hat_minus
        return (symbol_array(grid, SymbolId.VEL_THETA) * diff,)
    if variant is Variant.RHO_FORM:
        diff = hat_plus - hat_minus
        return (symbol_array(grid, SymbolId.RIESZ_SQ) * diff,)
    if variant is Variant.SQG_REDUCED:
        return (symbol_array(grid, SymbolId.RIESZ_SQ) * hat_plus,)
    if variant is Variant.SQG_TRUE:
        return (
            symbol_array(grid, SymbolId.SQG_U1) * hat_plus,
            symbol_array(grid, SymbolId.SQG_U2) * hat_plus,
        )
    raise ValueError(f"unknown variant {variant!r}")


def velocity_from_theta(state: DensityState) -> RealField2D:
    """u1 for the two-density conservative variant (u2 is identically zero)."""
    grid = state.grid
    (u1_hat,) = velocity_hat(
        grid,
        to_spectral_array(grid, state.theta_plus.values),
        to_spectral_array(grid, state.theta_minus.values),
        Variant.THETA_FORM,
    )
    return RealField2D(grid, to_physical_array(grid, u1_hat))


def velocity_from_rho(rho_plus: RealField2D, rho_minus: RealField2D) -> RealField2D:
    """u1 for the primitive-variable variant (u2 is identically zero)."""
    if not rho_plus.grid.same_geometry(rho_minus.grid):
        raise ValueError("primitive fields must share one grid")
    grid = rho_plus.grid
    (u1_hat,) = velocity_hat(
        grid,
        to_spectral_array(grid, rho_plus.values),
        to_spectral_array(grid, rho_minus.values),
        Variant.RHO_FORM,
    )
    return RealField2D(grid, to_physical_array(grid, u1_hat))


# ---------------------------------------------------------------------------
# nonlinear transport


def _dealias_to_physical(grid: Grid2D, hat):
    return to_physical_array(grid, dealias_mask_multiply(grid, hat))


def transport_hat(grid: Grid2D, hat_plus, hat_minus, u_hats, params: ModelParams):
    """Spectral advection tendencies (no dissipation) for frozen velocities.

    Keeping the velocities an explicit argument lets an iteration scheme
    freeze them between passes; the direct solver just feeds the velocities
    computed from the same coefficients.
    """
    variant = params.variant
    ik1 = derivative_factor(grid, 0)

    if variant in (Variant.THETA_FORM, Variant.GENERALIZED_THETA):
        u1 = _dealias_to_physical(grid, u_hats[0])
        out = []
        for sign, hat in ((-1.0, hat_plus), (1.0, hat_minus)):
            prod = u1 * _dealias_to_physical(grid, hat)
            flux_hat = ik1 * to_spectral_array(grid, prod)
            out.append(sign * dealias_mask_multiply(grid, flux_hat))
        return out[0], out[1]

    if variant is Variant.RHO_FORM:
        u1 = _dealias_to_physical(grid, u_hats[0])
        out = []
        for sign, hat in ((-1.0, hat_plus), (1.0, hat_minus)):
            d1 = _dealias_to_physical(grid, ik1 * hat)
            out.append(sign * dealias_mask_multiply(grid, to_spectral_array(grid, u1 * d1)))
        return out[0], out[1]

    if variant in _SINGLE_FIELD:
        adv = np.zeros_like(u_hats[0].real)
        for axis, u_hat in enumerate(u_hats):
            u = _dealias_to_physical(grid, u_hat)
            dh = _dealias_to_physical(grid, derivative_factor(grid, axis) * hat_plus)
            adv = adv + u * dh
        tend = -dealias_mask_multiply(grid, to_spectral_array(grid, adv))
        return tend, np.zeros_like(tend)

    raise ValueError(f"unknown variant {variant!r}")


def rhs(state: DensityState, params: ModelParams) -> tuple[RealField2D, RealField2D]:
    """Full tendencies (transport plus dissipation) of both densities."""
    grid = state.grid
    hat_plus = to_spectral_array(grid, state.theta_plus.values)
    hat_minus = to_spectral_array(grid, state.theta_minus.values)
    u_hats = velocity_hat(grid, hat_plus, hat_minus, params.variant)
    adv_plus, adv_minus = transport_hat(grid, hat_plus, hat_minus, u_hats, params)
    kmag_a = grid.kmag**params.alpha
    tend_plus = adv_plus - params.kappa * kmag_a * hat_plus
    if params.variant in _SINGLE_FIELD:
        tend_minus = adv_minus
    else:
        kmag_b = (
            kmag_a
            if params.exponent_minus() == params.alpha
            else grid.kmag ** params.exponent_minus()
        )
        tend_minus = adv_minus - params.kappa * kmag_b * hat_minus
    return (
        RealField2D(grid, to_physical_array(grid, tend_plus)),
        RealField2D(grid, to_physical_array(grid, tend_minus)),
    )


def rhs_sqg(rho: RealField2D, params: ModelParams) -> RealField2D:
    """Tendency of the single-scalar variants."""
    if params.variant not in _SINGLE_FIELD:
        raise ValueError(f"rhs_sqg requires a single-scalar variant, got {params.variant!r}")
    grid = rho.grid
    zero = RealField2D(grid, np.zeros(grid.shape))
    state = DensityState(theta_plus=rho, theta_minus=zero)
    tend, _ = rhs(state, params)
    return tend


# ---------------------------------------------------------------------------
# primitives on the torus


@dataclass
class RhoDecomposition:
    """Torus-correct primitive of a density pair.

    A whole-line primitive of a non-negative density does not exist
    periodically; what does exist is the split

        theta = d/dx1 (periodic part) + (row mass)/L1,

    with the periodic part mean-free on every row. ``row_mass`` carries the
    per-row integral of theta over x1.

    The split inverts d/dx1 exactly on the Nyquist-free subspace; content on
    the unpaired m = -n/2 lines has no real-valued antiderivative mode and is
    dropped (it is far outside the 2/3 dealias band, so solver states never
    carry meaningful energy there).
    """

    rho_periodic_plus: RealField2D
    rho_periodic_minus: RealField2D
    row_mass_plus: np.ndarray
    row_mass_minus: np.ndarray

    def reconstruct(self, side: str) -> RealField2D:
        if side == "plus":
            per, mass = self.rho_periodic_plus, self.row_mass_plus
        elif side == "minus":
            per, mass = self.rho_periodic_minus, self.row_mass_minus
        else:
            raise ValueError("side must be 'plus' or 'minus'")
        grid = per.grid
        dper = to_physical_array(
            grid, derivative_factor(grid, 0) * to_spectral_array(grid, per.values)
        )
        return RealField2D(grid, dper + mass[None, :] / grid.L1)


def _primitive_one(grid: Grid2D, values):
    row_mean = values.mean(axis=0)
    hat = to_spectral_array(grid, values - row_mean[None, :])
    per = to_physical_array(grid, symbol_array(grid, SymbolId.INV_D1) * hat)
    return RealField2D(grid, per), row_mean * grid.L1


def primitive_rho(state: DensityState) -> RhoDecomposition:
    """Split both densities into periodic primitives plus row masses."""
    grid = state.grid
    per_p, mass_p = _primitive_one(grid, state.theta_plus.values)
    per_m, mass_m = _primitive_one(grid, state.theta_minus.values)
    dec = RhoDecomposition(
        rho_periodic_plus=per_p,
        rho_periodic_minus=per_m,
        row_mass_plus=mass_p,
        row_mass_minus=mass_m,
    )
    for side, field in (("plus", state.theta_plus), ("minus", state.theta_minus)):
        # reconstruction must reproduce the invertible (Nyquist-free) part
        row_mean = field.values.mean(axis=0)
        centered_hat = to_spectral_array(grid, field.values - row_mean[None, :])
        target = row_mean[None, :] + to_physical_array(
            grid, np.where(grid.nyquist_free, centered_hat, 0.0)
        )
        err = np.max(np.abs(dec.reconstruct(side).values - target))
        scale = max(field.max_abs(), 1.0)
        if err > 1e-10 * scale:
            raise AssertionError(f"primitive reconstruction off by {err:.3e} on {side}")
    return dec


# ---------------------------------------------------------------------------
# initial data


class InitKind(Enum):
    SEPARABLE_GAUSSIAN = "SeparableGaussian"
    GAUSSIAN_PLUS = "GaussianPlus"
    TWO_BUMPS = "TwoBumps"
    SINGLE_MODE = "SingleMode"
    FROM_SNAPSHOT = "FromSnapshot"


_POSITIVE_KINDS = (
    InitKind.SEPARABLE_GAUSSIAN,
    InitKind.GAUSSIAN_PLUS,
    InitKind.TWO_BUMPS,
)


def _periodic_gaussian_1d(x, center, sigma, L):
    # +-1 image wrap keeps the profile C^inf across the seam; further images
    # are below double precision for any sigma < L/6
    acc = np.zeros_like(x)
    for shift in (-L, 0.0, L):
        acc += np.exp(-((x - center - shift) ** 2) / (2.0 * sigma * sigma))
    return acc


def _compact_bump(r2):
    # exp(1 - 1/(1 - s^2)) on s^2 < 1, identically zero outside
    out = np.zeros_like(r2)
    inside = r2 < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
    return out


def init_data(
    kind: InitKind,
    grid: Grid2D | None = None,
    *,
    amplitude: float = 1.0,
    sigma: float = 0.5,
    center: tuple[float, float] | None = None,
    mode: tuple[int, int] = (1, 1),
    phase: float = 0.0,
    path: str | None = None,
) -> DensityState:
    """Construct initial density pairs.

    ``SeparableGaussian`` places the same product-Gaussian profile in both
    densities; ``GaussianPlus`` places it in the plus slot only.
    ``TwoBumps`` puts compactly supported smooth bumps of width
    ``sigma`` at midline offsets -L1/8 (plus) and +L1/8 (minus), disjoint by
    construction whenever sigma <= L1/8. ``SingleMode`` is a signed, mean-free
    single Fourier mode in the plus slot. ``FromSnapshot`` reads ``path``.
    """
    if kind is InitKind.FROM_SNAPSHOT:
        if path is None:
            raise ValueError("FromSnapshot requires a path")
        from .snapshots import read_snapshot

        return read_snapshot(path)

    if grid is None:
        raise ValueError(f"{kind.value} requires a grid")
    if kind in _POSITIVE_KINDS and amplitude < 0.0:
        raise ValueError(f"{kind.value} requires a non-negative amplitude")

    x1, x2 = grid.mesh()
    if center is None:
        center = (grid.L1 / 2.0, grid.L2 / 2.0)

    if kind in (InitKind.SEPARABLE_GAUSSIAN, InitKind.GAUSSIAN_PLUS):
        prof = amplitude * _periodic_gaussian_1d(
            x1, center[0], sigma, grid.L1
        ) * _periodic_gaussian_1d(x2, center[1], sigma, grid.L2)
        if kind is InitKind.SEPARABLE_GAUSSIAN:
            plus, minus = prof, prof.copy()
        else:
            # plus slot only: the two densities differ, so the velocity is
            # nonzero and the nonlinearity is actually exercised
            plus, minus = prof, np.zeros(grid.shape)
    elif kind is InitKind.TWO_BUMPS:
        if sigma > grid.L1 / 8.0:
            raise ValueError("TwoBumps requires sigma <= L1/8 for disjoint supports")
        plus = np.zeros(grid.shape)
        minus = np.zeros(grid.shape)
        for target, off in ((plus, -grid.L1 / 8.0), (minus, grid.L1 / 8.0)):
            c1 = center[0] + off
            # wrap the x1 offset into [-L1/2, L1/2) so bumps near the seam close up
            d1 = (x1 - c1 + grid.L1 / 2.0) % grid.L1 - grid.L1 / 2.0
            d2 = (x2 - center[1] + grid.L2 / 2.0) % grid.L2 - grid.L2 / 2.0
            target += amplitude * _compact_bump((d1 * d1 + d2 * d2) / (sigma * sigma))
    elif kind is InitKind.SINGLE_MODE:
        m1, m2 = mode
        plus = amplitude * np.sin(
            2.0 * np.pi * (m1 * x1 / grid.L1 + m2 * x2 / grid.L2) + phase
        )
        minus = np.zeros(grid.shape)
    else:
        raise ValueError(f"unknown init kind {kind!r}")

    return DensityState(
        theta_plus=RealField2D(grid, plus),
        theta_minus=RealField2D(grid, minus),
        t=0.0,
    )
