"""Coupled dislocation-density transport with fractional dissipation.

Pseudo-spectral simulation of two signed density fields advected by a
shear velocity built from Riesz-transform compositions of their difference,
with |D|^alpha dissipation; diagnostics for the norms the regularity theory
tracks; and a numerical certificate for the modulus-of-continuity
maximum-principle argument.
"""

from .config import ConfigError, RunConfig, parse_config
from .diagnostics import (
    CSV_COLUMNS,
    DiagnosticsRecord,
    bernstein_ratio,
    blowup_integral,
    compute_record,
    default_displacements,
    lebesgue_norm,
    linf_l1_norm,
    lipschitz_norm,
    moc_compliance,
    sobolev_norm,
)
from .grid import Grid2D, RealField2D, SpectralField2D, make_grid, sample_field
from .kernels import (
    CAlpha,
    KernelTable,
    QuadratureError,
    c_alpha,
    c_alpha_angular,
    dalpha_integral,
    kernel_K,
    kernel_mass,
    kernel_value,
    kernel_value_at_time,
)
from .moc import (
    CertificateReport,
    MocConstants,
    Modulus,
    ModulusKind,
    Omega_eval,
    Psi_eval,
    ScaledModulus,
    certify,
    certify_pair,
    lambda_select,
    omega_eval,
    omega_inverse,
    omega_prime,
    omega_second,
    search_certificate,
)
from .model import (
    DensityState,
    InitKind,
    ModelParams,
    RhoDecomposition,
    Variant,
    init_data,
    primitive_rho,
    rhs,
    rhs_sqg,
    transport_hat,
    velocity_from_rho,
    velocity_from_theta,
    velocity_hat,
)
from .runner import run_simulation
from .snapshots import SnapshotHeader, read_snapshot, write_snapshot
from .spectral import (
    SymbolId,
    apply_fractional_laplacian,
    apply_multiplier,
    dealias,
    dyadic_block,
    fractional_semigroup,
    semigroup_factor,
    spectral_derivative,
    symbol_array,
    to_physical,
    to_spectral,
)
from .stepping import (
    PicardTrace,
    Scheme,
    StepNaNError,
    StepperConfig,
    cfl_dt,
    picard_solve,
    step,
)

__all__ = [name for name in dir() if not name.startswith("_")]
