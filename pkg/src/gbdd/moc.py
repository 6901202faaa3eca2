"""Moduli of continuity and the dissipation-vs-advection negativity certificate.

The regularity argument controls density primitives by an explicit concave
modulus omega and closes when, for every separation xi in a stated range,

    margin(xi) = Omega(xi) * omega'(xi) + Psi_alpha(xi) < 0,

where Omega bounds the velocity increment generated by a field obeying omega
and Psi_alpha is the (negative) action of the fractional dissipation on the
modulus. This module constructs the moduli, evaluates both functionals with
error bounds, selects the scaling parameter lambda and the threshold delta0
from the data norms, and certifies the negativity over a sampled range.

All certified quantities are evaluated on the UNSCALED modulus: the scaling
identity margin_{omega_lambda}(xi) = lambda^{2 alpha - 1} *
margin_omega(lambda xi) converts negativity on (0, Cbar0] for the scaled
modulus into negativity of the base margin on (0, lambda*Cbar0], which is the
range ``certify`` samples.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
from scipy import integrate
from scipy.special import exp1

from .kernels import c_alpha


class ModulusKind(enum.Enum):
    MOC1 = "MOC1"  # alpha = 1: double-logarithmic unbounded tail
    MOC_ALPHA = "MOCAlpha"  # alpha in (1,2]: constant beyond delta
    MOC_APP = "MOCApp"  # two-exponent variant; same shape as MOCAlpha
    LINEAR = "Linear"  # smoke-test modulus: xi capped at delta


_BOUNDED_KINDS = (ModulusKind.MOC_ALPHA, ModulusKind.MOC_APP, ModulusKind.LINEAR)


@dataclass(frozen=True)
class Modulus:
    """Piecewise concave modulus: core xi - xi^{3/2} on [0, delta], then a tail.

    Tails: constant omega(delta) for MOC_ALPHA/MOC_APP, the slowly growing
    omega(delta) + gamma*log(1 + log(xi/delta)/4) for MOC1, and the LINEAR
    smoke kind replaces the core by plain xi (still capped at delta).

    delta < 4/9 keeps the core strictly increasing (omega' = 1 - 1.5*sqrt(xi)
    > 0); for MOC1, gamma <= delta keeps the outward slope at the kink below
    1/4, and gamma/(4 delta) <= 1 - 1.5 sqrt(delta) keeps the kink concave.
    """

    kind: ModulusKind
    delta: float
    gamma: float | None = None

    def __post_init__(self):
        if self.delta <= 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.kind is not ModulusKind.LINEAR and self.delta >= 4.0 / 9.0:
            raise ValueError(
                f"delta must lie in (0, 4/9) so the core stays increasing, got {self.delta}"
            )
        if self.kind is ModulusKind.MOC1:
            if self.gamma is None:
                raise ValueError("MOC1 requires gamma")
            if not 0.0 < self.gamma <= self.delta:
                raise ValueError(
                    f"MOC1 requires gamma in (0, delta], got gamma={self.gamma}"
                )
            if self.gamma / (4.0 * self.delta) > 1.0 - 1.5 * math.sqrt(self.delta):
                raise ValueError(
                    "kink not concave: gamma/(4 delta) exceeds the core slope at delta"
                )
        elif self.gamma is not None:
            raise ValueError(f"{self.kind.value} does not take gamma")

    @property
    def bounded(self) -> bool:
        return self.kind in _BOUNDED_KINDS

    @property
    def omega_delta(self) -> float:
        if self.kind is ModulusKind.LINEAR:
            return self.delta
        return self.delta - self.delta**1.5

    @property
    def sup_omega(self) -> float:
        return self.omega_delta if self.bounded else math.inf

    def eval(self, xi):
        # duck-type parity with ScaledModulus: a bare modulus is lambda = 1
        return omega_eval(self, xi)


def _core(mod: Modulus, xi):
    if mod.kind is ModulusKind.LINEAR:
        return xi
    return xi - xi**1.5


def omega_eval(mod: Modulus, xi):
    """omega(xi); accepts scalars or arrays, vectorized piecewise."""
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(xi_arr < 0.0):
        raise ValueError("xi must be >= 0")
    core = _core(mod, np.minimum(xi_arr, mod.delta))
    if mod.kind is ModulusKind.MOC1:
        with np.errstate(invalid="ignore", divide="ignore"):
            tail = mod.gamma * np.log1p(np.log(xi_arr / mod.delta) / 4.0)
        out = np.where(xi_arr > mod.delta, mod.omega_delta + tail, core)
    else:
        out = core
    return float(out) if np.isscalar(xi) or xi_arr.ndim == 0 else out


def omega_prime(mod: Modulus, xi):
    """One-sided omega'; the kink at delta reports the left (core) slope."""
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(xi_arr < 0.0):
        raise ValueError("xi must be >= 0")
    if mod.kind is ModulusKind.LINEAR:
        core = np.ones_like(xi_arr)
    else:
        core = 1.0 - 1.5 * np.sqrt(np.minimum(xi_arr, mod.delta))
    if mod.kind is ModulusKind.MOC1:
        with np.errstate(invalid="ignore", divide="ignore"):
            tail = mod.gamma / (xi_arr * (4.0 + np.log(xi_arr / mod.delta)))
        out = np.where(xi_arr > mod.delta, tail, core)
    else:
        out = np.where(xi_arr > mod.delta, 0.0, core)
    return float(out) if np.isscalar(xi) or xi_arr.ndim == 0 else out


def omega_second(mod: Modulus, xi: float, return_flag: bool = False):
    """Piecewise omega''; at the kink the left value is returned, flagged."""
    if xi < 0.0:
        raise ValueError("xi must be >= 0")
    at_kink = xi == mod.delta
    if xi <= mod.delta:
        if mod.kind is ModulusKind.LINEAR:
            val = 0.0
        elif xi == 0.0:
            val = -math.inf
        else:
            val = -0.75 / math.sqrt(xi)
    elif mod.kind is ModulusKind.MOC1:
        v = math.log(xi / mod.delta)
        val = -mod.gamma * (5.0 + v) / (xi * xi * (4.0 + v) ** 2)
    else:
        val = 0.0
    if return_flag:
        return val, at_kink
    return val


def omega_inverse(mod: Modulus, z: float) -> float:
    """Smallest xi with omega(xi) = z; 1e-12 xi-tolerance root finding.

    For bounded moduli z above sup omega is an error (the largeness
    mechanism must raise lambda instead). The MOC1 tail inverse is the
    closed form delta * exp(4 (e^{(z - omega(delta))/gamma} - 1)), computed
    in log space and rejected when it exceeds the double range.
    """
    if z < 0.0:
        raise ValueError(f"z must be >= 0, got {z}")
    if z == 0.0:
        return 0.0
    w_delta = mod.omega_delta
    if z <= w_delta:
        if mod.kind is ModulusKind.LINEAR:
            return z
        # root of xi - xi^{3/2} = z on [0, delta]
        from scipy.optimize import brentq

        return float(brentq(lambda x: _core(mod, x) - z, 0.0, mod.delta, xtol=1e-12))
    if mod.bounded:
        raise ValueError(
            f"modulus bounded: z={z!r} exceeds sup omega = {w_delta!r}"
        )
    log_xi = math.log(mod.delta) + 4.0 * math.expm1((z - w_delta) / mod.gamma)
    if log_xi > 700.0:
        raise OverflowError(
            "MOC1 inverse exceeds the double range; use smaller z or larger gamma"
        )
    return math.exp(log_xi)


@dataclass(frozen=True)
class ScaledModulus:
    """omega_lambda(xi) = lambda^{alpha-1} * omega(lambda * xi)."""

    base: Modulus
    lam: float
    alpha: float

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")

    def eval(self, xi):
        return self.lam ** (self.alpha - 1.0) * omega_eval(self.base, np.asarray(xi) * self.lam)

    def prime(self, xi):
        return self.lam**self.alpha * omega_prime(self.base, np.asarray(xi) * self.lam)

    def inverse(self, z: float) -> float:
        return omega_inverse(self.base, z / self.lam ** (self.alpha - 1.0)) / self.lam


@dataclass(frozen=True)
class MocConstants:
    """Constants of the velocity bound (A1, A2) and dissipation bound (B).

    B_alpha = None selects c_alpha(alpha) at evaluation time, which keeps a
    single constants object usable across exponents. A1's default is the
    circle average of the velocity symbol factor, (2 pi)^{-1} * integral of
    cos^2 sin^2 = 1/8.
    """

    A1: float = 0.125
    A2: float = 1.0
    B_alpha: float | None = None

    def __post_init__(self):
        if self.A1 <= 0.0 or self.A2 <= 0.0:
            raise ValueError("A1, A2 must be positive")
        if self.B_alpha is not None and self.B_alpha <= 0.0:
            raise ValueError("B_alpha must be positive when given")

    def b(self, alpha: float) -> float:
        if self.B_alpha is not None:
            return self.B_alpha
        return c_alpha(alpha)


# ---------------------------------------------------------------------------
# Omega: the velocity modulus functional


def _exp1_scaled(a: float) -> float:
    """e^a * E_1(a), stable for any a > 0."""
    if a <= 0.0:
        raise ValueError("a must be positive")
    if a < 300.0:
        return float(math.exp(a) * exp1(a))
    return float(mp.exp(a) * mp.e1(a))


_E4E1 = _exp1_scaled(4.0)  # integral_0^inf e^{-v} log(1 + v/4) dv


def _I1(mod: Modulus, xi: float) -> float:
    """integral_0^xi omega(eta)/eta d eta in closed form."""
    d = mod.delta
    if mod.kind is ModulusKind.LINEAR:
        core = min(xi, d)
    else:
        x = min(xi, d)
        core = x - (2.0 / 3.0) * x**1.5
    if xi <= d:
        return core
    if mod.bounded:
        return core + mod.omega_delta * math.log(xi / d)
    V = math.log(xi / d)
    tail = mod.omega_delta * V + mod.gamma * ((4.0 + V) * math.log1p(V / 4.0) - V)
    return core + tail


def _I2(mod: Modulus, xi: float) -> float:
    """integral_xi^inf omega(eta)/eta^2 d eta in closed form."""
    d = mod.delta
    if xi < d:
        if mod.kind is ModulusKind.LINEAR:
            core = math.log(d / xi)
        else:
            core = math.log(d / xi) - 2.0 * (math.sqrt(d) - math.sqrt(xi))
        return core + _I2(mod, d)
    if mod.bounded:
        return mod.omega_delta / xi
    # MOC1 tail from xi >= delta: substitute eta = xi e^u and use
    # integral_0^inf e^{-u} log(1 + u/a) du = e^a E_1(a) with a = 4 + log(xi/delta)
    V = math.log(xi / d)
    return (
        mod.omega_delta
        + mod.gamma * (math.log1p(V / 4.0) + _exp1_scaled(4.0 + V))
    ) / xi


def Omega_eval(mod: Modulus, xi: float, c: MocConstants, method: str = "closed"):
    """A1*omega(xi) + A2*(I1 + xi*I2) with an error bound.

    ``closed`` uses exact piecewise antiderivatives (error bound is a
    roundoff allowance); ``quad`` integrates adaptively, truncating the
    outer integral at H = max(1e4*xi, 1e4*delta) with the documented
    remainder bound (omega(H) + gamma) * xi / H.
    """
    if xi <= 0.0:
        raise ValueError(f"xi must be > 0, got {xi}")
    w = omega_eval(mod, xi)
    if method == "closed":
        i1 = _I1(mod, xi)
        i2 = _I2(mod, xi)
        val = c.A1 * w + c.A2 * (i1 + xi * i2)
        return val, 1e-12 * (c.A1 * w + c.A2 * (abs(i1) + abs(xi * i2)))
    if method != "quad":
        raise ValueError(f"unknown method {method!r}")
    pts = [p for p in (mod.delta,) if 0.0 < p < xi]
    i1, e1 = integrate.quad(
        lambda eta: omega_eval(mod, eta) / eta,
        0.0,
        xi,
        points=pts or None,
        epsabs=1e-12,
        epsrel=1e-11,
        limit=200,
    )
    H = max(1e4 * xi, 1e4 * mod.delta)
    pts2 = [p for p in (mod.delta,) if xi < p < H]
    i2, e2 = integrate.quad(
        lambda eta: omega_eval(mod, eta) / (eta * eta),
        xi,
        H,
        points=pts2 or None,
        epsabs=1e-14,
        epsrel=1e-11,
        limit=200,
    )
    gamma = mod.gamma or 0.0
    if mod.bounded:
        # beyond H omega is constant: exact closure, no remainder
        i2 += mod.omega_delta / H
        rem = 0.0
    else:
        i2 += omega_eval(mod, H) / H
        rem = (omega_eval(mod, H) + gamma) * xi / H
    val = c.A1 * w + c.A2 * (i1 + xi * i2)
    err = c.A2 * (e1 + xi * e2) + rem
    return val, err


# ---------------------------------------------------------------------------
# Psi: the dissipation functional


def _psi_quad_points(lo: float, hi: float, breaks):
    pts = sorted(p for p in breaks if lo < p < hi)
    return pts or None


def _quad(fun, lo, hi, points):
    # subdivision-exhaustion warnings are expected near the kink at extreme
    # aspect ratios; the returned abserr is what gates the certificate
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(
            fun, lo, hi, points=points, epsabs=0.0, epsrel=1e-9, limit=300
        )


def Psi_eval(mod: Modulus, xi: float, alpha: float, c: MocConstants):
    """Action of -|D|^alpha transferred to the modulus, with error bound.

    alpha = 2 is exactly 2*omega''(xi). For alpha < 2,

        Psi = B * [ integral_0^{xi/2} (omega(xi+2 eta) + omega(xi-2 eta)
                                        - 2 omega(xi)) / eta^{1+alpha} d eta
                  + integral_{xi/2}^inf (omega(xi+2 eta) - omega(2 eta - xi)
                                        - 2 omega(xi)) / eta^{1+alpha} d eta ].

    Both integrands are <= 0 by concavity. Quadratures split wherever an
    argument crosses the kink; the eta -> 0 cancellation region is handled
    by a fitted even Taylor stub, and the far tail is closed-form for
    bounded moduli and truncated-with-bound for MOC1.
    """
    if xi <= 0.0:
        raise ValueError(f"xi must be > 0, got {xi}")
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    if alpha == 2.0:
        return 2.0 * omega_second(mod, xi), 0.0

    B = c.b(alpha)
    w_xi = omega_eval(mod, xi)

    def D1(eta):
        return omega_eval(mod, xi + 2.0 * eta) + omega_eval(mod, xi - 2.0 * eta) - 2.0 * w_xi

    def D2(eta):
        return omega_eval(mod, xi + 2.0 * eta) - omega_eval(mod, 2.0 * eta - xi) - 2.0 * w_xi

    # ---- inner integral over (0, xi/2]
    eta_c = 1e-3 * xi / 2.0
    d1 = float(D1(eta_c))
    d2 = float(D1(eta_c / 2.0))
    a_fit = (16.0 * d2 - d1) / (3.0 * eta_c**2)
    b_fit = 4.0 * (d1 - 4.0 * d2) / (3.0 * eta_c**4)
    stub = a_fit * eta_c ** (2.0 - alpha) / (2.0 - alpha) + b_fit * eta_c ** (
        4.0 - alpha
    ) / (4.0 - alpha)
    err_stub = abs(b_fit) * eta_c ** (4.0 - alpha) / (4.0 - alpha)

    breaks1 = [(mod.delta - xi) / 2.0, (xi - mod.delta) / 2.0]
    j1, e1 = _quad(
        lambda eta: D1(eta) * eta ** (-1.0 - alpha),
        eta_c,
        xi / 2.0,
        _psi_quad_points(eta_c, xi / 2.0, breaks1),
    )
    j1 += stub

    # ---- outer integral over [xi/2, inf)
    eta3 = (xi + mod.delta) / 2.0  # beyond this, both arguments are past delta
    breaks2 = [(mod.delta - xi) / 2.0, eta3]
    if mod.bounded:
        hi = max(eta3, xi / 2.0)
        j2, e2 = _quad(
            lambda eta: D2(eta) * eta ** (-1.0 - alpha),
            xi / 2.0,
            hi,
            _psi_quad_points(xi / 2.0, hi, breaks2),
        )
        # past eta3 the difference term vanishes identically: exact tail
        j2 += -2.0 * w_xi * hi ** (-alpha) / alpha
        tail_err = 0.0
    else:
        H = max(1e4 * xi, 1e4 * mod.delta)
        j2, e2 = _quad(
            lambda eta: D2(eta) * eta ** (-1.0 - alpha),
            xi / 2.0,
            H,
            _psi_quad_points(xi / 2.0, H, breaks2),
        )
        j2 += -2.0 * w_xi * H ** (-alpha) / alpha
        # |omega(xi+2eta) - omega(2eta-xi)| <= gamma*xi/(2 eta) past H
        tail_err = mod.gamma * xi / (2.0 * (1.0 + alpha) * H ** (1.0 + alpha))

    val = B * (j1 + j2)
    err = B * (err_stub + e1 + e2 + tail_err)
    return val, err


# ---------------------------------------------------------------------------
# lambda selection and certification


def lambda_select(
    theta_norm_linf_l1: float, grad_rho_norm: float, alpha: float, mod: Modulus
):
    """Scaling parameter, threshold, and anchor constants from data norms.

    Returns (lam, delta0, c0, xi0) with c0 = omega(delta), xi0 = delta.
    alpha in (1, 2]: lam = max{(4N/c0)^{1/(alpha-1)}, (xi0/N) G}. alpha = 1
    needs an unbounded modulus and uses lam = (omega^{-1}(3N)/N) G.
    delta0 = omega^{-1}(2N / lam^{alpha-1}).
    """
    if not 1.0 <= alpha <= 2.0:
        raise ValueError(f"alpha must lie in [1, 2], got {alpha}")
    N = theta_norm_linf_l1
    G = grad_rho_norm
    if N <= 0.0 or G <= 0.0:
        raise ValueError("both norms must be positive")
    c0 = mod.omega_delta
    xi0 = mod.delta
    if alpha == 1.0:
        if mod.bounded:
            raise ValueError(
                "alpha = 1 requires an unbounded modulus (MOC1): a bounded "
                "modulus cannot absorb the data norm at fixed lambda"
            )
        lam = (omega_inverse(mod, 3.0 * N) / N) * G
    else:
        lam = max((4.0 * N / c0) ** (1.0 / (alpha - 1.0)), (xi0 / N) * G)
    delta0 = omega_inverse(mod, 2.0 * N / lam ** (alpha - 1.0))
    return lam, delta0, c0, xi0


@dataclass(frozen=True)
class CertificateReport:
    """Sampled negativity certificate for one exponent and one modulus.

    ``passed`` requires margin + error bound < 0 at every sample AND the
    analytic small-separation bound (Case 1) to be negative and to dominate
    the measured margins on xi <= delta/10.
    """

    alpha: float
    lam: float
    theta_norm: float
    constants: MocConstants
    xi_samples: np.ndarray
    omega_vals: np.ndarray
    omega_prime_vals: np.ndarray
    Omega_vals: np.ndarray
    Psi_vals: np.ndarray
    margins: np.ndarray
    quad_error_bounds: np.ndarray
    xi_max: float
    passed: bool
    case1_bounds: np.ndarray = field(default=None)  # type: ignore[assignment]
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.passed and not np.all(self.margins + self.quad_error_bounds < 0.0):
            raise ValueError("passed certificate with non-negative margin")

    def worst_margin(self) -> float:
        return float(np.max(self.margins + self.quad_error_bounds))


def _case1_bound(mod: Modulus, xi: float, alpha: float, c: MocConstants) -> float:
    pos = xi * (c.A1 + 3.0 * c.A2 + c.A2 * math.log(mod.delta / xi))
    if alpha == 2.0:
        return pos - 1.5 / math.sqrt(xi)
    return pos - 0.75 * c.b(alpha) * xi ** (1.5 - alpha)


def certify(
    alpha: float,
    mod: Modulus,
    lam: float,
    theta_norm: float,
    c: MocConstants | None = None,
    n_samples: int = 192,
) -> CertificateReport:
    """Sampled margin certificate on (0, lam * Cbar0].

    The sample grid is log-uniform from 1e-8 * xi_max to xi_max, augmented
    with a cluster around the kink at delta and the Case-1 anchor delta/10
    (when inside the range), since the margin is discontinuous at the kink
    and the analytic check lives below delta/10.
    """
    if c is None:
        c = MocConstants()
    if n_samples < 64:
        raise ValueError(f"n_samples must be >= 64, got {n_samples}")
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    notes: list[str] = []
    xi_max = omega_inverse(mod, 3.0 * theta_norm / lam ** (alpha - 1.0))
    xi_min = 1e-8 * xi_max
    grid = list(np.geomspace(xi_min, xi_max, n_samples))
    for mult in (0.5, 0.8, 0.9, 0.95, 0.99, 1.0, 1.01, 1.05, 1.1, 1.25, 1.5, 2.0):
        p = mod.delta * mult
        if xi_min <= p <= xi_max:
            grid.append(p)
    if xi_min <= mod.delta / 10.0 <= xi_max:
        grid.append(mod.delta / 10.0)
    xs = np.array(sorted(set(grid)))

    w = np.array([omega_eval(mod, x) for x in xs])
    wp = np.array([omega_prime(mod, x) for x in xs])
    Om = np.empty_like(xs)
    Om_err = np.empty_like(xs)
    Ps = np.empty_like(xs)
    Ps_err = np.empty_like(xs)
    for i, x in enumerate(xs):
        Om[i], Om_err[i] = Omega_eval(mod, float(x), c)
        Ps[i], Ps_err[i] = Psi_eval(mod, float(x), alpha, c)
    margins = Om * wp + Ps
    errs = np.abs(wp) * Om_err + Ps_err

    sampled_ok = bool(np.all(margins + errs < 0.0))

    small = xs <= mod.delta / 10.0
    if np.any(small):
        bounds = np.array(
            [_case1_bound(mod, float(x), alpha, c) for x in xs[small]]
        )
        case1_ok = bool(np.all(bounds < 0.0)) and bool(
            np.all(margins[small] <= bounds + errs[small])
        )
        case1_full = np.full_like(xs, np.nan)
        case1_full[small] = bounds
    else:
        notes.append("no samples at or below delta/10: Case-1 check vacuous, not passed")
        case1_ok = False
        case1_full = np.full_like(xs, np.nan)

    return CertificateReport(
        alpha=alpha,
        lam=lam,
        theta_norm=theta_norm,
        constants=c,
        xi_samples=xs,
        omega_vals=w,
        omega_prime_vals=wp,
        Omega_vals=Om,
        Psi_vals=Ps,
        margins=margins,
        quad_error_bounds=errs,
        xi_max=xi_max,
        passed=sampled_ok and case1_ok,
        case1_bounds=case1_full,
        notes=tuple(notes),
    )


def certify_pair(
    alpha: float,
    beta: float,
    mod: Modulus,
    lam: float,
    theta_norm: float,
    c: MocConstants | None = None,
    n_samples: int = 192,
) -> tuple[CertificateReport, CertificateReport]:
    """Joint certificate of both dissipation exponents against one modulus.

    Exponent order is normalized; lam below 1 is raised to 1 (the exponent
    transfer inequality lambda^{beta-alpha} Psi_beta <= Psi_beta needs
    lambda >= 1), recorded as a note on both reports.
    """
    if alpha > beta:
        alpha, beta = beta, alpha
    if not 1.0 < alpha <= 2.0 or not 1.0 < beta <= 2.0:
        raise ValueError("both exponents must lie in (1, 2]")
    notes = []
    if lam < 1.0:
        notes.append(f"lambda raised from {lam!r} to 1 (exponent-transfer convention)")
        lam = 1.0
    if alpha == beta:
        rep = certify(alpha, mod, lam, theta_norm, c, n_samples=n_samples)
        rep = _with_notes(rep, notes + ["degenerate pair: single certificate duplicated"])
        return rep, rep
    rep_a = _with_notes(certify(alpha, mod, lam, theta_norm, c, n_samples=n_samples), notes)
    rep_b = _with_notes(certify(beta, mod, lam, theta_norm, c, n_samples=n_samples), notes)
    return rep_a, rep_b


def _with_notes(rep: CertificateReport, extra) -> CertificateReport:
    if not extra:
        return rep
    from dataclasses import replace

    return replace(rep, notes=rep.notes + tuple(extra))


def search_certificate(
    alpha: float = 1.0,
    deltas=(1e-2, 1e-3, 1e-4, 1e-5, 1e-6),
    gamma_factors=(1.0, 0.1, 0.01),
    c: MocConstants | None = None,
    n_samples: int = 128,
):
    """Scan (delta, gamma) for a passing certificate; None if all fail.

    For alpha = 1 the modulus is MOC1 with theta_norm = gamma per trial (the
    double-exponential inverse keeps the sampled range representable);
    alpha > 1 scans MOC_ALPHA over delta with the lambda that a unit-norm
    datum selects.

    Candidates are triaged on a quarter-resolution grid first; only a
    candidate that clears the coarse pass is re-certified at n_samples.
    The returned report always carries the full grid.
    """
    coarse = max(64, n_samples // 4)

    def attempt(mod, lam, theta_norm):
        if coarse < n_samples:
            probe = certify(alpha, mod, lam, theta_norm=theta_norm, c=c, n_samples=coarse)
            if not probe.passed:
                return None
        rep = certify(alpha, mod, lam, theta_norm=theta_norm, c=c, n_samples=n_samples)
        return rep if rep.passed else None

    for delta in deltas:
        if alpha == 1.0:
            for fac in gamma_factors:
                gamma = delta * fac
                try:
                    mod = Modulus(ModulusKind.MOC1, delta, gamma)
                except ValueError:
                    continue
                rep = attempt(mod, 1.0, gamma)
                if rep is not None:
                    return mod, rep
        else:
            mod = Modulus(ModulusKind.MOC_ALPHA, delta)
            lam, _, _, _ = lambda_select(1.0, 1.0, alpha, mod)
            rep = attempt(mod, lam, 1.0)
            if rep is not None:
                return mod, rep
    return None
