"""Loop-heavy kernels with optional numba acceleration.

The FFT lanes of the solver live in numpy (numba cannot help there); this
module holds the genuinely loop-bound kernels: the modulus-compliance
displacement scan and the fused per-field statistics reduction.

Selection order:
 1. ``GBDD_DISABLE_NUMBA=1`` in the environment forces the numpy paths.
 2. Otherwise numba is used when importable; a missing numba silently
    falls back to numpy (same results, slower).

``USING_NUMBA`` records the active path; ``benchmarks/bench_accel.py``
compares the two implementations.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("GBDD_DISABLE_NUMBA", "0") not in ("0", "", "false", "False")

try:  # pragma: no cover - exercised implicitly via either branch
    if _DISABLED:
        raise ImportError("numba disabled by GBDD_DISABLE_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        # decorator stub: leaves the function as plain Python/numpy
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrapper(func):
            return func

        return wrapper


USING_NUMBA = HAS_NUMBA and not _DISABLED


def _shift_diff_max_numpy(per, row_mass, x1, L1, s1, s2, h1):
    """max over the grid of |rho(x+h) - rho(x)| for one integer shift (s1, s2).

    rho(x) = per(x) + row_mass(x2) * x1 / L1; the ramp term uses the signed
    physical displacement h1 = s1*dx1 so increments reflect the non-periodic
    reconstruction within one period.
    """
    per_s = np.roll(np.roll(per, -s1, axis=0), -s2, axis=1)
    rm_s = np.roll(row_mass, -s2)
    diff = per_s - per
    diff += (rm_s - row_mass)[None, :] * (x1[:, None] / L1)
    diff += rm_s[None, :] * (h1 / L1)
    return float(np.max(np.abs(diff)))


@njit(cache=True)
def _shift_diff_max_jit(per, row_mass, x1, L1, s1, s2, h1):  # pragma: no cover - jit
    n1, n2 = per.shape
    best = 0.0
    for i in range(n1):
        ii = (i + s1) % n1
        xi = x1[i]
        for j in range(n2):
            jj = (j + s2) % n2
            d = (
                per[ii, jj]
                - per[i, j]
                + (row_mass[jj] - row_mass[j]) * xi / L1
                + row_mass[jj] * h1 / L1
            )
            if d < 0.0:
                d = -d
            if d > best:
                best = d
    return best


def compliance_scan(per, row_mass, x1, L1, shifts, hlens, omega_vals):
    """Max of |rho(x+h) - rho(x)| / omega(|h|) over a displacement set.

    Parameters
    ----------
    per : (n1, n2) float array
        Periodic part of the reconstruction.
    row_mass : (n2,) float array
        Per-row mass, i.e. the x1-integral of the density at each x2.
    x1 : (n1,) float array
        Base coordinates along axis 0.
    shifts : (m, 2) int array
        Integer grid shifts (s1, s2), each nonzero as a vector.
    hlens : (m,) float array
        Torus lengths of the physical displacements (for reporting only).
    omega_vals : (m,) float array
        Modulus values at each displacement length (all > 0).
    """
    per = np.ascontiguousarray(per, dtype=np.float64)
    row_mass = np.ascontiguousarray(row_mass, dtype=np.float64)
    x1 = np.ascontiguousarray(x1, dtype=np.float64)
    n1 = per.shape[0]
    dx1 = L1 / n1
    worst = 0.0
    fn = _shift_diff_max_jit if USING_NUMBA else _shift_diff_max_numpy
    for m in range(shifts.shape[0]):
        s1 = int(shifts[m, 0])
        s2 = int(shifts[m, 1])
        h1 = s1 * dx1
        ratio = fn(per, row_mass, x1, L1, s1, s2, h1) / omega_vals[m]
        if ratio > worst:
            worst = ratio
    return worst


def _field_stats_numpy(values, dx1):
    row_abs = np.abs(values).sum(axis=0) * dx1
    return (
        float(values.min()),
        float(values.max()),
        float(np.max(np.abs(values))),
        float(row_abs.max()),
    )


@njit(cache=True)
def _field_stats_jit(values, dx1):  # pragma: no cover - jit
    n1, n2 = values.shape
    vmin = values[0, 0]
    vmax = values[0, 0]
    best_row = 0.0
    for j in range(n2):
        acc = 0.0
        for i in range(n1):
            v = values[i, j]
            if v < vmin:
                vmin = v
            if v > vmax:
                vmax = v
            acc += abs(v)
        acc *= dx1
        if acc > best_row:
            best_row = acc
    linf = max(abs(vmin), abs(vmax))
    return vmin, vmax, linf, best_row


def field_stats(values, dx1):
    """Fused (min, max, max|.|, max-row dx1-weighted |.| sum) in one pass."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    if USING_NUMBA:
        vmin, vmax, linf, row = _field_stats_jit(values, float(dx1))
        return float(vmin), float(vmax), float(linf), float(row)
    return _field_stats_numpy(values, float(dx1))
