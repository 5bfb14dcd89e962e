"""Finite-sample theory for correlation estimates under bivariate normality.

Covers the exact sampling density of the Pearson coefficient, the
expected values (hence small-sample bias) of the Pearson and Spearman
coefficients, the closed-form conversions between the three population
coefficients, and Fisher-z interval estimation.

Everything that involves gamma-function ratios is evaluated in log
space so sample sizes up to the thousands stay finite.  The density's
constant factor is fixed by numerical normalization per (rho, n) and
memoized; the normalization is the ground truth the curve must satisfy
(unit area), and it agrees with the closed-form constant to ~1e-6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InputError, NumericError

__all__ = [
    "NormalTheoryParams",
    "DensityCurve",
    "hyp2f1_half_half",
    "pearson_density",
    "density_curve",
    "expected_pearson",
    "expected_spearman",
    "expected_spearman_from_mix",
    "spearman_from_pearson",
    "kendall_from_pearson",
    "spearman_from_kendall",
    "fisher_z",
    "fisher_z_inverse",
    "fisher_interval",
    "spearman_interval",
]

SERIES_RELATIVE_TOL = 1e-15
SERIES_MAX_TERMS = 10 ** 6

# grid used to fix the density's normalization constant (finer than the
# 4001-point grid the unit-area check runs on)
_NORM_GRID_POINTS = 20001
_NORM_EPS = 1e-9


@dataclass(frozen=True)
class NormalTheoryParams:
    """Population coefficient and sample size for the normal-theory formulas."""

    rho: float
    n: int

    def __post_init__(self):
        if not -1.0 < self.rho < 1.0:
            raise InputError(f"rho must lie strictly inside (-1, 1), got {self.rho}")
        if self.n < 2:
            raise InputError(f"sample size must be >= 2, got {self.n}")


@dataclass(frozen=True)
class DensityCurve:
    """A density sampled on a grid of coefficient values in (-1, 1)."""

    grid: np.ndarray
    density: np.ndarray
    rho: float
    n: int


def hyp2f1_half_half(c: float, x) -> float | np.ndarray:
    """Gauss hypergeometric function 2F1(1/2, 1/2; c; x) for c > 1, 0 <= x < 1.

    Power series summed with the term-ratio recurrence, truncated once
    the relative term falls below 1e-15, capped at 1e6 terms.
    """
    if not c > 1.0:
        raise InputError(f"series parameter c must exceed 1, got {c}")
    x_arr = np.asarray(x, dtype=float)
    if np.any((x_arr < 0.0) | (x_arr >= 1.0)):
        raise InputError("series argument must lie in [0, 1)")
    term = np.ones_like(x_arr)
    total = np.ones_like(x_arr)
    for i in range(SERIES_MAX_TERMS):
        term = term * ((0.5 + i) ** 2 / ((c + i) * (i + 1.0))) * x_arr
        total = total + term
        if np.all(term <= SERIES_RELATIVE_TOL * total):
            return total if np.ndim(x) else float(total)
    raise NumericError("hypergeometric series did not converge within 1e6 terms")


# ---------------------------------------------------------------------------
# Sampling density of the Pearson coefficient
# ---------------------------------------------------------------------------

def _log_density_shape(r: np.ndarray, rho: float, n: int) -> np.ndarray:
    shape = (0.5 * (n - 1.0) * math.log1p(-rho * rho)
             + 0.5 * (n - 4.0) * np.log1p(-r * r)
             - (n - 1.5) * np.log1p(-rho * r))
    return shape + np.log(hyp2f1_half_half(n - 0.5, 0.5 * (rho * r + 1.0)))


_log_norm_cache: dict[tuple[float, int], float] = {}


def _log_norm_constant(rho: float, n: int) -> float:
    key = (float(rho), int(n))
    cached = _log_norm_cache.get(key)
    if cached is not None:
        return cached
    grid = np.linspace(-1.0 + _NORM_EPS, 1.0 - _NORM_EPS, _NORM_GRID_POINTS)
    log_shape = _log_density_shape(grid, rho, n)
    peak = log_shape.max()
    area = np.trapezoid(np.exp(log_shape - peak), grid)
    log_c = -(peak + math.log(area))
    _log_norm_cache[key] = log_c
    return log_c


def pearson_density(r, rho: float, n: int):
    """Exact sampling density of the Pearson coefficient at ``r``.

    Requires n >= 4 and |rho| < 1; |r| >= 1 is a domain error.  The
    value integrates to one over (-1, 1) by construction.
    """
    params = NormalTheoryParams(rho, n)
    if params.n < 4:
        raise InputError("density requires a sample size of at least 4")
    r_arr = np.asarray(r, dtype=float)
    if np.any(np.abs(r_arr) >= 1.0):
        raise InputError("density argument must lie strictly inside (-1, 1)")
    out = np.exp(_log_density_shape(r_arr, rho, n) + _log_norm_constant(rho, n))
    return out if np.ndim(r) else float(out)


def _null_pearson_density(r, n: int):
    """Closed beta-function form of the density at rho = 0 (cross-check)."""
    r_arr = np.asarray(r, dtype=float)
    log_b = special.betaln(0.5, 0.5 * (n - 2.0))
    return np.exp(0.5 * (n - 4.0) * np.log1p(-r_arr * r_arr) - log_b)


def density_curve(rho: float, n: int, points: int = 4001,
                  eps: float = 1e-6) -> DensityCurve:
    """Density evaluated on an even grid spanning (-1 + eps, 1 - eps)."""
    if points < 3:
        raise InputError("need at least 3 grid points")
    grid = np.linspace(-1.0 + eps, 1.0 - eps, points)
    return DensityCurve(grid=grid, density=pearson_density(grid, rho, n),
                        rho=rho, n=n)


# ---------------------------------------------------------------------------
# Expected values (small-sample bias)
# ---------------------------------------------------------------------------

def expected_pearson(rho: float, n: int) -> float:
    """Expected value of the sample Pearson coefficient at size n.

    Underestimates |rho| in magnitude; the gap closes as n grows.
    """
    if n < 2:
        raise InputError(f"sample size must be >= 2, got {n}")
    if not -1.0 <= rho <= 1.0:
        raise InputError(f"rho must lie in [-1, 1], got {rho}")
    if abs(rho) == 1.0:
        return float(rho)  # point mass at +-1
    log_pref = 2.0 * (special.gammaln(0.5 * n) - special.gammaln(0.5 * (n - 1.0)))
    pref = 2.0 * math.exp(log_pref) / (n - 1.0)
    return pref * rho * hyp2f1_half_half(0.5 * (n + 1.0), rho * rho)


def expected_spearman(rho: float, n: int) -> float:
    """Expected value of the sample Spearman coefficient at size n."""
    if n < 2:
        raise InputError(f"sample size must be >= 2, got {n}")
    if not -1.0 <= rho <= 1.0:
        raise InputError(f"rho must lie in [-1, 1], got {rho}")
    return (6.0 / (math.pi * (n + 1.0))
            * (math.asin(rho) + (n - 2.0) * math.asin(0.5 * rho)))


def expected_spearman_from_mix(rho: float, n: int) -> float:
    """Same expectation written as a population Spearman/Kendall mixture."""
    rs = spearman_from_pearson(rho)
    rt = kendall_from_pearson(rho)
    return ((n - 2.0) * rs + 3.0 * rt) / (n + 1.0)


# ---------------------------------------------------------------------------
# Population coefficient conversions (bivariate normal)
# ---------------------------------------------------------------------------

def _check_unit_interval(value: float, name: str) -> float:
    if not -1.0 <= value <= 1.0:
        raise InputError(f"{name} must lie in [-1, 1], got {value}")
    return float(value)


def spearman_from_pearson(rho: float) -> float:
    """Population Spearman coefficient matching a population Pearson value."""
    rho = _check_unit_interval(rho, "rho")
    return 6.0 / math.pi * math.asin(0.5 * rho)


def kendall_from_pearson(rho: float) -> float:
    """Population Kendall coefficient matching a population Pearson value."""
    rho = _check_unit_interval(rho, "rho")
    return 2.0 / math.pi * math.asin(rho)


def spearman_from_kendall(tau: float) -> float:
    """Population Spearman coefficient matching a population Kendall value."""
    tau = _check_unit_interval(tau, "tau")
    return 6.0 / math.pi * math.asin(0.5 * math.sin(0.5 * math.pi * tau))


def pearson_from_kendall(tau: float) -> float:
    """Inverse of :func:`kendall_from_pearson`."""
    tau = _check_unit_interval(tau, "tau")
    return math.sin(0.5 * math.pi * tau)


# ---------------------------------------------------------------------------
# Fisher-z inference
# ---------------------------------------------------------------------------

def fisher_z(r: float) -> float:
    """Variance-stabilizing transform atanh(r); |r| = 1 is out of domain."""
    if not -1.0 < r < 1.0:
        raise InputError(f"fisher_z requires |r| < 1, got {r}")
    return math.atanh(r)


def fisher_z_inverse(z: float) -> float:
    return math.tanh(z)


def _z_interval(r: float, n: int, level: float, variance_scale: float):
    if not 0.0 < level < 1.0:
        raise InputError(f"confidence level must lie in (0, 1), got {level}")
    if n < 4:
        raise InputError("interval estimation needs n >= 4")
    z = fisher_z(r)
    crit = special.ndtri(0.5 * (1.0 + level))
    stderr = math.sqrt(variance_scale / (n - 3.0))
    return (math.tanh(z - crit * stderr), math.tanh(z + crit * stderr))


def fisher_interval(r: float, n: int, level: float = 0.95):
    """Confidence interval for a Pearson coefficient via the z transform."""
    return _z_interval(r, n, level, 1.0)


def spearman_interval(r: float, n: int, level: float = 0.95):
    """Approximate interval for a Spearman coefficient.

    Uses atanh with standard error sqrt(1.06 / (n - 3)).  This is an
    approximation only; its coverage is validated empirically, not
    derived, so treat it as a rough guide.
    """
    return _z_interval(r, n, level, 1.06)
