"""
Chi-square quantiles and ANEES/NIS acceptance intervals.

Quantiles are computed in-repo: a Wilson-Hilferty normal approximation
brackets the root, which is then refined on the regularized lower
incomplete gamma function P(dof/2, x/2) until the CDF matches the target
probability. This works for the arbitrary dof*N needed by ANEES bounds.
"""

import math
from typing import Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammainc, ndtri

from delaycal.errors import ArgumentError


def chi2_cdf(x: float, dof: float) -> float:
    """P(chi2_dof <= x)."""
    if x <= 0:
        return 0.0
    return float(gammainc(dof / 2.0, x / 2.0))


def wilson_hilferty(p: float, dof: float) -> float:
    """Approximate chi-square quantile via the cube-root normal transform."""
    z = float(ndtri(p))
    c = 2.0 / (9.0 * dof)
    return max(dof * (1.0 - c + z * math.sqrt(c)) ** 3, 0.0)


def chi2_quantile(p: float, dof: float) -> float:
    """
    Inverse CDF of the chi-square distribution.

    Raises:
        ArgumentError: p outside (0, 1) or dof <= 0
    """
    if not 0.0 < p < 1.0:
        raise ArgumentError(f"probability must lie in (0, 1) (got {p})")
    if not dof > 0:
        raise ArgumentError(f"degrees of freedom must be positive (got {dof})")

    guess = wilson_hilferty(p, dof)
    lo = guess / 2.0 if guess > 0 else 0.0
    hi = max(2.0 * guess, dof + 10.0 * math.sqrt(2.0 * dof), 1.0)
    while chi2_cdf(lo, dof) > p:
        lo /= 4.0
        if lo < 1e-300:
            lo = 0.0
            break
    while chi2_cdf(hi, dof) < p:
        hi *= 2.0

    return float(
        brentq(lambda x: chi2_cdf(x, dof) - p, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    )


def chi2_anees_interval(dof: int, n_trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    """
    Two-sided acceptance interval for an average of n_trials chi2(dof) values.

    Returns:
        (chi2_{dof*N}((1-c)/2) / N, chi2_{dof*N}((1+c)/2) / N)

    Raises:
        ArgumentError: dof < 1, n_trials < 1, or confidence outside (0, 1)
    """
    if dof < 1:
        raise ArgumentError(f"dof must be >= 1 (got {dof})")
    if n_trials < 1:
        raise ArgumentError(f"n_trials must be >= 1 (got {n_trials})")
    if not 0.0 < confidence < 1.0:
        raise ArgumentError(f"confidence must lie in (0, 1) (got {confidence})")

    total_dof = dof * n_trials
    lo = chi2_quantile((1.0 - confidence) / 2.0, total_dof) / n_trials
    hi = chi2_quantile((1.0 + confidence) / 2.0, total_dof) / n_trials
    return lo, hi
