"""
Log densities of the prior/likelihood building blocks, with derivatives
with respect to the unconstrained (log) scale where a scale is involved.
"""
from typing import Tuple

import numpy as np
from scipy.special import expit

LOG_2PI = float(np.log(2.0 * np.pi))
LOG_2_OVER_PI = float(np.log(2.0 / np.pi))


def normal_logpdf(x: np.ndarray, variance: float) -> np.ndarray:
    """log N(x; 0, variance), elementwise"""
    return -0.5 * (LOG_2PI + np.log(variance)) - 0.5 * np.square(x) / variance


def half_cauchy_log_scale(log_scale: np.ndarray, cauchy_scale: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    log HalfCauchy(exp(u); 0, A) + u (Jacobian of the log transform), and its
    derivative with respect to u. Elementwise.
    """
    u = np.asarray(log_scale, dtype=float)
    t = 2.0 * (u - np.log(cauchy_scale))
    value = LOG_2_OVER_PI - np.log(cauchy_scale) - np.logaddexp(0.0, t) + u
    grad = 1.0 - 2.0 * expit(t)
    return value, grad


def weighted_gaussian_loglik(residuals: np.ndarray, weights: np.ndarray, log_sigma: float) -> Tuple[float, np.ndarray, float]:
    """
    sum_i w_i * log N(r_i; 0, sigma^2).

    :return: (value, d value / d residuals, d value / d log_sigma)
    """
    inv_var = np.exp(-2.0 * log_sigma)
    value = float(np.sum(weights * (-0.5 * LOG_2PI - log_sigma - 0.5 * np.square(residuals) * inv_var)))
    d_resid = -weights * residuals * inv_var
    d_log_sigma = float(np.sum(weights * (np.square(residuals) * inv_var - 1.0)))
    return value, d_resid, d_log_sigma
