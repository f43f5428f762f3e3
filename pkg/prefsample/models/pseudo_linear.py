"""
Weighted pseudo-posterior for the linear trend model z = s'beta + noise.
"""
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from prefsample.models.log_densities import half_cauchy_log_scale, normal_logpdf, weighted_gaussian_loglik
from prefsample.sampling_management.sample_set import SampleSet
from prefsample.spatial_core.geometry import PointsLike, as_points
from prefsample.utils.errors import NonFiniteDensityError
from prefsample.weight_management.weights import WeightVector

LINEAR_PARAMETER_NAMES = ["beta_1", "beta_2", "log_sigma_z"]


@dataclass
class PseudoLinearSpec:
    """
    :param weights: normalized weights exponentiating each likelihood term
    :param prior_beta_var: prior variance of each beta component
    :param prior_sigma_scale: scale of the half-Cauchy prior on sigma_z
    """
    weights: WeightVector
    prior_beta_var: float = float(np.sqrt(10.0))
    prior_sigma_scale: float = 10.0

    def __post_init__(self):
        if not (self.prior_beta_var > 0 and self.prior_sigma_scale > 0):
            raise ValueError("PseudoLinearSpec prior parameters must be > 0")


def log_pseudo_posterior_linear(spec: PseudoLinearSpec, samples: SampleSet,
                                params: Sequence[float]) -> Tuple[float, np.ndarray]:
    """
    sum_i w_i log N(z_i; s_i'beta, sigma_z^2) + log N2(beta; 0, v I)
      + log HalfCauchy(sigma_z; A) + log sigma_z

    :param params: (beta_1, beta_2, log sigma_z)
    :return: (value, gradient)
    :raises NonFiniteDensityError: on overflow
    """
    theta = np.asarray(params, dtype=float)
    beta, log_sigma = theta[:2], theta[2]
    x = samples.locations
    residuals = samples.z - x @ beta

    value, d_resid, d_log_sigma = weighted_gaussian_loglik(residuals, spec.weights.normalized, log_sigma)
    grad = np.empty(3)
    grad[:2] = -(x.T @ d_resid)
    grad[2] = d_log_sigma

    value += float(np.sum(normal_logpdf(beta, spec.prior_beta_var)))
    grad[:2] -= beta / spec.prior_beta_var

    prior_sigma, d_prior_sigma = half_cauchy_log_scale(log_sigma, spec.prior_sigma_scale)
    value += float(prior_sigma)
    grad[2] += float(d_prior_sigma)

    if not (np.isfinite(value) and np.all(np.isfinite(grad))):
        raise NonFiniteDensityError(f"Linear pseudo-posterior is not finite at {theta}")
    return value, grad


class PseudoLinearModel:
    """Linear-trend pseudo-likelihood model bound to a data set (UW/PEW/PKW in Scenario 1)"""

    def __init__(self, spec: PseudoLinearSpec, samples: SampleSet):
        if spec.weights.n != samples.n:
            raise ValueError(f"{spec.weights.n} weights for {samples.n} samples")
        self.spec = spec
        self.samples = samples

    @property
    def parameter_names(self) -> List[str]:
        return list(LINEAR_PARAMETER_NAMES)

    def log_density(self, theta: np.ndarray) -> Tuple[float, np.ndarray]:
        return log_pseudo_posterior_linear(self.spec, self.samples, theta)

    def initial_point(self) -> np.ndarray:
        """Weighted least squares estimate as the chain's starting point"""
        from prefsample.models.closed_form import wls_solve
        beta, resid_var = wls_solve(self.samples, self.spec.weights)
        return np.array([beta[0], beta[1], 0.5 * np.log(max(resid_var, 1e-8))])

    def to_output(self, draws: np.ndarray) -> np.ndarray:
        return draws

    def mean_function(self, draws: np.ndarray, points: PointsLike) -> np.ndarray:
        """(m, n_points) matrix of s'beta for each draw"""
        return np.asarray(draws)[:, :2] @ as_points(points).T
