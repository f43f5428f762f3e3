"""
Weighted pseudo-posterior for the basis-expansion spatial model
z(s) = sum_k phi_k(s) eta_k + noise, with a horseshoe prior on eta.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from prefsample.models.log_densities import half_cauchy_log_scale, weighted_gaussian_loglik, LOG_2PI
from prefsample.sampling_management.sample_set import SampleSet
from prefsample.spatial_core.basis import BasisSet, evaluate_basis_matrix
from prefsample.spatial_core.geometry import PointsLike
from prefsample.utils.errors import NonFiniteDensityError
from prefsample.weight_management.weights import WeightVector


@dataclass
class BasisSpatialSpec:
    """
    Horseshoe: eta_k ~ N(0, (lambda_k tau)^2), lambda_k, tau ~ HalfCauchy(0, 1).
    sigma_z ~ HalfCauchy(0, prior_sigma_scale).
    """
    basis: BasisSet
    weights: WeightVector
    local_scale: float = 1.0
    global_scale: float = 1.0
    prior_sigma_scale: float = 10.0

    def __post_init__(self):
        if self.basis.size == 0:
            raise ValueError("BasisSpatialSpec needs a nonempty basis")
        if not (self.local_scale > 0 and self.global_scale > 0 and self.prior_sigma_scale > 0):
            raise ValueError("BasisSpatialSpec prior scales must be > 0")

    @property
    def n_basis(self) -> int:
        return self.basis.size


def _split(theta: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray, float, float]:
    if theta.shape[0] != 2 * k + 2:
        raise ValueError(f"Expected {2 * k + 2} basis-model parameters, got {theta.shape[0]}")
    return theta[:k], theta[k:2 * k], float(theta[2 * k]), float(theta[2 * k + 1])


def log_pseudo_posterior_basis(spec: BasisSpatialSpec, samples: SampleSet, params: Sequence[float],
                               design: Optional[np.ndarray] = None) -> Tuple[float, np.ndarray]:
    """
    Weighted Gaussian likelihood around Phi @ eta, horseshoe prior and
    log-scale Jacobians.

    :param params: (eta[K], log lambda[K], log tau, log sigma_z)
    :param design: precomputed basis matrix at the sample locations
    :return: (value, gradient)
    """
    theta = np.asarray(params, dtype=float)
    k = spec.n_basis
    eta, log_lam, log_tau, log_sigma = _split(theta, k)
    phi = design if design is not None else evaluate_basis_matrix(samples.locations, spec.basis)

    residuals = samples.z - phi @ eta
    value, d_resid, d_log_sigma = weighted_gaussian_loglik(residuals, spec.weights.normalized, log_sigma)
    grad = np.empty_like(theta)
    grad[:k] = -(phi.T @ d_resid)
    grad[2 * k + 1] = d_log_sigma

    # eta_k ~ N(0, (lambda_k tau)^2)
    log_scale = log_lam + log_tau
    scaled2 = np.square(eta) * np.exp(-2.0 * log_scale)
    value += float(np.sum(-0.5 * LOG_2PI - log_scale - 0.5 * scaled2))
    grad[:k] += -eta * np.exp(-2.0 * log_scale)
    grad[k:2 * k] = scaled2 - 1.0
    grad[2 * k] = float(np.sum(scaled2 - 1.0))

    lam_prior, d_lam_prior = half_cauchy_log_scale(log_lam, spec.local_scale)
    tau_prior, d_tau_prior = half_cauchy_log_scale(log_tau, spec.global_scale)
    sigma_prior, d_sigma_prior = half_cauchy_log_scale(log_sigma, spec.prior_sigma_scale)
    value += float(np.sum(lam_prior) + tau_prior + sigma_prior)
    grad[k:2 * k] += d_lam_prior
    grad[2 * k] += float(d_tau_prior)
    grad[2 * k + 1] += float(d_sigma_prior)

    if not (np.isfinite(value) and np.all(np.isfinite(grad))):
        raise NonFiniteDensityError("Basis pseudo-posterior is not finite")
    return value, grad


class BasisSpatialModel:
    """
    Basis-expansion pseudo-likelihood model bound to a data set (UW/PEW/PKW in Scenario 2).

    The chain runs in the non-centered coordinates (eta_raw, log lambda, log tau,
    log sigma_z) with eta = lambda * tau * eta_raw; to_output maps draws back to eta.
    """

    def __init__(self, spec: BasisSpatialSpec, samples: SampleSet):
        if spec.weights.n != samples.n:
            raise ValueError(f"{spec.weights.n} weights for {samples.n} samples")
        self.spec = spec
        self.samples = samples
        self.design = evaluate_basis_matrix(samples.locations, spec.basis)

    @property
    def parameter_names(self) -> List[str]:
        k = self.spec.n_basis
        return ([f"eta_{i + 1}" for i in range(k)] + [f"log_lambda_{i + 1}" for i in range(k)]
                + ["log_tau", "log_sigma_z"])

    def _to_centered(self, theta: np.ndarray) -> np.ndarray:
        k = self.spec.n_basis
        centered = np.array(theta, dtype=float, copy=True)
        centered[..., :k] = theta[..., :k] * np.exp(theta[..., k:2 * k] + theta[..., 2 * k:2 * k + 1])
        return centered

    def log_density(self, theta: np.ndarray) -> Tuple[float, np.ndarray]:
        """Log posterior in the non-centered coordinates"""
        k = self.spec.n_basis
        theta = np.asarray(theta, dtype=float)
        scale = np.exp(theta[k:2 * k] + theta[2 * k])
        centered = self._to_centered(theta)
        value, g = log_pseudo_posterior_basis(self.spec, self.samples, centered, design=self.design)
        g_eta = g[:k]
        eta = centered[:k]
        grad = np.empty_like(theta)
        grad[:k] = g_eta * scale
        grad[k:2 * k] = g[k:2 * k] + g_eta * eta + 1.0
        grad[2 * k] = g[2 * k] + float(np.sum(g_eta * eta)) + k
        grad[2 * k + 1] = g[2 * k + 1]
        value += float(np.sum(theta[k:2 * k]) + k * theta[2 * k])
        return value, grad

    def initial_point(self) -> np.ndarray:
        """Ridge fit of the basis coefficients with unit local and global scales"""
        k = self.spec.n_basis
        phi, z = self.design, self.samples.z
        w = self.spec.weights.normalized
        noise_var = max(float(np.var(z)) / 4.0, 1e-4)
        gram = phi.T @ (w[:, None] * phi) + noise_var * np.eye(k)
        eta = np.linalg.solve(gram, phi.T @ (w * z))
        theta = np.zeros(2 * k + 2)
        theta[:k] = eta
        theta[2 * k + 1] = 0.5 * np.log(noise_var)
        return theta

    def to_output(self, draws: np.ndarray) -> np.ndarray:
        return self._to_centered(np.asarray(draws, dtype=float))

    def mean_function(self, draws: np.ndarray, points: PointsLike) -> np.ndarray:
        """(m, n_points) matrix of Phi(points) @ eta for each output-space draw"""
        k = self.spec.n_basis
        phi = evaluate_basis_matrix(points, self.spec.basis)
        return np.asarray(draws)[:, :k] @ phi.T
