"""
Shared latent process model: a kernel-convolution field Y(s) drives both the
log intensity of the sampling locations and the mean of the response.

    log lambda(s) = alpha + Y(s)
    z(s)          = mu + x(s)'b + beta * Y(s) + noise
    Y(s)          = sum_j k(s - u_j) gamma_j,   gamma_j ~ N(0, sigma_gamma^2)
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from prefsample.models.log_densities import half_cauchy_log_scale, normal_logpdf, weighted_gaussian_loglik
from prefsample.sampling_management.sample_set import SampleSet
from prefsample.spatial_core.geometry import PointsLike, RectDomain, RegularGrid, as_points
from prefsample.utils.errors import NonFiniteDensityError
from prefsample.utils.singleton_management import SingletonManager

KNOT_MARGIN = 0.2
DEFAULT_KNOTS_PER_AXIS = 15
DEFAULT_FIT_GRID_SIZE = 41


@dataclass(frozen=True)
class SharedProcessSpec:
    """
    :param knot_domain: rectangle carrying the knot lattice
    :param knots_per_axis: knot lattice is knots_per_axis x knots_per_axis, edges included
    :param fit_grid: grid used for the point-process integral
    :param kernel_sd: standard deviation of the Gaussian convolution kernel
    :param covariates: include x(s) = (s1, s2) fixed effects in the response mean
    :param prior_sd: sd of the normal priors on mu, alpha, beta and b
    :param scale_prior: scale of the half-Cauchy priors on sigma_z and sigma_gamma
    """
    knot_domain: RectDomain
    knots_per_axis: int
    fit_grid: RegularGrid
    kernel_sd: float
    covariates: bool = False
    prior_sd: float = 10.0
    scale_prior: float = 1.0

    def __post_init__(self):
        if self.knots_per_axis < 2:
            raise ValueError(f"knots_per_axis must be >= 2, got {self.knots_per_axis}")
        if not self.kernel_sd > 0:
            raise ValueError(f"kernel_sd must be > 0, got {self.kernel_sd}")
        tol = 1e-12 * self.kernel_sd
        if max(self.knot_spacing) > self.kernel_sd + tol:
            raise ValueError(f"Knot spacing {max(self.knot_spacing):.4g} exceeds kernel sd {self.kernel_sd:.4g}")
        if max(self.fit_grid.spacing1, self.fit_grid.spacing2) > self.kernel_sd + tol:
            raise ValueError(f"Fit grid spacing exceeds kernel sd {self.kernel_sd:.4g}")
        if not self.knot_domain.contains_domain(self.fit_grid.domain):
            raise ValueError("Knots must cover the fit grid domain")

    @classmethod
    def default(cls, domain: Optional[RectDomain] = None, covariates: bool = False,
                knots_per_axis: int = DEFAULT_KNOTS_PER_AXIS,
                grid_size: int = DEFAULT_FIT_GRID_SIZE) -> "SharedProcessSpec":
        """15x15 knots on the domain grown by 20% per side, 41x41 fit grid, kernel sd = knot spacing"""
        domain = domain or RectDomain.unit_square()
        knot_domain = domain.expand(KNOT_MARGIN)
        spacing = max(knot_domain.width1, knot_domain.width2) / (knots_per_axis - 1)
        return cls(knot_domain=knot_domain, knots_per_axis=knots_per_axis,
                   fit_grid=RegularGrid.square(domain, grid_size), kernel_sd=spacing, covariates=covariates)

    @property
    def knot_spacing(self) -> Tuple[float, float]:
        m = self.knots_per_axis - 1
        return self.knot_domain.width1 / m, self.knot_domain.width2 / m

    @property
    def knots(self) -> np.ndarray:
        a1 = np.linspace(self.knot_domain.min1, self.knot_domain.max1, self.knots_per_axis)
        a2 = np.linspace(self.knot_domain.min2, self.knot_domain.max2, self.knots_per_axis)
        c1, c2 = np.meshgrid(a1, a2, indexing="xy")
        return np.column_stack([c1.ravel(), c2.ravel()])

    @property
    def n_knots(self) -> int:
        return self.knots_per_axis ** 2

    @property
    def n_covariates(self) -> int:
        return 2 if self.covariates else 0

    @property
    def n_params(self) -> int:
        return self.n_knots + self.n_covariates + 5

    def parameter_names(self) -> List[str]:
        names = [f"gamma_{j + 1}" for j in range(self.n_knots)] + ["mu"]
        names += [f"beta_{i + 1}" for i in range(self.n_covariates)]
        return names + ["beta_ps", "alpha", "log_sigma_z", "log_sigma_gamma"]


@dataclass
class SharedParams:
    """Unpacked shared-process parameter vector"""
    gamma: np.ndarray
    mu: float
    b: np.ndarray
    beta: float
    alpha: float
    log_sigma_z: float
    log_sigma_gamma: float

    @classmethod
    def unpack(cls, spec: SharedProcessSpec, theta: Sequence[float]) -> "SharedParams":
        theta = np.asarray(theta, dtype=float)
        if theta.shape[0] != spec.n_params:
            raise ValueError(f"Expected {spec.n_params} shared-process parameters, got {theta.shape[0]}")
        j, q = spec.n_knots, spec.n_covariates
        return cls(gamma=theta[:j].copy(), mu=float(theta[j]), b=theta[j + 1:j + 1 + q].copy(),
                   beta=float(theta[j + 1 + q]), alpha=float(theta[j + 2 + q]),
                   log_sigma_z=float(theta[j + 3 + q]), log_sigma_gamma=float(theta[j + 4 + q]))

    def pack(self) -> np.ndarray:
        return np.concatenate([self.gamma, [self.mu], self.b,
                               [self.beta, self.alpha, self.log_sigma_z, self.log_sigma_gamma]])


def kernel_matrix(points: PointsLike, spec: SharedProcessSpec) -> np.ndarray:
    """(n, J) matrix k(s_i - u_j) = exp(-|s_i - u_j|^2 / (2 kernel_sd^2))"""
    d2 = cdist(as_points(points), spec.knots, metric="sqeuclidean")
    return np.exp(-d2 / (2.0 * spec.kernel_sd ** 2))


def grid_kernel_matrix(spec: SharedProcessSpec) -> np.ndarray:
    """Kernel matrix at the fit grid centers; shared per process since it depends only on geometry"""
    key = f"shared_grid_kernel:{spec.knot_domain}:{spec.knots_per_axis}:{spec.fit_grid}:{spec.kernel_sd!r}"
    return SingletonManager.get_or_create(key, lambda: kernel_matrix(spec.fit_grid.centers, spec))


def point_process_term(alpha: float, y_obs: np.ndarray, y_grid: np.ndarray, cell_area: float) -> float:
    """sum over observations of log lambda minus the grid approximation of the integral of lambda"""
    return float(np.sum(alpha + y_obs) - cell_area * np.sum(np.exp(alpha + y_grid)))


def response_term(z: np.ndarray, mean: np.ndarray, log_sigma_z: float) -> float:
    value, _, _ = weighted_gaussian_loglik(z - mean, np.ones_like(z), log_sigma_z)
    return value


def scalar_prior_term(spec: SharedProcessSpec, params: SharedParams) -> float:
    """Priors on mu, b, beta, alpha, sigma_z and sigma_gamma (with log-scale Jacobians)"""
    var = spec.prior_sd ** 2
    value = float(np.sum(normal_logpdf(np.concatenate([[params.mu, params.beta, params.alpha], params.b]), var)))
    sz, _ = half_cauchy_log_scale(params.log_sigma_z, spec.scale_prior)
    sg, _ = half_cauchy_log_scale(params.log_sigma_gamma, spec.scale_prior)
    return value + float(sz) + float(sg)


def gamma_prior_term(gamma: np.ndarray, log_sigma_gamma: float) -> float:
    return float(np.sum(normal_logpdf(gamma, np.exp(2.0 * log_sigma_gamma))))


def covariate_matrix(points: PointsLike, spec: SharedProcessSpec) -> np.ndarray:
    pts = as_points(points)
    return pts if spec.covariates else np.empty((pts.shape[0], 0))


def log_posterior_shared(spec: SharedProcessSpec, samples: SampleSet, params: Sequence[float],
                         k_obs: Optional[np.ndarray] = None) -> float:
    """
    Point-process term + response term + priors.

    :param params: (gamma[J], mu, b[q], beta, alpha, log sigma_z, log sigma_gamma)
    :param k_obs: precomputed kernel matrix at the sample locations
    :raises NonFiniteDensityError: on overflow
    """
    p = SharedParams.unpack(spec, params)
    k_obs = k_obs if k_obs is not None else kernel_matrix(samples.locations, spec)
    y_obs = k_obs @ p.gamma
    y_grid = grid_kernel_matrix(spec) @ p.gamma
    mean = p.mu + covariate_matrix(samples.locations, spec) @ p.b + p.beta * y_obs

    value = (point_process_term(p.alpha, y_obs, y_grid, spec.fit_grid.cell_area)
             + response_term(samples.z, mean, p.log_sigma_z)
             + gamma_prior_term(p.gamma, p.log_sigma_gamma)
             + scalar_prior_term(spec, p))
    if not np.isfinite(value):
        raise NonFiniteDensityError("Shared-process log posterior is not finite")
    return value


class SharedProcessModel:
    """Shared latent process model bound to a data set (PRD)"""

    def __init__(self, spec: SharedProcessSpec, samples: SampleSet):
        inside = spec.fit_grid.domain.contains(samples.locations)
        if not np.all(inside):
            raise ValueError(f"{int(np.sum(~inside))} sample locations lie outside the fit grid domain")
        self.spec = spec
        self.samples = samples
        self.k_obs = kernel_matrix(samples.locations, spec)
        self.k_grid = grid_kernel_matrix(spec)
        self.x_obs = covariate_matrix(samples.locations, spec)

    @property
    def parameter_names(self) -> List[str]:
        return self.spec.parameter_names()

    def log_density(self, theta: np.ndarray) -> float:
        return log_posterior_shared(self.spec, self.samples, theta, k_obs=self.k_obs)

    def initial_point(self) -> np.ndarray:
        """gamma = 0, mean and intensity at their flat-field estimates"""
        spec, z = self.spec, self.samples.z
        n = max(self.samples.n, 1)
        sd = float(np.std(z)) if self.samples.n > 1 else 1.0
        params = SharedParams(gamma=np.zeros(spec.n_knots), mu=float(np.mean(z)) if self.samples.n else 0.0,
                              b=np.zeros(spec.n_covariates), beta=0.0,
                              alpha=float(np.log(n / spec.fit_grid.domain.area)),
                              log_sigma_z=float(np.log(max(sd, 1e-3))), log_sigma_gamma=0.0)
        if spec.covariates and self.samples.n > 3:
            design = np.column_stack([np.ones(self.samples.n), self.x_obs])
            coef, *_ = np.linalg.lstsq(design, z, rcond=None)
            params.mu, params.b = float(coef[0]), coef[1:]
        return params.pack()

    def to_output(self, draws: np.ndarray) -> np.ndarray:
        return draws

    def mean_function(self, draws: np.ndarray, points: PointsLike) -> np.ndarray:
        """(m, n_points) matrix of mu + x(s)'b + beta * Y(s) for each draw"""
        spec = self.spec
        pts = as_points(points)
        draws = np.atleast_2d(np.asarray(draws, dtype=float))
        j, q = spec.n_knots, spec.n_covariates
        kmat = kernel_matrix(pts, spec)
        y = draws[:, :j] @ kmat.T
        mean = draws[:, j:j + 1] + draws[:, j + 1 + q:j + 2 + q] * y
        if q:
            mean = mean + draws[:, j + 1:j + 1 + q] @ covariate_matrix(pts, spec).T
        return mean
