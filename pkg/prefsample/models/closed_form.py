"""
Closed-form weighted estimators: weighted least squares solving the
pseudo-likelihood estimating equations, and the regression on the weight
as an extra covariate.
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg

from prefsample.sampling_management.sample_set import SampleSet
from prefsample.spatial_core.geometry import PointsLike, as_points
from prefsample.utils.errors import RankDeficiencyError
from prefsample.utils.logger import get_logger
from prefsample.utils.seed_management import get_generator
from prefsample.weight_management.weights import WeightVector


def _check_rank(design: np.ndarray, what: str):
    rank = np.linalg.matrix_rank(design)
    if rank < design.shape[1]:
        raise RankDeficiencyError(f"{what}: design matrix has rank {rank} < {design.shape[1]} columns")


def wls_solve(samples: SampleSet, weights: WeightVector,
              design: Optional[np.ndarray] = None) -> Tuple[np.ndarray, float]:
    """
    beta = (X'WX)^-1 X'Wz with W = diag(normalized weights); X defaults to the locations.

    :return: (beta, weighted residual variance sum w r^2 / (n - p))
    :raises RankDeficiencyError: if X'WX is singular
    """
    x = samples.locations if design is None else np.asarray(design, dtype=float)
    w = weights.normalized
    sqrt_w = np.sqrt(w)
    _check_rank(sqrt_w[:, None] * x, "wls_solve")
    gram = x.T @ (w[:, None] * x)
    beta = linalg.solve(gram, x.T @ (w * samples.z), assume_a="pos")
    residuals = samples.z - x @ beta
    dof = max(samples.n - x.shape[1], 1)
    return beta, float(np.sum(w * residuals ** 2) / dof)


def weighted_score(samples: SampleSet, weights: WeightVector, beta: np.ndarray, sigma2: float,
                   design: Optional[np.ndarray] = None) -> np.ndarray:
    """sum_i w_i d/dbeta log N(z_i; x_i'beta, sigma2) = X'W(z - X beta) / sigma2"""
    x = samples.locations if design is None else np.asarray(design, dtype=float)
    residuals = samples.z - x @ np.asarray(beta, dtype=float)
    return x.T @ (weights.normalized * residuals) / sigma2


@dataclass
class WeightCovariateFit:
    """
    OLS fit of z on [1?, s1, s2, w].

    :param beta: coefficients on (s1, s2)
    :param a: coefficient on the normalized weight
    :param intercept: fitted intercept, 0 when the design has none
    :param residual_variance: sum r^2 / (n - p)
    :param covariance: sampling covariance of the full coefficient vector
    """
    beta: np.ndarray
    a: float
    intercept: float
    residual_variance: float
    covariance: np.ndarray
    has_intercept: bool

    def coefficients(self) -> np.ndarray:
        head = [self.intercept] if self.has_intercept else []
        return np.concatenate([head, self.beta, [self.a]])


def weight_covariate_design(locations: PointsLike, w: np.ndarray, intercept: bool) -> np.ndarray:
    pts = as_points(locations)
    columns = [np.ones(pts.shape[0])] if intercept else []
    columns += [pts[:, 0], pts[:, 1], np.asarray(w, dtype=float)]
    return np.column_stack(columns)


def weight_covariate_fit(samples: SampleSet, weights: WeightVector, intercept: bool = False) -> WeightCovariateFit:
    """
    Regress z on the coordinates and the normalized weight, g(w) = a * w.

    :raises RankDeficiencyError: if the weight is collinear with the other columns
    """
    x = weight_covariate_design(samples.locations, weights.normalized, intercept)
    _check_rank(x, "weight_covariate_fit")
    coef, _, _, _ = linalg.lstsq(x, samples.z)
    residuals = samples.z - x @ coef
    dof = max(samples.n - x.shape[1], 1)
    resid_var = float(residuals @ residuals / dof)
    covariance = resid_var * linalg.inv(x.T @ x)
    offset = 1 if intercept else 0
    get_logger().debug(f"weight_covariate_fit: coefficients {np.round(coef, 4)}")
    return WeightCovariateFit(beta=coef[offset:offset + 2], a=float(coef[offset + 2]),
                              intercept=float(coef[0]) if intercept else 0.0,
                              residual_variance=resid_var, covariance=covariance, has_intercept=intercept)


class WeightCovariateModel:
    """
    Weight-covariate regression (WCR) bound to a data set. Its "draws" come from
    the normal sampling distribution of the OLS coefficients, so summaries and
    surfaces go through the same path as the Bayesian models.
    """

    def __init__(self, samples: SampleSet, weights: WeightVector, intercept: bool = False):
        self.samples = samples
        self.weights = weights
        self.intercept = intercept
        self.fit = weight_covariate_fit(samples, weights, intercept)

    @property
    def parameter_names(self) -> List[str]:
        head = ["intercept"] if self.intercept else []
        return head + ["beta_1", "beta_2", "a_w"]

    def sample(self, n_draws: int, seed: int) -> np.ndarray:
        rng = get_generator(seed)
        factor = np.linalg.cholesky(self.fit.covariance + 1e-14 * np.eye(self.fit.covariance.shape[0]))
        xi = rng.standard_normal((n_draws, factor.shape[0]))
        return self.fit.coefficients()[None, :] + xi @ factor.T

    def to_output(self, draws: np.ndarray) -> np.ndarray:
        return draws

    def mean_function(self, draws: np.ndarray, points: PointsLike) -> np.ndarray:
        """intercept + s'beta + a * 1, the mean normalized weight"""
        pts = as_points(points)
        draws = np.atleast_2d(draws)
        design = weight_covariate_design(pts, np.ones(pts.shape[0]), self.intercept)
        return draws @ design.T
