"""
Squared exponential covariance, jittered Cholesky factorization and
Gaussian process simulation on grids.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist

from prefsample.spatial_core.geometry import Point2, PointsLike, RegularGrid, as_points
from prefsample.utils.errors import DegenerateCovarianceError
from prefsample.utils.logger import get_logger
from prefsample.utils.seed_management import get_generator

# jitter starts at this multiple of amplitude^2 and grows x10 per failed attempt
JITTER_START = 1e-8
JITTER_MAX = 1e-4


@dataclass(frozen=True)
class CovSpec:
    """
    Squared exponential kernel alpha^2 * exp(-|a-b|^2 / (2 rho^2)).

    :param amplitude: alpha
    :param length_scale: rho, in domain units
    :param jitter: minimum variance added to the diagonal
    """
    amplitude: float = 1.0
    length_scale: float = 0.5
    jitter: float = 0.0

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError(f"amplitude must be > 0, got {self.amplitude}")
        if not self.length_scale > 0:
            raise ValueError(f"length_scale must be > 0, got {self.length_scale}")
        if not self.jitter >= 0:
            raise ValueError(f"jitter must be >= 0, got {self.jitter}")

    @property
    def variance(self) -> float:
        return self.amplitude ** 2


@dataclass
class GPRealization:
    """A Gaussian process draw at the centers of a grid"""
    grid: RegularGrid
    values: np.ndarray
    spec: CovSpec
    seed: int
    jitter_used: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.size,):
            raise ValueError(f"GP values length {self.values.shape} does not match grid size {self.grid.size}")


def sq_exp_cov(a: Point2, b: Point2, spec: CovSpec) -> float:
    """Covariance between two locations"""
    d2 = (a.s1 - b.s1) ** 2 + (a.s2 - b.s2) ** 2
    return spec.variance * float(np.exp(-d2 / (2.0 * spec.length_scale ** 2)))


def sq_exp_kernel(x1: PointsLike, x2: PointsLike, spec: CovSpec) -> np.ndarray:
    """Cross-covariance matrix between two point sets (no jitter)"""
    d2 = cdist(as_points(x1), as_points(x2), metric="sqeuclidean")
    return spec.variance * np.exp(-d2 / (2.0 * spec.length_scale ** 2))


def cholesky_with_jitter(cov: np.ndarray, spec: CovSpec) -> Tuple[np.ndarray, float]:
    """
    Lower Cholesky factor of cov + jitter * I.

    Jitter starts at max(spec.jitter, 1e-8 * alpha^2) and is multiplied by 10
    until the factorization succeeds, up to max(spec.jitter, 1e-4 * alpha^2).

    :return: (L, jitter actually used)
    :raises DegenerateCovarianceError: if every jitter level fails
    """
    logger = get_logger()
    jitter = max(spec.jitter, JITTER_START * spec.variance)
    ceiling = max(spec.jitter, JITTER_MAX * spec.variance)
    eye = np.eye(cov.shape[0])
    while True:
        try:
            factor = linalg.cholesky(cov + jitter * eye, lower=True, check_finite=True)
            logger.debug(f"cholesky_with_jitter: n={cov.shape[0]} succeeded with jitter {jitter:.1e}")
            return factor, jitter
        except linalg.LinAlgError:
            logger.debug(f"cholesky_with_jitter: failed at jitter {jitter:.1e}")
            if jitter >= ceiling * (1 - 1e-12):
                break
            jitter = min(jitter * 10.0, ceiling)
    raise DegenerateCovarianceError(
        f"Covariance of {cov.shape[0]} points is not positive definite even with jitter {ceiling:.1e}; "
        f"the point set is numerically degenerate")


def build_cov_matrix(points: PointsLike, spec: CovSpec) -> np.ndarray:
    """
    Gram matrix of the kernel at points, with the jitter needed for a
    successful Cholesky factorization added to the diagonal.
    """
    pts = as_points(points)
    if pts.shape[0] < 1:
        raise ValueError("build_cov_matrix needs at least one point")
    cov = sq_exp_kernel(pts, pts, spec)
    cov = 0.5 * (cov + cov.T)
    _, jitter = cholesky_with_jitter(cov, spec)
    return cov + jitter * np.eye(pts.shape[0])


def simulate_gp(grid: RegularGrid, spec: CovSpec, seed: int) -> GPRealization:
    """
    Draw a zero-mean GP at the grid centers: values = L @ xi with xi ~ N(0, I).
    """
    logger = get_logger()
    centers = grid.centers
    cov = sq_exp_kernel(centers, centers, spec)
    cov = 0.5 * (cov + cov.T)
    factor, jitter = cholesky_with_jitter(cov, spec)
    rng = get_generator(seed)
    xi = rng.standard_normal(grid.size)
    values = factor @ xi
    logger.debug(f"simulate_gp: {grid}, alpha={spec.amplitude}, rho={spec.length_scale}, seed={seed}")
    return GPRealization(grid=grid, values=values, spec=spec, seed=seed, jitter_used=jitter)
