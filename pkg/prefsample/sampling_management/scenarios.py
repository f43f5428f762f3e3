"""
Data generators for the two preferential sampling scenarios.
"""
from typing import Optional, Tuple, Union

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from prefsample.sampling_management.point_process import inhomogeneous_ppp
from prefsample.sampling_management.sample_set import SampleSet, TruthSurface
from prefsample.spatial_core.covariance import GPRealization
from prefsample.spatial_core.geometry import Point2, PointsLike, RectDomain, RegularGrid, as_points
from prefsample.utils.enums import Scenario_tags
from prefsample.utils.errors import SamplingError
from prefsample.utils.logger import get_logger
from prefsample.utils.seed_management import get_generator

SCENARIO1_BETA = (5.0, 2.0)
SCENARIO1_PS_COEF = 2.0
SCENARIO1_EXPONENT = 8
MIN_KEPT_POINTS = 5
TRUTH_GRID_SIZE = 41
DEFAULT_NOISE_SD = float(np.sqrt(0.5))
DEFAULT_TARGET_N = 60


def default_truth_grid(domain: Optional[RectDomain] = None, size: int = TRUTH_GRID_SIZE) -> RegularGrid:
    return RegularGrid.square(domain or RectDomain.unit_square(), size)


def selection_prob_scn1(s: Union[Point2, PointsLike]) -> Union[float, np.ndarray]:
    """
    Probability of keeping a candidate at s: (1 - (s1-0.5)^2 - (s2-0.5)^2)^8.
    A Point2 gives a float, an (n, 2) array gives an (n,) array.
    """
    pts = as_points(s)
    base = 1.0 - (pts[:, 0] - 0.5) ** 2 - (pts[:, 1] - 0.5) ** 2
    prob = base ** SCENARIO1_EXPONENT
    if isinstance(s, Point2):
        return float(prob[0])
    return prob


def scenario1_mean(points: PointsLike, p_mean: float, p_sd: float) -> np.ndarray:
    """5*s1 + 2*s2 + 2*p_tilde(s) with p_tilde standardized by the given constants"""
    pts = as_points(points)
    p_tilde = _standardize(selection_prob_scn1(pts), p_mean, p_sd)
    return SCENARIO1_BETA[0] * pts[:, 0] + SCENARIO1_BETA[1] * pts[:, 1] + SCENARIO1_PS_COEF * p_tilde


def _standardize(values: np.ndarray, mean: float, sd: float) -> np.ndarray:
    # a zero-spread sample keeps the centered values only
    if sd > 0:
        return (values - mean) / sd
    return values - mean


def simulate_scenario1(n_candidates: int = 1000, noise_sd: float = DEFAULT_NOISE_SD, seed: int = 0,
                       grid: Optional[RegularGrid] = None,
                       candidates: Optional[PointsLike] = None) -> Tuple[SampleSet, TruthSurface]:
    """
    Thin uniform candidates on the unit square with selection_prob_scn1 and
    generate z = 5*s1 + 2*s2 + 2*p_tilde + noise on the kept points.

    :param n_candidates: number of uniform candidates (ignored when candidates is given)
    :param noise_sd: standard deviation of the Gaussian noise
    :param seed: integer seed
    :param grid: truth grid, 41x41 on the unit square by default
    :param candidates: fixed candidate locations instead of uniform draws
    :raises SamplingError: if fewer than 5 candidates are kept
    """
    logger = get_logger()
    rng = get_generator(seed)
    grid = grid or default_truth_grid()

    if candidates is None:
        if n_candidates < 10:
            raise ValueError(f"n_candidates must be >= 10, got {n_candidates}")
        candidates = rng.random((n_candidates, 2))
    else:
        candidates = as_points(candidates)
    probs = selection_prob_scn1(candidates)
    keep = rng.random(candidates.shape[0]) < probs
    kept = candidates[keep]
    if kept.shape[0] < MIN_KEPT_POINTS:
        raise SamplingError(f"Scenario1 seed {seed} kept only {kept.shape[0]} of {candidates.shape[0]} candidates")

    # p_tilde is standardized over every candidate, kept or not
    p_mean = float(np.mean(probs))
    p_sd = float(np.std(probs, ddof=1)) if probs.shape[0] > 1 else 0.0
    p_kept = probs[keep]
    noise = noise_sd * rng.standard_normal(kept.shape[0]) if noise_sd > 0 else np.zeros(kept.shape[0])
    z = scenario1_mean(kept, p_mean, p_sd) + noise

    truth = TruthSurface(grid=grid, values=scenario1_mean(grid.centers, p_mean, p_sd), p_mean=p_mean, p_sd=p_sd)
    samples = SampleSet(locations=kept, z=z, p_true=p_kept, scenario_tag=Scenario_tags.SCENARIO1)
    logger.debug(f"simulate_scenario1: seed={seed}, kept {samples.n} of {candidates.shape[0]}")
    return samples, truth


class SurfaceInterpolator:
    """
    Bilinear interpolation of grid-center values. Locations outside the hull of
    the centers are clamped onto it, so the interpolant never exceeds the
    largest grid value.
    """

    def __init__(self, grid: RegularGrid, values: np.ndarray):
        self.grid = grid
        a1, a2 = grid.axis1, grid.axis2
        image = grid.as_image(values)  # (n2, n1)
        self._lo = np.array([a1[0], a2[0]])
        self._hi = np.array([a1[-1], a2[-1]])
        self.max_value = float(np.max(values))
        if grid.n1 == 1 or grid.n2 == 1:
            self._constant = float(np.mean(values)) if np.ptp(values) == 0 else None
            if self._constant is None:
                raise ValueError("Bilinear interpolation needs at least two centers per axis")
            self._interp = None
        else:
            self._constant = None
            self._interp = RegularGridInterpolator((a1, a2), image.T, method="linear")

    def __call__(self, points: PointsLike) -> np.ndarray:
        pts = as_points(points)
        if self._interp is None:
            return np.full(pts.shape[0], self._constant)
        return self._interp(np.clip(pts, self._lo, self._hi))


def scenario2_intensity_scale(gp: GPRealization, target_n: float) -> float:
    """gamma such that the integral of gamma * exp(p) over the grid domain equals target_n"""
    integral = float(np.sum(np.exp(gp.values)) * gp.grid.cell_area)
    return target_n / integral


def simulate_scenario2(gp: GPRealization, target_n: int = DEFAULT_TARGET_N, noise_sd: float = DEFAULT_NOISE_SD,
                       seed: int = 0) -> Tuple[SampleSet, TruthSurface]:
    """
    Sample locations from a Poisson process with intensity gamma * exp(p(s)),
    p being the interpolated GP surface, and observe z = p(s) + noise.

    :raises SamplingError: if no point is drawn
    """
    logger = get_logger()
    if target_n < 10:
        raise ValueError(f"target_n must be >= 10, got {target_n}")
    rng = get_generator(seed)
    surface = SurfaceInterpolator(gp.grid, gp.values)
    gamma = scenario2_intensity_scale(gp, target_n)

    def intensity(points: np.ndarray) -> np.ndarray:
        return gamma * np.exp(surface(points))

    bound = gamma * np.exp(surface.max_value)
    locations = inhomogeneous_ppp(intensity, gp.grid.domain, bound, rng)
    if locations.shape[0] == 0:
        raise SamplingError(f"Scenario2 seed {seed} drew no points")

    p_at = surface(locations)
    noise = noise_sd * rng.standard_normal(locations.shape[0]) if noise_sd > 0 else np.zeros(locations.shape[0])
    samples = SampleSet(locations=locations, z=p_at + noise, p_true=intensity(locations),
                        scenario_tag=Scenario_tags.SCENARIO2)
    truth = TruthSurface(grid=gp.grid, values=gp.values.copy())
    logger.debug(f"simulate_scenario2: seed={seed}, gamma={gamma:.4g}, drew {samples.n} points")
    return samples, truth
