from typing import Callable

import numpy as np

from prefsample.spatial_core.geometry import RectDomain
from prefsample.utils.errors import IntensityBoundError
from prefsample.utils.logger import get_logger
from prefsample.utils.seed_management import SeedLike, get_generator

# relative slack allowed before a candidate's intensity counts as exceeding the bound
BOUND_TOLERANCE = 1e-12


def inhomogeneous_ppp(intensity: Callable[[np.ndarray], np.ndarray], domain: RectDomain,
                      bound: float, seed: SeedLike) -> np.ndarray:
    """
    Simulate an inhomogeneous Poisson process by thinning a homogeneous one.

    :param intensity: vectorized rate function, (m, 2) points -> (m,) rates
    :param domain: rectangle to simulate on
    :param bound: dominating rate, must be >= sup of intensity over domain
    :param seed: integer seed or an existing Generator
    :return: (k, 2) array of retained points
    :raises IntensityBoundError: if any candidate's intensity exceeds bound
    """
    logger = get_logger()
    if not bound > 0:
        raise ValueError(f"Thinning bound must be > 0, got {bound}")
    rng = get_generator(seed)

    n_candidates = rng.poisson(bound * domain.area)
    candidates = domain.uniform_points(rng, n_candidates)
    if n_candidates == 0:
        return candidates

    rates = np.asarray(intensity(candidates), dtype=float).ravel()
    worst = float(np.max(rates))
    if worst > bound * (1.0 + BOUND_TOLERANCE):
        raise IntensityBoundError(f"Intensity {worst:.6g} exceeds thinning bound {bound:.6g}")

    keep = rng.random(n_candidates) < rates / bound
    logger.debug(f"inhomogeneous_ppp: {n_candidates} candidates, kept {int(keep.sum())}")
    return candidates[keep]
