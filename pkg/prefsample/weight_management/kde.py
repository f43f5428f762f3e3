"""
Product-Gaussian kernel density estimation in two dimensions.
"""
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from prefsample.spatial_core.geometry import PointsLike, as_points
from prefsample.utils.errors import WeightError

# floor = FLOOR_FRACTION * peak kernel height / n
FLOOR_FRACTION = 1e-6


@dataclass(frozen=True)
class KDEConfig:
    """
    :param bandwidth1: kernel standard deviation along s1
    :param bandwidth2: kernel standard deviation along s2
    :param eval_floor: smallest density ever returned
    """
    bandwidth1: float
    bandwidth2: float
    eval_floor: float

    def __post_init__(self):
        if not (self.bandwidth1 > 0 and self.bandwidth2 > 0):
            raise ValueError(f"KDE bandwidths must be > 0, got ({self.bandwidth1}, {self.bandwidth2})")
        if not self.eval_floor > 0:
            raise ValueError(f"KDE eval_floor must be > 0, got {self.eval_floor}")

    @classmethod
    def from_points(cls, points: PointsLike) -> "KDEConfig":
        """Normal-reference bandwidth per axis and the default density floor"""
        pts = as_points(points)
        h1 = default_bandwidth(pts[:, 0])
        h2 = default_bandwidth(pts[:, 1])
        peak = 1.0 / (2.0 * np.pi * h1 * h2)
        return cls(bandwidth1=h1, bandwidth2=h2, eval_floor=FLOOR_FRACTION * peak / pts.shape[0])


def default_bandwidth(coords: Sequence[float]) -> float:
    """
    h = 1.06 * min(sd, IQR / 1.34) * n^(-1/5), used as the Gaussian kernel sd.

    :raises WeightError: if the coordinates have no spread
    """
    x = np.asarray(coords, dtype=float).ravel()
    if x.shape[0] < 2:
        raise WeightError(f"default_bandwidth needs at least 2 values, got {x.shape[0]}")
    sd = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34)
    if not spread > 0:
        raise WeightError(f"Coordinates have zero spread (sd={sd:.3g}, IQR={q75 - q25:.3g}); bandwidth undefined")
    return 1.06 * spread * x.shape[0] ** (-0.2)


def kde2d_density(points: PointsLike, cfg: KDEConfig, eval_at: PointsLike) -> np.ndarray:
    """
    (1/n) sum_i N(e1; s1_i, h1^2) * N(e2; s2_i, h2^2) at each evaluation point,
    floored at cfg.eval_floor.
    """
    pts = as_points(points)
    ev = as_points(eval_at)
    if pts.shape[0] < 2:
        raise ValueError(f"kde2d_density needs at least 2 points, got {pts.shape[0]}")
    k1 = stats.norm.pdf(ev[:, 0][:, None], loc=pts[:, 0][None, :], scale=cfg.bandwidth1)
    k2 = stats.norm.pdf(ev[:, 1][:, None], loc=pts[:, 1][None, :], scale=cfg.bandwidth2)
    density = np.mean(k1 * k2, axis=1)
    return np.maximum(density, cfg.eval_floor)
