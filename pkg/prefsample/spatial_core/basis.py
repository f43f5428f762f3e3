from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.spatial.distance import cdist

from prefsample.spatial_core.geometry import Point2, PointsLike, RectDomain, as_points

# aperture = APERTURE_FACTOR * lattice spacing of the resolution
APERTURE_FACTOR = 1.5
COARSEST_LATTICE = 4


@dataclass
class BasisSet:
    """
    Bisquare basis functions at one or more resolutions.

    :param centers: (K, 2) array of basis centers, coarse resolution first
    :param apertures: (K,) support radius per center
    :param resolution_index: (K,) resolution each center belongs to (0 = coarsest)
    """
    centers: np.ndarray
    apertures: np.ndarray
    resolution_index: np.ndarray

    def __post_init__(self):
        self.centers = as_points(self.centers)
        self.apertures = np.asarray(self.apertures, dtype=float)
        self.resolution_index = np.asarray(self.resolution_index, dtype=int)
        if self.centers.shape[0] == 0:
            raise ValueError("BasisSet needs at least one basis function")
        if self.apertures.shape[0] != self.centers.shape[0] or self.resolution_index.shape[0] != self.centers.shape[0]:
            raise ValueError("BasisSet centers, apertures and resolution_index must have equal length")
        if np.any(self.apertures <= 0):
            raise ValueError("BasisSet apertures must be > 0")
        for r in np.unique(self.resolution_index):
            if np.ptp(self.apertures[self.resolution_index == r]) > 0:
                raise ValueError(f"Aperture must be constant within resolution {r}")

    @property
    def size(self) -> int:
        return self.centers.shape[0]

    @property
    def resolutions(self) -> int:
        return int(np.unique(self.resolution_index).size)


def bisquare(s: Point2, center: Point2, aperture: float) -> float:
    """(1 - (d/aperture)^2)^2 inside the aperture, 0 outside"""
    if not aperture > 0:
        raise ValueError(f"aperture must be > 0, got {aperture}")
    d = float(np.hypot(s.s1 - center.s1, s.s2 - center.s2))
    if d >= aperture:
        return 0.0
    return (1.0 - (d / aperture) ** 2) ** 2


def build_basis_set(domain: RectDomain, resolutions: int = 2) -> BasisSet:
    """
    Regular lattices of centers over domain: 4x4 at the coarsest resolution,
    doubling per axis at each finer one. Lattices include the domain edges.
    """
    if resolutions < 1:
        raise ValueError(f"resolutions must be >= 1, got {resolutions}")
    centers: List[np.ndarray] = []
    apertures: List[np.ndarray] = []
    index: List[np.ndarray] = []
    for r in range(resolutions):
        m = COARSEST_LATTICE * 2 ** r
        a1 = np.linspace(domain.min1, domain.max1, m)
        a2 = np.linspace(domain.min2, domain.max2, m)
        spacing = max(a1[1] - a1[0], a2[1] - a2[0])
        c1, c2 = np.meshgrid(a1, a2, indexing="xy")
        centers.append(np.column_stack([c1.ravel(), c2.ravel()]))
        apertures.append(np.full(m * m, APERTURE_FACTOR * spacing))
        index.append(np.full(m * m, r))
    return BasisSet(np.vstack(centers), np.concatenate(apertures), np.concatenate(index))


def evaluate_basis_matrix(points: PointsLike, basis: BasisSet) -> np.ndarray:
    """(n, K) matrix with entry (i, k) = bisquare(points[i], center_k, aperture_k)"""
    pts = as_points(points)
    dist = cdist(pts, basis.centers)
    ratio = dist / basis.apertures[None, :]
    return np.where(ratio < 1.0, (1.0 - ratio ** 2) ** 2, 0.0)
