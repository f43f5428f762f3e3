from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from prefsample.sampling_management.sample_set import SampleSet
from prefsample.spatial_core.geometry import PointsLike, RectDomain, as_points


@dataclass
class StratifiedData:
    """
    :param cells: list of (N_c population count, zbar_c sample mean) per cell
    :param N: total population count
    """
    cells: List[Tuple[float, float]]
    N: float

    def __post_init__(self):
        if len(self.cells) == 0:
            raise ValueError("StratifiedData needs at least one cell")
        counts = np.array([c[0] for c in self.cells], dtype=float)
        if np.any(counts <= 0):
            raise ValueError("Every cell population count N_c must be > 0")
        if not np.isclose(counts.sum(), self.N, rtol=1e-12, atol=0.0):
            raise ValueError(f"Cell counts sum to {counts.sum()} but N = {self.N}")


def poststratified_mean(data: StratifiedData) -> float:
    """sum_c (N_c / N) * zbar_c"""
    return float(sum(n_c / data.N * zbar_c for n_c, zbar_c in data.cells))


def _cell_index(points: np.ndarray, domain: RectDomain, cells_per_axis: int) -> np.ndarray:
    i = np.clip(((points[:, 0] - domain.min1) / domain.width1 * cells_per_axis).astype(int), 0, cells_per_axis - 1)
    j = np.clip(((points[:, 1] - domain.min2) / domain.width2 * cells_per_axis).astype(int), 0, cells_per_axis - 1)
    return j * cells_per_axis + i


def poststratify_samples(samples: SampleSet, domain: RectDomain, cells_per_axis: int,
                         population_points: PointsLike) -> StratifiedData:
    """
    Partition domain into cells_per_axis^2 rectangles; N_c counts the population
    points in a cell and zbar_c averages the sampled responses there. Cells
    without any sampled point are dropped, so N is the population count of the
    covered cells.
    """
    if cells_per_axis < 1:
        raise ValueError(f"cells_per_axis must be >= 1, got {cells_per_axis}")
    sample_cells = _cell_index(samples.locations, domain, cells_per_axis)
    population_cells = _cell_index(as_points(population_points), domain, cells_per_axis)
    pop_counts = np.bincount(population_cells, minlength=cells_per_axis ** 2)
    cells = []
    for c in np.unique(sample_cells):
        if pop_counts[c] == 0:
            continue
        cells.append((float(pop_counts[c]), float(np.mean(samples.z[sample_cells == c]))))
    return StratifiedData(cells=cells, N=float(sum(c[0] for c in cells)))
