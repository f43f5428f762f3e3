import numpy as np

from prefsample.inference.posterior import PosteriorDraws, PredictionSurface
from prefsample.spatial_core.geometry import RegularGrid

PREDICTION_CHUNK = 512


def predict_surface(model, draws: PosteriorDraws, grid: RegularGrid, level: float = 0.90,
                    chunk_size: int = PREDICTION_CHUNK) -> PredictionSurface:
    """
    Posterior mean and equal-tailed pointwise interval of the model's mean function
    at the grid centers. Draws must be in the model's output coordinates.

    :param model: anything with mean_function(draws, points) -> (n_draws, n_points)
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    tail = (1.0 - level) / 2.0
    centers = grid.centers
    mean = np.empty(grid.size)
    lower = np.empty(grid.size)
    upper = np.empty(grid.size)
    for start in range(0, grid.size, chunk_size):
        stop = min(start + chunk_size, grid.size)
        values = model.mean_function(draws.draws, centers[start:stop])
        mean[start:stop] = values.mean(axis=0)
        lower[start:stop], upper[start:stop] = np.quantile(values, [tail, 1.0 - tail], axis=0)
    return PredictionSurface(grid=grid, mean=mean, lower=lower, upper=upper)
