from dataclasses import dataclass, field, asdict
from typing import Dict, List

import numpy as np
import pandas as pd

from prefsample.spatial_core.geometry import RegularGrid


@dataclass(frozen=True)
class SamplerConfig:
    """
    :param n_iter: total iterations, burn-in included
    :param n_burn: adaptation iterations that are discarded
    :param leapfrog_steps: leapfrog steps per HMC trajectory
    :param target_accept: dual averaging target for HMC
    :param seed: generator seed of the chain
    """
    n_iter: int = 5500
    n_burn: int = 1000
    leapfrog_steps: int = 25
    target_accept: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.n_burn < 0 or not self.n_burn < self.n_iter:
            raise ValueError(f"Need 0 <= n_burn < n_iter, got n_burn={self.n_burn}, n_iter={self.n_iter}")
        if not 0.0 < self.target_accept < 1.0:
            raise ValueError(f"target_accept must be in (0, 1), got {self.target_accept}")
        if self.leapfrog_steps < 1:
            raise ValueError(f"leapfrog_steps must be >= 1, got {self.leapfrog_steps}")

    @property
    def n_keep(self) -> int:
        return self.n_iter - self.n_burn

    def with_seed(self, seed: int) -> "SamplerConfig":
        return SamplerConfig(self.n_iter, self.n_burn, self.leapfrog_steps, self.target_accept, seed)

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass
class PosteriorDraws:
    """Kept draws of one chain: one row per kept iteration, one column per parameter"""
    names: List[str]
    draws: np.ndarray
    accept_rate: float
    seed: int
    step_size: float = float("nan")
    n_divergent: int = 0

    def __post_init__(self):
        self.draws = np.atleast_2d(np.asarray(self.draws, dtype=float))
        if self.draws.shape[1] != len(self.names):
            raise ValueError(f"{len(self.names)} names for {self.draws.shape[1]} draw columns")
        if not np.all(np.isfinite(self.draws)):
            raise ValueError("PosteriorDraws contain non-finite values")

    @property
    def n_draws(self) -> int:
        return self.draws.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.draws[:, self.names.index(name)]


@dataclass
class PosteriorSummary:
    """Mean, equal-tailed interval and effective sample size per parameter"""
    names: List[str]
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    ess: np.ndarray
    level: float = 0.90

    def index(self, name: str) -> int:
        return self.names.index(name)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"parameter": self.names, "mean": self.mean, "lower": self.lower,
                             "upper": self.upper, "ess": self.ess})


@dataclass
class PredictionSurface:
    """Posterior mean and pointwise interval of the mean function at grid centers"""
    grid: RegularGrid
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        for name in ("mean", "lower", "upper"):
            values = np.asarray(getattr(self, name), dtype=float).ravel()
            if values.shape[0] != self.grid.size:
                raise ValueError(f"PredictionSurface.{name} has {values.shape[0]} values for {self.grid.size} centers")
            setattr(self, name, values)
        if np.any(self.lower > self.upper):
            raise ValueError("PredictionSurface lower bound exceeds upper bound")
