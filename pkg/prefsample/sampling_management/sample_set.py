from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from prefsample.spatial_core.geometry import RegularGrid, as_points
from prefsample.utils.enums import Scenario_tags


@dataclass
class SampleSet:
    """
    Observed locations and responses.

    :param locations: (n, 2) sample locations
    :param z: (n,) responses
    :param p_true: (n,) selection probability (Scenario1) or sampling intensity
                   (Scenario2) at each location; None when unknown
    :param scenario_tag: which data generator produced the set
    """
    locations: np.ndarray
    z: np.ndarray
    p_true: Optional[np.ndarray] = None
    scenario_tag: Scenario_tags = Scenario_tags.EXTERNAL

    def __post_init__(self):
        self.locations = as_points(self.locations)
        self.z = np.asarray(self.z, dtype=float).ravel()
        n = self.locations.shape[0]
        if self.z.shape[0] != n:
            raise ValueError(f"SampleSet has {n} locations but {self.z.shape[0]} responses")
        if not np.all(np.isfinite(self.locations)) or not np.all(np.isfinite(self.z)):
            raise ValueError("SampleSet locations and responses must be finite")
        if self.p_true is not None:
            self.p_true = np.asarray(self.p_true, dtype=float).ravel()
            if self.p_true.shape[0] != n:
                raise ValueError(f"SampleSet has {n} locations but {self.p_true.shape[0]} p_true values")
            if np.any(~(self.p_true > 0)):
                raise ValueError("SampleSet p_true values must be > 0")
        if self.scenario_tag == Scenario_tags.SCENARIO1:
            if self.p_true is None:
                raise ValueError("Scenario1 samples must carry their selection probabilities")
            if np.any(self.p_true > 1.0):
                raise ValueError("Scenario1 selection probabilities must be <= 1")

    @property
    def n(self) -> int:
        return self.locations.shape[0]

    @property
    def has_p_true(self) -> bool:
        return self.p_true is not None

    def __str__(self):
        return f"SampleSet(n={self.n}, scenario={self.scenario_tag.value}, p_true={'yes' if self.has_p_true else 'no'})"


@dataclass
class TruthSurface:
    """
    True mean response at grid centers.
    Scenario1 also records the standardization constants of the selection probability.
    """
    grid: RegularGrid
    values: np.ndarray
    p_mean: Optional[float] = None
    p_sd: Optional[float] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).ravel()
        if self.values.shape[0] != self.grid.size:
            raise ValueError(f"TruthSurface has {self.values.shape[0]} values for a grid of {self.grid.size}")
