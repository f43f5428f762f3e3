from dataclasses import dataclass
from typing import Optional

import numpy as np

from prefsample.sampling_management.sample_set import SampleSet
from prefsample.utils.enums import Weight_modes
from prefsample.utils.errors import WeightError
from prefsample.utils.logger import get_logger
from prefsample.weight_management.kde import KDEConfig, kde2d_density


@dataclass
class WeightVector:
    """
    Sampling weights. normalized = raw * n / sum(raw), so normalized sums to n.
    """
    raw: np.ndarray
    normalized: np.ndarray
    mode: Weight_modes

    def __post_init__(self):
        self.raw = np.asarray(self.raw, dtype=float).ravel()
        self.normalized = np.asarray(self.normalized, dtype=float).ravel()
        if self.raw.shape != self.normalized.shape:
            raise ValueError("WeightVector raw and normalized must have equal length")
        if np.any(~(self.raw > 0)) or not np.all(np.isfinite(self.raw)):
            raise WeightError("All raw weights must be finite and > 0")

    @classmethod
    def from_raw(cls, raw: np.ndarray, mode: Weight_modes) -> "WeightVector":
        raw = np.asarray(raw, dtype=float).ravel()
        if raw.shape[0] == 0:
            raise WeightError("Cannot build weights for an empty sample")
        if np.any(~(raw > 0)) or not np.all(np.isfinite(raw)):
            raise WeightError("All raw weights must be finite and > 0")
        if mode == Weight_modes.UNIT:
            normalized = np.ones_like(raw)
        else:
            normalized = raw * (raw.shape[0] / np.sum(raw))
        return cls(raw=raw, normalized=normalized, mode=mode)

    @classmethod
    def unit(cls, n: int) -> "WeightVector":
        return cls.from_raw(np.ones(n), Weight_modes.UNIT)

    @property
    def n(self) -> int:
        return self.raw.shape[0]


def weights_from_mode(samples: SampleSet, mode: Weight_modes, cfg: Optional[KDEConfig] = None) -> WeightVector:
    """
    Build weights for samples.

    Unit: raw = 1. Known: raw = 1 / p_true. KDE: raw = 1 / density of the sample
    locations at themselves (leave-self-in); cfg defaults to KDEConfig.from_points.

    :raises WeightError: Known mode without p_true
    """
    logger = get_logger()
    if mode == Weight_modes.UNIT:
        raw = np.ones(samples.n)
    elif mode == Weight_modes.KNOWN:
        if not samples.has_p_true:
            raise WeightError(f"Known weights need selection probabilities; {samples} has none")
        raw = 1.0 / samples.p_true
    elif mode == Weight_modes.KDE:
        cfg = cfg or KDEConfig.from_points(samples.locations)
        density = kde2d_density(samples.locations, cfg, samples.locations)
        raw = 1.0 / density
        logger.debug(f"weights_from_mode: KDE bandwidths ({cfg.bandwidth1:.4g}, {cfg.bandwidth2:.4g})")
    else:
        raise ValueError(f"Unknown weight mode {mode}")
    weights = WeightVector.from_raw(raw, mode)
    logger.debug(f"weights_from_mode: {mode.value} weights, max normalized {weights.normalized.max():.4g}")
    return weights
