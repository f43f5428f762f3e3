from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from prefsample.utils.enums import Model_tags, Scenario_tags


@dataclass
class ModelReport:
    """
    One model's results in one replication.

    :param means: posterior mean per reported parameter
    :param lower, upper: interval bounds per reported parameter
    :param hits: interval contains the true value, for parameters with a known truth
    :param surface_errors: prediction minus truth at every grid center
    :param n_iter: sampler iterations behind runtime, 0 when unknown
    """
    tag: Model_tags
    means: Dict[str, float]
    lower: Dict[str, float]
    upper: Dict[str, float]
    hits: Dict[str, bool]
    surface_mse: float
    surface_errors: np.ndarray
    runtime: float
    accept_rate: float = float("nan")
    n_iter: int = 0

    def __post_init__(self):
        self.surface_errors = np.asarray(self.surface_errors, dtype=float).ravel()
        values = list(self.means.values()) + list(self.lower.values()) + list(self.upper.values())
        if not np.all(np.isfinite(values)) or not np.isfinite(self.surface_mse):
            raise ValueError(f"ModelReport for {self.tag.value} has non-finite entries")
        if not np.all(np.isfinite(self.surface_errors)):
            raise ValueError(f"ModelReport for {self.tag.value} has non-finite surface errors")

    def widths(self) -> Dict[str, float]:
        return {name: self.upper[name] - self.lower[name] for name in self.lower}


@dataclass
class ReplicationReport:
    replication: int
    seed: int
    n_samples: int
    models: Dict[Model_tags, ModelReport] = field(default_factory=dict)
    attempts: int = 1

    def to_rows(self) -> List[Dict]:
        """Long-format rows (one per model and parameter) for replications.csv"""
        rows = []
        for tag, report in self.models.items():
            widths = report.widths()
            for name, mean in report.means.items():
                rows.append({"replication": self.replication, "seed": self.seed, "n": self.n_samples,
                             "model": tag.value, "parameter": name, "mean": mean,
                             "lower": report.lower[name], "upper": report.upper[name], "width": widths[name],
                             "hit": int(report.hits[name]) if name in report.hits else -1,
                             "surface_mse": report.surface_mse})
        return rows


@dataclass
class ModelAggregate:
    """Aggregated results of one model over all replications"""
    tag: Model_tags
    param_means: Dict[str, float]
    coverage: Dict[str, float]
    widths: Dict[str, float]
    mse: float
    mean_abs_bias: float
    runtime_mean: float
    runtime_ratio: float
    matched_runtime_ratio: float = float("nan")


@dataclass
class AggregateReport:
    scenario: Scenario_tags
    n_replications: int
    models: Dict[Model_tags, ModelAggregate]
    true_params: Dict[str, float] = field(default_factory=dict)
    config: Optional[Dict] = None

    def __post_init__(self):
        for agg in self.models.values():
            for name, rate in agg.coverage.items():
                if not 0.0 <= rate <= 1.0:
                    raise ValueError(f"Coverage of {agg.tag.value}/{name} is {rate}, outside [0, 1]")

    def parameter_table(self) -> pd.DataFrame:
        """model, then mean/coverage/width per parameter with a known truth"""
        rows = []
        for tag, agg in self.models.items():
            row = {"model": tag.value}
            for name in self.true_params:
                row[f"{name}_mean"] = agg.param_means.get(name, np.nan)
                row[f"{name}_coverage"] = agg.coverage.get(name, np.nan)
                row[f"{name}_width"] = agg.widths.get(name, np.nan)
            rows.append(row)
        return pd.DataFrame(rows)

    def prediction_table(self) -> pd.DataFrame:
        return pd.DataFrame([{"model": tag.value, "mse": agg.mse, "mean_abs_bias": agg.mean_abs_bias}
                             for tag, agg in self.models.items()])

    def runtime_table(self) -> pd.DataFrame:
        """Wall-clock fit times; matched_runtime_ratio compares runtime per sampler iteration"""
        return pd.DataFrame([{"model": tag.value, "runtime_mean": agg.runtime_mean,
                              "runtime_ratio": agg.runtime_ratio,
                              "matched_runtime_ratio": agg.matched_runtime_ratio}
                             for tag, agg in self.models.items()])
