"""
Experiment configuration: a JSON file with one sampler block per model.

    {
      "scenario": "Scenario1",
      "models": ["UW", "PEW", "PKW", "PRD"],
      "n_replications": 100,
      "samplers": {"PRD": {"n_iter": 12000, "n_burn": 2000}}
    }

Keys left out take the desk-scale defaults of the scenario.
"""
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from prefsample.inference.posterior import SamplerConfig
from prefsample.sampling_management.scenarios import DEFAULT_TARGET_N
from prefsample.utils.enums import Model_tags, Noise_interpretations, Scenario_tags
from prefsample.utils.errors import ConfigError
from prefsample.utils.logger import get_logger

OUTPUT_DIR_ENV = "PREFSAMPLE_OUTPUT_DIR"

PL_SAMPLER = SamplerConfig(n_iter=5500, n_burn=1000)
PRD_SAMPLER = SamplerConfig(n_iter=12000, n_burn=2000)
DEFAULT_MODELS = {
    Scenario_tags.SCENARIO1: [Model_tags.UW, Model_tags.PEW, Model_tags.PKW, Model_tags.PRD],
    Scenario_tags.SCENARIO2: [Model_tags.UW, Model_tags.PEW, Model_tags.PKW, Model_tags.PRD],
    Scenario_tags.EXTERNAL: [Model_tags.UW, Model_tags.PEW, Model_tags.PRD],
}
SAMPLER_KEYS = ("n_iter", "n_burn", "leapfrog_steps", "target_accept", "seed")


def default_sampler(tag: Model_tags) -> SamplerConfig:
    return PRD_SAMPLER if tag == Model_tags.PRD else PL_SAMPLER


@dataclass
class ExperimentConfig:
    """
    :param noise_level: 0.5 by default, read as a variance or an sd per noise_interpretation
    :param target_n: expected sample size of Scenario2
    :param fixed_surface: Scenario2 draws its GP surface once from base_seed and every
                          replication resamples locations on it; false redraws it per replication
    :param grid_size: truth and prediction grid is grid_size x grid_size
    :param workers: replication processes, 1 runs in the calling process
    :param samplers: per-model sampler settings; seed is the offset mixed into the derived chain seed
    """
    scenario: Scenario_tags
    models: List[Model_tags]
    n_replications: int = 100
    base_seed: int = 1
    n_candidates: int = 1000
    noise_level: float = 0.5
    noise_interpretation: Noise_interpretations = Noise_interpretations.VARIANCE
    target_n: int = DEFAULT_TARGET_N
    fixed_surface: bool = True
    gp_amplitude: float = 1.0
    gp_length_scale: float = 0.5
    grid_size: int = 41
    basis_resolutions: int = 2
    workers: int = 1
    output_dir: str = "results"
    samplers: Dict[Model_tags, SamplerConfig] = field(default_factory=dict)

    def __post_init__(self):
        if not self.models:
            raise ConfigError("At least one model must be configured")
        if len(set(self.models)) != len(self.models):
            raise ConfigError(f"Duplicate models in {[m.value for m in self.models]}")
        if Model_tags.PKW in self.models and self.scenario == Scenario_tags.EXTERNAL:
            raise ConfigError("PKW needs known selection probabilities, which external data does not have")
        if self.n_replications < 1:
            raise ConfigError(f"n_replications must be >= 1, got {self.n_replications}")
        if self.base_seed < 0:
            raise ConfigError(f"base_seed must be >= 0, got {self.base_seed}")
        if self.n_candidates < 10:
            raise ConfigError(f"n_candidates must be >= 10, got {self.n_candidates}")
        if self.target_n < 10:
            raise ConfigError(f"target_n must be >= 10, got {self.target_n}")
        if not isinstance(self.fixed_surface, bool):
            raise ConfigError(f"fixed_surface must be true or false, got {self.fixed_surface!r}")
        if self.noise_level < 0:
            raise ConfigError(f"noise_level must be >= 0, got {self.noise_level}")
        if not (self.gp_amplitude > 0 and self.gp_length_scale > 0):
            raise ConfigError("gp_amplitude and gp_length_scale must be > 0")
        if self.grid_size < 2 or self.basis_resolutions < 1 or self.workers < 1:
            raise ConfigError("grid_size must be >= 2, basis_resolutions and workers >= 1")
        for tag in self.models:
            self.samplers.setdefault(tag, default_sampler(tag))
        unused = set(self.samplers) - set(self.models)
        if unused:
            raise ConfigError(f"Sampler settings for unconfigured models {sorted(t.value for t in unused)}")

    @property
    def noise_sd(self) -> float:
        if self.noise_interpretation == Noise_interpretations.VARIANCE:
            return float(np.sqrt(self.noise_level))
        return float(self.noise_level)

    @property
    def resolved_output_dir(self) -> Path:
        return Path(os.environ.get(OUTPUT_DIR_ENV) or self.output_dir)

    @classmethod
    def desk_scale(cls, scenario: Scenario_tags, **overrides) -> "ExperimentConfig":
        """100 replications, PL models 5,500/1,000 iterations, PRD 12,000/2,000"""
        params = dict(scenario=scenario, models=list(DEFAULT_MODELS[scenario]), workers=os.cpu_count() or 1)
        params.update(overrides)
        return cls(**params)

    def to_dict(self) -> Dict:
        return {
            "scenario": self.scenario.value,
            "models": [m.value for m in self.models],
            "n_replications": self.n_replications,
            "base_seed": self.base_seed,
            "n_candidates": self.n_candidates,
            "noise_level": self.noise_level,
            "noise_interpretation": self.noise_interpretation.value,
            "target_n": self.target_n,
            "fixed_surface": self.fixed_surface,
            "gp_amplitude": self.gp_amplitude,
            "gp_length_scale": self.gp_length_scale,
            "grid_size": self.grid_size,
            "basis_resolutions": self.basis_resolutions,
            "workers": self.workers,
            "output_dir": self.output_dir,
            "samplers": {tag.value: self.samplers[tag].to_dict() for tag in self.models},
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "ExperimentConfig":
        """
        :raises ConfigError: on unknown keys, unknown enum values or invalid settings
        """
        data = dict(data)
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown config keys {sorted(unknown)}")
        if "scenario" not in data:
            raise ConfigError("Config must name a scenario")
        try:
            scenario = Scenario_tags(data.pop("scenario"))
            models = [Model_tags(m) for m in data.pop("models", [m.value for m in DEFAULT_MODELS[scenario]])]
            if "noise_interpretation" in data:
                data["noise_interpretation"] = Noise_interpretations(data["noise_interpretation"])
        except ValueError as e:
            raise ConfigError(f"Invalid config value: {e}") from e

        samplers = {}
        for name, block in (data.pop("samplers", None) or {}).items():
            try:
                tag = Model_tags(name)
            except ValueError as e:
                raise ConfigError(f"Sampler block for unknown model '{name}'") from e
            extra = set(block) - set(SAMPLER_KEYS)
            if extra:
                raise ConfigError(f"Unknown sampler keys {sorted(extra)} for {name}")
            base = default_sampler(tag).to_dict()
            base.update(block)
            try:
                samplers[tag] = SamplerConfig(**base)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"Invalid sampler settings for {name}: {e}") from e

        try:
            return cls(scenario=scenario, models=models, samplers=samplers, **data)
        except TypeError as e:
            raise ConfigError(f"Invalid config: {e}") from e


def load_config(path: Union[str, Path], overrides: Optional[Dict] = None) -> ExperimentConfig:
    """Read a JSON config; overrides replace top-level keys before validation"""
    logger = get_logger()
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"Config file {path} not found") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: line {e.lineno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    data.update(overrides or {})
    cfg = ExperimentConfig.from_dict(data)
    logger.debug(f"load_config: {path} -> {cfg.scenario.value}, models {[m.value for m in cfg.models]}")
    return cfg
