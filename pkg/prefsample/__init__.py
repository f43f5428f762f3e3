"""
prefsample - simulation and inference for preferentially sampled spatial data

Simulates data whose sampling locations depend on the measured surface, fits
weighted pseudo-likelihood, shared latent process and weight-covariate models,
and scores their parameter estimates and prediction surfaces over replications.
"""

__version__ = "0.1.0"

from prefsample.experiment_management.config import ExperimentConfig, load_config
from prefsample.experiment_management.experiment_runner import run_experiment
from prefsample.experiment_management.ingestion import ingest_csv
from prefsample.utils.enums import Model_tags, Scenario_tags

__all__ = ["ExperimentConfig", "load_config", "run_experiment", "ingest_csv", "Model_tags", "Scenario_tags"]
