#!/usr/bin/env python3
"""
prefsample - demo

Simulates one Scenario 1 data set, fits the unweighted and the two weighted
pseudo-likelihood models with short chains and compares their estimates of
the trend coefficients (true values 5 and 2).
"""

from prefsample.experiment_management.config import ExperimentConfig
from prefsample.experiment_management.experiment_runner import run_replication
from prefsample.inference.posterior import SamplerConfig
from prefsample.utils.enums import Model_tags, Scenario_tags
from prefsample.utils.logger import setup_logging, LogLevel, get_logger


def demo_scenario1():
    logger = get_logger()
    models = [Model_tags.UW, Model_tags.PEW, Model_tags.PKW]
    short_chain = SamplerConfig(n_iter=1500, n_burn=500)
    cfg = ExperimentConfig(scenario=Scenario_tags.SCENARIO1, models=models, n_replications=1, base_seed=7,
                           workers=1, samplers={tag: short_chain for tag in models})

    logger.info("======== demo_scenario1")
    outcome = run_replication(cfg, replication=0)
    logger.info(f"kept {outcome.report.n_samples} of {cfg.n_candidates} candidates")
    for tag, report in outcome.report.models.items():
        estimates = ", ".join(f"{name}={value:.3f} [{report.lower[name]:.3f}, {report.upper[name]:.3f}]"
                              for name, value in report.means.items())
        logger.info(f"{tag.value:>4}: {estimates}  surface mse={report.surface_mse:.4f}")


if __name__ == "__main__":
    setup_logging(level=LogLevel.INFO)
    demo_scenario1()
