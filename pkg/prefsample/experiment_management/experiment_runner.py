"""
Replication pipeline: simulate, weight, fit, predict, score, aggregate, write.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from prefsample.evaluation.metrics import aggregate, model_report, mse_ordering_holds
from prefsample.evaluation.reports import AggregateReport, ReplicationReport
from prefsample.experiment_management.config import ExperimentConfig
from prefsample.experiment_management.ingestion import ExternalDataset, emit_samples
from prefsample.experiment_management.output_writer import emit_surface, emit_sweep, emit_tables, emit_truth
from prefsample.inference.diagnostics import summarize
from prefsample.inference.posterior import PredictionSurface, SamplerConfig
from prefsample.inference.prediction import predict_surface
from prefsample.models.model_factory import ModelFit, ModelOptions, fit_model, mean_structure_for
from prefsample.sampling_management.sample_set import SampleSet, TruthSurface
from prefsample.sampling_management.scenarios import SCENARIO1_BETA, simulate_scenario1, simulate_scenario2
from prefsample.spatial_core.covariance import CovSpec, GPRealization, simulate_gp
from prefsample.spatial_core.geometry import RectDomain, RegularGrid
from prefsample.utils.enums import Mean_structures, Model_tags, Scenario_tags
from prefsample.utils.errors import ConfigError, PrefSampleError
from prefsample.utils.logger import LogLevel, current_level, get_logger, setup_logging
from prefsample.utils.seed_management import derive_seed, replication_seed

MAX_RETRIES = 3
SCENARIO2_MSE_ORDER = (Model_tags.PRD, Model_tags.PKW, Model_tags.PEW, Model_tags.UW)


def true_params_for(scenario: Scenario_tags) -> Dict[str, float]:
    """Parameters with a known true value; only Scenario1 has them"""
    if scenario == Scenario_tags.SCENARIO1:
        return {"beta_1": SCENARIO1_BETA[0], "beta_2": SCENARIO1_BETA[1]}
    return {}


def truth_grid(cfg: ExperimentConfig) -> RegularGrid:
    return RegularGrid.square(RectDomain.unit_square(), cfg.grid_size)


def model_options(cfg: ExperimentConfig) -> ModelOptions:
    return ModelOptions(basis_resolutions=cfg.basis_resolutions, shared_grid_size=cfg.grid_size)


def scenario2_surface(cfg: ExperimentConfig, seed: int) -> GPRealization:
    """The replication's GP surface; with fixed_surface every replication shares the base_seed draw"""
    gp_seed = derive_seed(cfg.base_seed, "gp") if cfg.fixed_surface else derive_seed(seed, "gp")
    return simulate_gp(truth_grid(cfg), CovSpec(amplitude=cfg.gp_amplitude, length_scale=cfg.gp_length_scale),
                       gp_seed)


def simulate_replication(cfg: ExperimentConfig, seed: int) -> Tuple[SampleSet, TruthSurface]:
    """Data of one replication; the GP and the sampling use independent streams of seed"""
    if cfg.scenario == Scenario_tags.SCENARIO1:
        return simulate_scenario1(cfg.n_candidates, cfg.noise_sd, derive_seed(seed, "data"), grid=truth_grid(cfg))
    if cfg.scenario == Scenario_tags.SCENARIO2:
        return simulate_scenario2(scenario2_surface(cfg, seed), cfg.target_n, cfg.noise_sd,
                                  derive_seed(seed, "data"))
    raise ConfigError(f"Scenario {cfg.scenario.value} has no data generator")


def chain_config(cfg: ExperimentConfig, tag: Model_tags, seed: int) -> SamplerConfig:
    sampler = cfg.samplers[tag]
    return sampler.with_seed(derive_seed(seed, tag.value, sampler.seed))


@dataclass
class ReplicationOutcome:
    """Scores of one replication plus, when kept, its data and surfaces"""
    report: ReplicationReport
    samples: Optional[SampleSet] = None
    truth: Optional[TruthSurface] = None
    surfaces: Dict[Model_tags, PredictionSurface] = field(default_factory=dict)


def _fit_and_score(cfg: ExperimentConfig, samples: SampleSet, truth: TruthSurface, seed: int,
                   keep_surfaces: bool) -> Tuple[dict, Dict[Model_tags, PredictionSurface]]:
    structure = mean_structure_for(cfg.scenario)
    options = model_options(cfg)
    true_params = true_params_for(cfg.scenario)
    reports, surfaces = {}, {}
    for tag in cfg.models:
        chain = chain_config(cfg, tag, seed)
        fit = fit_model(tag, samples, structure, chain, options)
        surface = predict_surface(fit.model, fit.draws, truth.grid)
        reports[tag] = model_report(tag, summarize(fit.draws), surface, truth, fit.runtime, true_params,
                                    accept_rate=fit.draws.accept_rate, n_iter=chain.n_iter)
        if keep_surfaces:
            surfaces[tag] = surface
    return reports, surfaces


def run_replication(cfg: ExperimentConfig, replication: int, keep_surfaces: bool = False) -> ReplicationOutcome:
    """
    Run one replication, redrawing it with a new seed after any prefsample error.

    :raises PrefSampleError: when the last retry fails too
    """
    logger = get_logger()
    for attempt in range(MAX_RETRIES + 1):
        seed = replication_seed(cfg.base_seed, replication, attempt)
        try:
            samples, truth = simulate_replication(cfg, seed)
            reports, surfaces = _fit_and_score(cfg, samples, truth, seed, keep_surfaces)
        except (PrefSampleError, np.linalg.LinAlgError) as e:
            logger.error(f"run_replication: replication {replication} seed {seed} failed: {e}")
            if attempt == MAX_RETRIES:
                raise
            logger.warning(f"run_replication: retrying replication {replication} (attempt {attempt + 2})")
            continue
        report = ReplicationReport(replication=replication, seed=seed, n_samples=samples.n, models=reports,
                                   attempts=attempt + 1)
        logger.info(f"run_replication: replication {replication} done, n={samples.n}, "
                    + ", ".join(f"{t.value} mse={m.surface_mse:.4f}" for t, m in reports.items()))
        if keep_surfaces:
            return ReplicationOutcome(report=report, samples=samples, truth=truth, surfaces=surfaces)
        return ReplicationOutcome(report=report)


def _init_worker(level_value: int, show_timestamp: bool):
    setup_logging(LogLevel(level_value), show_timestamp=show_timestamp)


def _replication_task(args: Tuple[ExperimentConfig, int]) -> ReplicationOutcome:
    cfg, replication = args
    return run_replication(cfg, replication, keep_surfaces=replication == 0)


@dataclass
class ExperimentResult:
    aggregate: AggregateReport
    replications: List[ReplicationReport]
    first: ReplicationOutcome
    written: List[Path] = field(default_factory=list)


def write_outputs(result: ExperimentResult, out_dir: Union[str, Path]) -> List[Path]:
    """Tables, replications.csv, report.json and the data and surfaces of replication 0"""
    out_dir = Path(out_dir)
    written = emit_tables(result.aggregate, out_dir, result.replications)
    first = result.first
    if first.samples is not None:
        written.append(emit_samples(first.samples, out_dir / "samples_r0.csv"))
    if first.truth is not None:
        written.append(emit_truth(first.truth, out_dir, "r0"))
    for tag, surface in first.surfaces.items():
        written.append(emit_surface(surface, out_dir, f"{tag.value}_r0"))
    return written


def run_experiment(cfg: ExperimentConfig, out_dir: Optional[Union[str, Path]] = None, write: bool = True,
                   show_timestamp: bool = False) -> ExperimentResult:
    """
    Run every replication (replication r starts from seed base_seed + r), aggregate
    and write the outputs. Replications run in cfg.workers processes; results are
    ordered by replication so the output does not depend on scheduling.
    """
    logger = get_logger()
    logger.info("")
    logger.info(f"======================== run_experiment: {cfg.scenario.value}, {cfg.n_replications} replications, "
                f"models {[m.value for m in cfg.models]}")
    tasks = [(cfg, r) for r in range(cfg.n_replications)]
    if cfg.workers == 1:
        outcomes = [_replication_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers, initializer=_init_worker,
                                 initargs=(current_level().value, show_timestamp)) as executor:
            outcomes = list(executor.map(_replication_task, tasks))
    outcomes.sort(key=lambda o: o.report.replication)

    reports = [o.report for o in outcomes]
    report = aggregate(reports, cfg.scenario, true_params_for(cfg.scenario))
    report.config = cfg.to_dict()
    result = ExperimentResult(aggregate=report, replications=reports, first=outcomes[0])
    logger.info("======================== run_experiment: summary")
    for tag, agg in report.models.items():
        logger.info(f"{tag.value}: mse={agg.mse:.4f} mean_abs_bias={agg.mean_abs_bias:.4f} "
                    f"runtime_ratio={agg.runtime_ratio:.3f} per_iter={agg.matched_runtime_ratio:.3f} " + " ".join(
                        f"{name}={agg.param_means[name]:.3f} (cov {agg.coverage[name]:.2f})"
                        for name in agg.param_means))
    if write:
        result.written = write_outputs(result, out_dir or cfg.resolved_output_dir)
    return result


def predict_external(dataset: ExternalDataset, tag: Model_tags, sampler: SamplerConfig,
                     grid_size: int = 41, basis_resolutions: int = 2) -> Tuple[ModelFit, PredictionSurface]:
    """
    Fit one model to external data on the unit square and predict on a grid_size^2 grid.
    UW and PEW use the basis model, PRD the shared process model.

    :raises ConfigError: for PKW, since external data carries no selection probabilities
    """
    logger = get_logger()
    if tag == Model_tags.PKW:
        raise ConfigError("PKW needs known selection probabilities, which external data does not have")
    samples = dataset.to_sample_set()
    grid = RegularGrid.square(RectDomain.unit_square(), grid_size)
    options = ModelOptions(basis_resolutions=basis_resolutions, shared_grid_size=grid_size)
    logger.info(f"======================== predict_external: {tag.value} on {samples.n} points")
    fit = fit_model(tag, samples, Mean_structures.BASIS, sampler, options)
    surface = predict_surface(fit.model, fit.draws, grid)
    logger.info(f"predict_external: fitted in {fit.runtime:.2f}s, accept {fit.draws.accept_rate:.3f}, "
                f"surface range [{np.min(surface.mean):.4g}, {np.max(surface.mean):.4g}]")
    return fit, surface


def sweep_target_n(cfg: ExperimentConfig, values: Sequence[int], out_dir: Optional[Union[str, Path]] = None,
                   show_timestamp: bool = False) -> pd.DataFrame:
    """
    Rerun a Scenario2 experiment for every target_n in values and report the
    surface scores with whether MSE(PRD) < MSE(PKW) < MSE(PEW) < MSE(UW) held.

    :raises ConfigError: for any scenario but Scenario2
    """
    logger = get_logger()
    if cfg.scenario != Scenario_tags.SCENARIO2:
        raise ConfigError(f"target_n sweeps need Scenario2, config is {cfg.scenario.value}")
    rows = []
    for target_n in values:
        result = run_experiment(replace(cfg, target_n=int(target_n)), write=False, show_timestamp=show_timestamp)
        ordered = mse_ordering_holds(result.aggregate, SCENARIO2_MSE_ORDER)
        logger.info(f"sweep_target_n: target_n={target_n} ordering {'holds' if ordered else 'fails'}")
        for tag, agg in result.aggregate.models.items():
            rows.append({"target_n": int(target_n), "model": tag.value, "mse": agg.mse,
                         "mean_abs_bias": agg.mean_abs_bias, "ordered": int(ordered)})
    frame = pd.DataFrame(rows)
    if out_dir is not None:
        emit_sweep(frame, out_dir)
    return frame
