"""
prefsample command line.

    prefsample simulate --scenario 1 --seed 3 --out data/
    prefsample fit --config configs/scenario1.json
    prefsample evaluate --config configs/scenario2.json --workers 8
    prefsample reproduce --table 2
    prefsample sweep --config configs/scenario2.json --target-n 40 60 100 150
    prefsample predict --data lead.csv --model PEW --log
"""
import argparse
import os
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from prefsample.experiment_management.config import OUTPUT_DIR_ENV, ExperimentConfig, default_sampler, load_config
from prefsample.experiment_management.experiment_runner import (predict_external, run_experiment, run_replication,
                                                                simulate_replication, sweep_target_n)
from prefsample.experiment_management.ingestion import emit_samples, ingest_csv
from prefsample.experiment_management.output_writer import emit_surface, emit_truth
from prefsample.inference.diagnostics import summarize
from prefsample.inference.posterior import SamplerConfig
from prefsample.utils.enums import Model_tags, Response_transforms, Scenario_tags
from prefsample.utils.errors import ConfigError, PrefSampleError
from prefsample.utils.logger import LogLevel, get_logger, setup_logging
from prefsample.utils.seed_management import replication_seed
from prefsample.weight_management.poststratification import poststratified_mean, poststratify_samples

SCENARIO_ARGS = {"1": Scenario_tags.SCENARIO1, "2": Scenario_tags.SCENARIO2}
TABLE_SCENARIOS = {"1": Scenario_tags.SCENARIO1, "2": Scenario_tags.SCENARIO1, "3": Scenario_tags.SCENARIO2}
POSTSTRATIFY_CELLS = 5


def _experiment_overrides(args) -> dict:
    overrides = {}
    for key in ("n_replications", "workers", "base_seed"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return overrides


def _config_from_args(args) -> ExperimentConfig:
    overrides = _experiment_overrides(args)
    if getattr(args, "config", None):
        return load_config(args.config, overrides)
    return ExperimentConfig.desk_scale(SCENARIO_ARGS[args.scenario], **overrides)


def cmd_simulate(args) -> int:
    logger = get_logger()
    cfg = _config_from_args(args)
    seed = replication_seed(cfg.base_seed, args.replication)
    samples, truth = simulate_replication(cfg, seed)
    out_dir = Path(args.out or cfg.resolved_output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    emit_samples(samples, out_dir / "samples.csv")
    emit_truth(truth, out_dir, "grid")

    strata = poststratify_samples(samples, truth.grid.domain, POSTSTRATIFY_CELLS, truth.grid.centers)
    logger.info(f"======================== simulate: {samples}")
    logger.info(f"sample mean          {np.mean(samples.z):.4f}")
    logger.info(f"poststratified mean  {poststratified_mean(strata):.4f} ({len(strata.cells)} cells)")
    logger.info(f"true surface mean    {np.mean(truth.values):.4f}")
    logger.info(f"wrote {out_dir / 'samples.csv'}")
    return 0


def cmd_fit(args) -> int:
    logger = get_logger()
    cfg = _config_from_args(args)
    outcome = run_replication(cfg, args.replication, keep_surfaces=True)
    out_dir = Path(args.out or cfg.resolved_output_dir)
    for tag, report in outcome.report.models.items():
        logger.info(f"{tag.value}: surface mse {report.surface_mse:.4f}, runtime {report.runtime:.2f}s, "
                    f"accept {report.accept_rate:.3f}, "
                    + " ".join(f"{n}={m:.3f} [{report.lower[n]:.3f}, {report.upper[n]:.3f}]"
                               for n, m in report.means.items()))
        emit_surface(outcome.surfaces[tag], out_dir, f"{tag.value}_r{args.replication}")
    emit_truth(outcome.truth, out_dir, f"r{args.replication}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _config_from_args(args)
    run_experiment(cfg, out_dir=args.out, show_timestamp=args.timestamps)
    return 0


def cmd_reproduce(args) -> int:
    scenario = TABLE_SCENARIOS[args.table]
    overrides = _experiment_overrides(args)
    if args.config:
        cfg = load_config(args.config, overrides)
        if cfg.scenario != scenario:
            raise ConfigError(f"Table {args.table} belongs to {scenario.value}, config is {cfg.scenario.value}")
    else:
        cfg = ExperimentConfig.desk_scale(scenario, **overrides)
    run_experiment(cfg, out_dir=args.out, show_timestamp=args.timestamps)
    return 0


def cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    out_dir = Path(args.out or cfg.resolved_output_dir)
    sweep_target_n(cfg, args.target_n, out_dir=out_dir, show_timestamp=args.timestamps)
    return 0


def cmd_predict(args) -> int:
    logger = get_logger()
    tag = Model_tags(args.model)
    transform = Response_transforms.LOG if args.log else Response_transforms.NONE
    dataset = ingest_csv(args.data, transform=transform)
    base = default_sampler(tag)
    try:
        sampler = SamplerConfig(n_iter=args.n_iter or base.n_iter, n_burn=args.n_burn or base.n_burn,
                                leapfrog_steps=base.leapfrog_steps, target_accept=base.target_accept, seed=args.seed)
    except ValueError as e:
        raise ConfigError(f"Invalid sampler settings: {e}") from e
    fit, surface = predict_external(dataset, tag, sampler, grid_size=args.grid_size)
    out_dir = Path(args.out or os.environ.get(OUTPUT_DIR_ENV) or "results")
    path = emit_surface(surface, out_dir, f"{tag.value}_external", rescale=dataset.rescale)
    summary_path = out_dir / f"summary_{tag.value}_external.csv"
    summarize(fit.draws).to_frame().to_csv(summary_path, index=False, float_format="%.6g", lineterminator="\n")
    logger.info(f"predict: wrote {path} and {summary_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prefsample",
                                     description="Preferential sampling simulation and inference")
    parser.add_argument("--verbose", action="store_true", help="debug output")
    parser.add_argument("--quiet", action="store_true", help="warnings and errors only")
    parser.add_argument("--timestamps", action="store_true", help="prefix log lines with the time")
    sub = parser.add_subparsers(dest="command", required=True)

    def experiment_args(p, scenario: bool = True):
        p.add_argument("--config", help="JSON experiment config")
        if scenario:
            p.add_argument("--scenario", choices=sorted(SCENARIO_ARGS), default="1",
                           help="scenario used when no config is given")
        p.add_argument("--replications", dest="n_replications", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--seed", dest="base_seed", type=int)
        p.add_argument("--out", help="output directory (overrides config and PREFSAMPLE_OUTPUT_DIR)")

    p = sub.add_parser("simulate", help="simulate one data set and write it")
    experiment_args(p)
    p.add_argument("--replication", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit the configured models to one replication")
    experiment_args(p)
    p.add_argument("--replication", type=int, default=0)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("evaluate", help="run every replication and write the tables")
    experiment_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("reproduce", help="run the desk-scale study behind a table")
    experiment_args(p, scenario=False)
    p.add_argument("--table", choices=sorted(TABLE_SCENARIOS), required=True)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("sweep", help="rerun a Scenario2 experiment over several target_n values")
    experiment_args(p)
    p.add_argument("--target-n", type=int, nargs="+", required=True)
    p.set_defaults(func=cmd_sweep, scenario="2")

    p = sub.add_parser("predict", help="fit one model to an x,y,z CSV file")
    p.add_argument("--data", required=True)
    p.add_argument("--model", choices=[t.value for t in Model_tags], required=True)
    p.add_argument("--log", action="store_true", help="model the log of the response")
    p.add_argument("--n-iter", type=int)
    p.add_argument("--n-burn", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-size", type=int, default=41)
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = LogLevel.DEBUG if args.verbose else LogLevel.WARNING if args.quiet else LogLevel.INFO
    logger = setup_logging(level, show_timestamp=args.timestamps)
    try:
        return args.func(args)
    except PrefSampleError as e:
        logger.error(f"prefsample {args.command}: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
