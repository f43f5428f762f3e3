"""
Writers for tables, surfaces and the JSON mirror of a run.

CSV files use 6 significant digits and '\n' line endings. Wall-clock fields
appear only in runtimes.csv and the JSON mirror; every other CSV of two
identical runs is byte-identical.
"""
import json
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import pandas as pd

from prefsample.evaluation.reports import AggregateReport, ReplicationReport
from prefsample.experiment_management.ingestion import AffineRescale
from prefsample.inference.posterior import PredictionSurface
from prefsample.sampling_management.sample_set import TruthSurface
from prefsample.utils.enums import Model_tags, Scenario_tags
from prefsample.utils.logger import get_logger

TABLE_FLOAT_FORMAT = "%.6g"
RUNTIME_FILE = "runtimes.csv"
SWEEP_FILE = "sweep.csv"

# (parameter table, prediction table) file names per scenario
TABLE_FILES = {
    Scenario_tags.SCENARIO1: ("table1.csv", "table2.csv"),
    Scenario_tags.SCENARIO2: (None, "table3.csv"),
    Scenario_tags.EXTERNAL: (None, "prediction.csv"),
}


def _write_csv(frame: pd.DataFrame, path: Path) -> Path:
    frame.to_csv(path, index=False, float_format=TABLE_FLOAT_FORMAT, lineterminator="\n")
    return path


def emit_tables(report: AggregateReport, out_dir: Union[str, Path],
                replications: Optional[Sequence[ReplicationReport]] = None) -> List[Path]:
    """
    Write the parameter table (when there are true parameters), the prediction
    table, replications.csv, runtimes.csv (when UW was fitted) and report.json.
    Returns the written paths.
    """
    logger = get_logger()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    param_file, pred_file = TABLE_FILES[report.scenario]
    written = []
    if param_file and report.true_params:
        written.append(_write_csv(report.parameter_table(), out_dir / param_file))
    written.append(_write_csv(report.prediction_table(), out_dir / pred_file))
    if replications:
        rows = [row for rep in sorted(replications, key=lambda r: r.replication) for row in rep.to_rows()]
        if rows:
            written.append(_write_csv(pd.DataFrame(rows), out_dir / "replications.csv"))
    if Model_tags.UW in report.models:
        written.append(_write_csv(report.runtime_table(), out_dir / RUNTIME_FILE))
    written.append(emit_report_json(report, out_dir / "report.json"))
    for path in written:
        logger.info(f"emit_tables: wrote {path}")
    return written


def report_to_dict(report: AggregateReport) -> Dict:
    return {
        "scenario": report.scenario.value,
        "n_replications": report.n_replications,
        "true_params": report.true_params,
        "models": {
            tag.value: {
                "param_means": agg.param_means,
                "coverage": agg.coverage,
                "widths": agg.widths,
                "mse": agg.mse,
                "mean_abs_bias": agg.mean_abs_bias,
                "runtime_mean": agg.runtime_mean,
                "runtime_ratio": agg.runtime_ratio,
                "matched_runtime_ratio": agg.matched_runtime_ratio,
            } for tag, agg in report.models.items()
        },
        "config": report.config,
    }


def emit_report_json(report: AggregateReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(json.dumps(report_to_dict(report), indent=2) + "\n", encoding="utf-8")
    return path


def emit_surface(surface: PredictionSurface, out_dir: Union[str, Path], tag: str,
                 rescale: Optional[AffineRescale] = None) -> Path:
    """
    Long-format x,y,mean,lower,upper with one row per grid center.
    With rescale the unit-square centers are mapped back to the original coordinates.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    centers = surface.grid.centers if rescale is None else rescale.inverse(surface.grid.centers)
    frame = pd.DataFrame({"x": centers[:, 0], "y": centers[:, 1], "mean": surface.mean,
                          "lower": surface.lower, "upper": surface.upper})
    path = _write_csv(frame, out_dir / f"surface_{tag}.csv")
    get_logger().debug(f"emit_surface: wrote {path}")
    return path


def emit_truth(truth: TruthSurface, out_dir: Union[str, Path], tag: str) -> Path:
    """Truth values in the layout of emit_surface"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    centers = truth.grid.centers
    frame = pd.DataFrame({"x": centers[:, 0], "y": centers[:, 1], "truth": truth.values})
    return _write_csv(frame, out_dir / f"truth_{tag}.csv")


def emit_sweep(frame: pd.DataFrame, out_dir: Union[str, Path]) -> Path:
    """One row per swept target_n and model"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = _write_csv(frame, out_dir / SWEEP_FILE)
    get_logger().info(f"emit_sweep: wrote {path}")
    return path
