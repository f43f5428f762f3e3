"""
Replication scoring and aggregation over replications.
"""
from typing import Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np

from prefsample.evaluation.reports import AggregateReport, ModelAggregate, ModelReport, ReplicationReport
from prefsample.inference.posterior import PosteriorSummary, PredictionSurface
from prefsample.sampling_management.sample_set import TruthSurface
from prefsample.utils.enums import Model_tags, Scenario_tags
from prefsample.utils.logger import get_logger


def _check_aligned(pred: PredictionSurface, truth: TruthSurface):
    if pred.grid != truth.grid:
        raise ValueError(f"Prediction grid {pred.grid} is not the truth grid {truth.grid}")


def surface_mse(pred: PredictionSurface, truth: TruthSurface) -> float:
    _check_aligned(pred, truth)
    return float(np.mean((pred.mean - truth.values) ** 2))


def mean_abs_bias_from_errors(errors: Sequence[np.ndarray]) -> float:
    """errors[r] = prediction - truth of replication r; mean over r, then |.|, then grid mean"""
    stacked = np.vstack([np.asarray(e, dtype=float).ravel() for e in errors])
    return float(np.mean(np.abs(stacked.mean(axis=0))))


def mean_abs_bias(preds: Sequence[PredictionSurface],
                  truths: Union[TruthSurface, Sequence[TruthSurface]]) -> float:
    """
    Systematic bias of the predicted surface. Per grid cell the errors are averaged
    over replications first, so errors of opposite sign cancel.

    :param truths: one truth per replication, or a single truth shared by all
    """
    if len(preds) == 0:
        raise ValueError("mean_abs_bias needs at least one prediction")
    if isinstance(truths, TruthSurface):
        truths = [truths] * len(preds)
    if len(truths) != len(preds):
        raise ValueError(f"{len(preds)} predictions but {len(truths)} truths")
    errors = []
    for pred, truth in zip(preds, truths):
        _check_aligned(pred, truth)
        errors.append(pred.mean - truth.values)
    return mean_abs_bias_from_errors(errors)


def model_report(tag: Model_tags, summary: PosteriorSummary, pred: PredictionSurface, truth: TruthSurface,
                 runtime: float, true_params: Mapping[str, float], accept_rate: float = float("nan"),
                 n_iter: int = 0) -> ModelReport:
    """
    Score one fitted model. Only parameters named in true_params are reported;
    with no true parameters (Scenario2) the report carries the surface scores only.
    """
    names = [name for name in true_params if name in summary.names]
    idx = [summary.index(name) for name in names]
    means = {name: float(summary.mean[i]) for name, i in zip(names, idx)}
    lower = {name: float(summary.lower[i]) for name, i in zip(names, idx)}
    upper = {name: float(summary.upper[i]) for name, i in zip(names, idx)}
    hits = {name: bool(lower[name] <= true_params[name] <= upper[name]) for name in names}
    return ModelReport(tag=tag, means=means, lower=lower, upper=upper, hits=hits,
                       surface_mse=surface_mse(pred, truth), surface_errors=pred.mean - truth.values,
                       runtime=runtime, accept_rate=accept_rate, n_iter=n_iter)


def coverage_and_width(reports: Sequence[ReplicationReport], true_params: Mapping[str, float],
                       tag: Model_tags) -> Dict[str, Tuple[float, float]]:
    """Per parameter: (fraction of replications whose interval holds the truth, mean interval width)"""
    model_reports = [r.models[tag] for r in reports if tag in r.models]
    if not model_reports:
        raise ValueError(f"No replication has results for {tag.value}")
    result = {}
    for name in true_params:
        hits = [m.hits[name] for m in model_reports if name in m.hits]
        if not hits:
            continue
        widths = [m.upper[name] - m.lower[name] for m in model_reports if name in m.hits]
        result[name] = (sum(hits) / len(hits), float(np.mean(widths)))
    return result


def runtime_ratio(reports: Sequence[ReplicationReport], per_iteration: bool = False) -> Dict[Model_tags, float]:
    """
    Mean runtime of every model divided by the mean UW runtime. With per_iteration
    every runtime is first divided by its sampler iterations, which compares the
    models at matched budgets; models without an iteration count get nan.
    """
    runtimes: Dict[Model_tags, List[float]] = {}
    for report in reports:
        for tag, model in report.models.items():
            if per_iteration:
                value = model.runtime / model.n_iter if model.n_iter > 0 else float("nan")
            else:
                value = model.runtime
            runtimes.setdefault(tag, []).append(value)
    if Model_tags.UW not in runtimes:
        raise ValueError("runtime_ratio needs UW results as the reference")
    reference = float(np.mean(runtimes[Model_tags.UW]))
    if not reference > 0:
        raise ValueError(f"UW mean runtime must be > 0, got {reference}")
    ratios = {tag: float(np.mean(values)) / reference for tag, values in runtimes.items()}
    ratios[Model_tags.UW] = 1.0
    return ratios


def aggregate(reports: Sequence[ReplicationReport], scenario: Scenario_tags,
              true_params: Mapping[str, float]) -> AggregateReport:
    logger = get_logger()
    if not reports:
        raise ValueError("aggregate needs at least one replication report")
    tags = [tag for tag in Model_tags if any(tag in r.models for r in reports)]
    ratios = runtime_ratio(reports) if Model_tags.UW in tags else {}
    matched = {}
    uw_counted = [r.models[Model_tags.UW].n_iter > 0 for r in reports if Model_tags.UW in r.models]
    if uw_counted and all(uw_counted):
        matched = runtime_ratio(reports, per_iteration=True)
    models = {}
    for tag in tags:
        model_reports = [r.models[tag] for r in reports if tag in r.models]
        cw = coverage_and_width(reports, true_params, tag)
        param_means = {name: float(np.mean([m.means[name] for m in model_reports if name in m.means]))
                       for name in cw}
        runtime_mean = float(np.mean([m.runtime for m in model_reports]))
        models[tag] = ModelAggregate(
            tag=tag, param_means=param_means,
            coverage={name: rate for name, (rate, _) in cw.items()},
            widths={name: width for name, (_, width) in cw.items()},
            mse=float(np.mean([m.surface_mse for m in model_reports])),
            mean_abs_bias=mean_abs_bias_from_errors([m.surface_errors for m in model_reports]),
            runtime_mean=runtime_mean, runtime_ratio=ratios.get(tag, float("nan")),
            matched_runtime_ratio=matched.get(tag, float("nan")))
        logger.debug(f"aggregate: {tag.value} mse={models[tag].mse:.4f} bias={models[tag].mean_abs_bias:.4f}")
    return AggregateReport(scenario=scenario, n_replications=len(reports), models=models,
                           true_params=dict(true_params))


def mse_ordering_holds(report: AggregateReport, order: Sequence[Model_tags]) -> bool:
    """True when surface MSE strictly increases along order; a model missing from report fails it"""
    if any(tag not in report.models for tag in order):
        return False
    mses = [report.models[tag].mse for tag in order]
    return all(a < b for a, b in zip(mses, mses[1:]))
