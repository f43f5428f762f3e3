import numpy as np
import pytest

from prefsample.evaluation.metrics import (aggregate, coverage_and_width, mean_abs_bias, model_report,
                                           mse_ordering_holds, runtime_ratio, surface_mse)
from prefsample.evaluation.reports import ModelReport, ReplicationReport
from prefsample.inference.posterior import PosteriorSummary, PredictionSurface
from prefsample.sampling_management.sample_set import TruthSurface
from prefsample.spatial_core.geometry import RectDomain, RegularGrid
from prefsample.utils.enums import Model_tags, Scenario_tags

GRID = RegularGrid.square(RectDomain.unit_square(), 4)
TRUE_PARAMS = {"beta_1": 5.0, "beta_2": 2.0}


def _surface(values, grid=GRID):
    values = np.broadcast_to(np.asarray(values, dtype=float), (grid.size,))
    return PredictionSurface(grid=grid, mean=values, lower=values - 1.0, upper=values + 1.0)


def _truth(values, grid=GRID):
    return TruthSurface(grid=grid, values=np.broadcast_to(np.asarray(values, dtype=float), (grid.size,)))


def _model(tag, hit_1, hit_2, runtime=1.0, mse=0.0, errors=0.0, n_iter=0):
    lower = {"beta_1": 4.5 if hit_1 else 5.5, "beta_2": 1.0 if hit_2 else 2.5}
    upper = {"beta_1": 5.5 if hit_1 else 6.5, "beta_2": 3.0 if hit_2 else 3.5}
    means = {name: 0.5 * (lower[name] + upper[name]) for name in lower}
    hits = {name: lower[name] <= TRUE_PARAMS[name] <= upper[name] for name in lower}
    return ModelReport(tag=tag, means=means, lower=lower, upper=upper, hits=hits, surface_mse=mse,
                       surface_errors=np.full(GRID.size, errors), runtime=runtime, n_iter=n_iter)


def test_surface_mse_values():
    assert surface_mse(_surface(2.0), _truth(2.0)) == 0.0
    assert surface_mse(_surface(3.0), _truth(2.0)) == pytest.approx(1.0)
    rng = np.random.default_rng(0)
    pred, truth = rng.normal(size=GRID.size), rng.normal(size=GRID.size)
    expected = sum((p - t) ** 2 for p, t in zip(pred, truth)) / GRID.size
    assert surface_mse(_surface(pred), _truth(truth)) == pytest.approx(expected)


def test_misaligned_grids_raise():
    other = RegularGrid.square(RectDomain.unit_square(), 5)
    with pytest.raises(ValueError):
        surface_mse(_surface(1.0), _truth(1.0, grid=other))
    with pytest.raises(ValueError):
        mean_abs_bias([_surface(1.0)], [_truth(1.0, grid=other)])


def test_mean_abs_bias_values():
    assert mean_abs_bias([_surface(2.5), _surface(2.5)], _truth(2.0)) == pytest.approx(0.5)
    assert mean_abs_bias([_surface(3.0), _surface(1.0)], _truth(2.0)) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        mean_abs_bias([_surface(1.0)], [_truth(1.0), _truth(1.0)])


def test_bias_not_above_root_mse():
    """Test mean absolute bias never exceeds the root of the mean squared error"""
    rng = np.random.default_rng(1)
    truth = _truth(rng.normal(size=GRID.size))
    preds = [_surface(truth.values + rng.normal(0.2, 0.5, GRID.size)) for _ in range(10)]
    mse = np.mean([surface_mse(p, truth) for p in preds])
    assert mean_abs_bias(preds, truth) <= np.sqrt(mse) + 1e-12


def test_bias_not_above_mean_absolute_error():
    """Test mean absolute bias never exceeds the replication mean of the grid-averaged absolute error"""
    rng = np.random.default_rng(2)
    truth = _truth(rng.normal(size=GRID.size))
    preds = [_surface(truth.values + rng.normal(-0.1, 0.8, GRID.size)) for _ in range(12)]
    mean_abs_error = np.mean([np.mean(np.abs(p.mean - truth.values)) for p in preds])
    assert mean_abs_bias(preds, truth) <= mean_abs_error + 1e-12


def test_model_report_scores_parameters():
    summary = PosteriorSummary(names=["beta_1", "beta_2", "log_sigma_z"], mean=np.array([5.1, 1.2, 0.0]),
                               lower=np.array([4.8, 0.5, -1.0]), upper=np.array([5.4, 1.9, 1.0]),
                               ess=np.full(3, 100.0))
    report = model_report(Model_tags.PKW, summary, _surface(1.5), _truth(1.0), 2.0, TRUE_PARAMS, accept_rate=0.8)
    assert report.hits == {"beta_1": True, "beta_2": False}
    assert report.surface_mse == pytest.approx(0.25)
    assert "log_sigma_z" not in report.means
    assert report.widths()["beta_2"] == pytest.approx(1.4)
    no_truth = model_report(Model_tags.UW, summary, _surface(1.0), _truth(1.0), 1.0, {})
    assert no_truth.means == {} and no_truth.hits == {}


def test_model_report_rejects_non_finite():
    with pytest.raises(ValueError):
        ModelReport(tag=Model_tags.UW, means={"beta_1": float("nan")}, lower={}, upper={}, hits={},
                    surface_mse=0.0, surface_errors=np.zeros(GRID.size), runtime=1.0)


def _reports():
    pattern = [(True, True), (True, False), (False, True), (True, True)]
    reports = []
    for r, (h1, h2) in enumerate(pattern):
        report = ReplicationReport(replication=r, seed=100 + r, n_samples=150)
        report.models[Model_tags.UW] = _model(Model_tags.UW, h1, h2, runtime=2.0, mse=0.5, errors=1.0 - 2 * (r % 2))
        report.models[Model_tags.PKW] = _model(Model_tags.PKW, True, h2, runtime=3.0, mse=0.1, errors=0.25)
        reports.append(report)
    return reports


def test_coverage_is_fraction_of_hits():
    result = coverage_and_width(_reports(), TRUE_PARAMS, Model_tags.UW)
    assert result["beta_1"] == (pytest.approx(0.75), pytest.approx(1.0))
    assert result["beta_2"][0] == pytest.approx(0.75)
    assert result["beta_2"][1] == pytest.approx(0.75 * 2.0 + 0.25 * 1.0)
    with pytest.raises(ValueError):
        coverage_and_width(_reports(), TRUE_PARAMS, Model_tags.PRD)


def test_runtime_ratio_relative_to_uw():
    ratios = runtime_ratio(_reports())
    assert ratios[Model_tags.UW] == 1.0
    assert ratios[Model_tags.PKW] == pytest.approx(1.5)
    only_pkw = [ReplicationReport(0, 1, 10, models={Model_tags.PKW: _model(Model_tags.PKW, True, True)})]
    with pytest.raises(ValueError):
        runtime_ratio(only_pkw)


def test_runtime_ratio_at_matched_iterations():
    """Test per-iteration ratios divide out unequal sampler budgets"""
    report = ReplicationReport(replication=0, seed=1, n_samples=150)
    report.models[Model_tags.UW] = _model(Model_tags.UW, True, True, runtime=2.0, n_iter=1000)
    report.models[Model_tags.PRD] = _model(Model_tags.PRD, True, True, runtime=30.0, n_iter=3000)
    report.models[Model_tags.WCR] = _model(Model_tags.WCR, True, True, runtime=0.5)
    assert runtime_ratio([report])[Model_tags.PRD] == pytest.approx(15.0)
    matched = runtime_ratio([report], per_iteration=True)
    assert matched[Model_tags.PRD] == pytest.approx(5.0)
    assert np.isnan(matched[Model_tags.WCR])
    agg = aggregate([report], Scenario_tags.SCENARIO1, TRUE_PARAMS)
    table = agg.runtime_table()
    assert list(table.columns) == ["model", "runtime_mean", "runtime_ratio", "matched_runtime_ratio"]
    assert agg.models[Model_tags.PRD].matched_runtime_ratio == pytest.approx(5.0)


def test_aggregate_tables():
    report = aggregate(_reports(), Scenario_tags.SCENARIO1, TRUE_PARAMS)
    assert report.n_replications == 4
    uw = report.models[Model_tags.UW]
    assert uw.mse == pytest.approx(0.5)
    # alternating +1/-1 errors cancel
    assert uw.mean_abs_bias == pytest.approx(0.0)
    assert report.models[Model_tags.PKW].mean_abs_bias == pytest.approx(0.25)
    assert report.models[Model_tags.PKW].coverage["beta_1"] == 1.0

    params = report.parameter_table()
    assert list(params.columns) == ["model", "beta_1_mean", "beta_1_coverage", "beta_1_width",
                                    "beta_2_mean", "beta_2_coverage", "beta_2_width"]
    assert list(params["model"]) == ["UW", "PKW"]
    prediction = report.prediction_table()
    assert list(prediction.columns) == ["model", "mse", "mean_abs_bias"]
    runtimes = report.runtime_table()
    assert list(runtimes["runtime_ratio"]) == [1.0, pytest.approx(1.5)]


def test_replication_rows():
    rows = _reports()[1].to_rows()
    assert len(rows) == 4
    assert {row["model"] for row in rows} == {"UW", "PKW"}
    beta_2_uw = [row for row in rows if row["model"] == "UW" and row["parameter"] == "beta_2"][0]
    assert beta_2_uw["hit"] == 0
    assert beta_2_uw["width"] == pytest.approx(1.0)


def test_mse_ordering_holds():
    report = aggregate(_reports(), Scenario_tags.SCENARIO1, TRUE_PARAMS)
    assert mse_ordering_holds(report, [Model_tags.PKW, Model_tags.UW])
    assert not mse_ordering_holds(report, [Model_tags.UW, Model_tags.PKW])
    # a model without results fails the ordering
    assert not mse_ordering_holds(report, [Model_tags.PRD, Model_tags.PKW, Model_tags.UW])
