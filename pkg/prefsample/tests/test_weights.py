import math

import numpy as np
import pytest

from prefsample.sampling_management.sample_set import SampleSet
from prefsample.spatial_core.geometry import RectDomain
from prefsample.utils.enums import Scenario_tags, Weight_modes
from prefsample.utils.errors import WeightError
from prefsample.weight_management.kde import KDEConfig, default_bandwidth, kde2d_density
from prefsample.weight_management.poststratification import (StratifiedData, poststratified_mean,
                                                             poststratify_samples)
from prefsample.weight_management.weights import WeightVector, weights_from_mode


def _samples(n=60, seed=0, p_true=True):
    rng = np.random.default_rng(seed)
    locations = rng.random((n, 2))
    p = rng.uniform(0.05, 1.0, n) if p_true else None
    tag = Scenario_tags.SCENARIO1 if p_true else Scenario_tags.EXTERNAL
    return SampleSet(locations=locations, z=rng.standard_normal(n), p_true=p, scenario_tag=tag)


def test_default_bandwidth_rule():
    x = np.random.default_rng(1).normal(size=200)
    sd = np.std(x, ddof=1)
    iqr = np.subtract(*np.percentile(x, [75, 25]))
    expected = 1.06 * min(sd, iqr / 1.34) * 200 ** (-0.2)
    assert default_bandwidth(x) == pytest.approx(expected, rel=1e-12)


def test_default_bandwidth_zero_spread():
    with pytest.raises(WeightError):
        default_bandwidth(np.full(10, 0.3))
    with pytest.raises(WeightError):
        default_bandwidth([0.5])


def test_kde_integrates_to_one():
    """Test the density integrates to 1 on a fine grid covering its mass"""
    pts = 0.3 + 0.4 * np.random.default_rng(2).random((50, 2))
    cfg = KDEConfig.from_points(pts)
    m = 300
    axis = -0.5 + (np.arange(m) + 0.5) * (2.0 / m)
    g1, g2 = np.meshgrid(axis, axis)
    density = kde2d_density(pts, cfg, np.column_stack([g1.ravel(), g2.ravel()]))
    assert np.sum(density) * (2.0 / m) ** 2 == pytest.approx(1.0, abs=1e-3)


def test_kde_three_points_hand_sum():
    """Test three points with set bandwidths against an explicit three-term sum"""
    pts = [(0.2, 0.3), (0.5, 0.9), (0.7, 0.4)]
    h1, h2 = 0.15, 0.25
    cfg = KDEConfig(bandwidth1=h1, bandwidth2=h2, eval_floor=1e-12)
    at = [(0.4, 0.5), (0.0, 1.0)]
    expected = []
    for e1, e2 in at:
        total = 0.0
        for s1, s2 in pts:
            total += math.exp(-0.5 * ((e1 - s1) / h1) ** 2 - 0.5 * ((e2 - s2) / h2) ** 2) / (2.0 * math.pi * h1 * h2)
        expected.append(total / 3.0)
    np.testing.assert_allclose(kde2d_density(np.array(pts), cfg, np.array(at)), expected, rtol=1e-12)


def test_kde_identical_points():
    """Test n identical points evaluate to one kernel peak at their location"""
    pts = np.full((7, 2), 0.4)
    cfg = KDEConfig(bandwidth1=0.1, bandwidth2=0.2, eval_floor=1e-12)
    value = kde2d_density(pts, cfg, np.array([[0.4, 0.4]]))[0]
    assert value == pytest.approx(1.0 / (2.0 * np.pi * 0.1 * 0.2), rel=1e-12)


def test_kde_floor():
    pts = np.random.default_rng(3).random((20, 2))
    cfg = KDEConfig.from_points(pts)
    far = kde2d_density(pts, cfg, np.array([[50.0, 50.0]]))
    assert far[0] == cfg.eval_floor


def test_known_weights_normalized_sum():
    samples = _samples()
    weights = weights_from_mode(samples, Weight_modes.KNOWN)
    assert np.sum(weights.normalized) == pytest.approx(samples.n, abs=1e-9)
    np.testing.assert_allclose(weights.raw, 1.0 / samples.p_true)
    ratio = weights.normalized / weights.raw
    np.testing.assert_allclose(ratio, ratio[0])


def test_unit_weights_exact_ones():
    weights = weights_from_mode(_samples(), Weight_modes.UNIT)
    assert np.all(weights.normalized == 1.0)
    assert weights.mode == Weight_modes.UNIT


def test_known_weights_equal_probabilities():
    """Test equal selection probabilities reduce to unit normalized weights"""
    base = _samples()
    samples = SampleSet(locations=base.locations, z=base.z, p_true=np.full(base.n, 0.37),
                        scenario_tag=Scenario_tags.SCENARIO1)
    weights = weights_from_mode(samples, Weight_modes.KNOWN)
    np.testing.assert_allclose(weights.normalized, 1.0, rtol=1e-12)


def test_known_weights_need_probabilities():
    with pytest.raises(WeightError):
        weights_from_mode(_samples(p_true=False), Weight_modes.KNOWN)


def test_kde_weights_favour_isolated_points():
    """Test the isolated location receives the largest KDE weight"""
    rng = np.random.default_rng(4)
    cluster = 0.5 + 0.05 * rng.standard_normal((40, 2))
    locations = np.vstack([cluster, [[0.95, 0.05]]])
    samples = SampleSet(locations=locations, z=np.zeros(41))
    weights = weights_from_mode(samples, Weight_modes.KDE)
    assert np.argmax(weights.normalized) == 40
    assert np.sum(weights.normalized) == pytest.approx(41, abs=1e-9)


def test_weight_vector_rejects_nonpositive():
    with pytest.raises(WeightError):
        WeightVector.from_raw(np.array([1.0, 0.0]), Weight_modes.KNOWN)
    with pytest.raises(WeightError):
        WeightVector.from_raw(np.array([]), Weight_modes.KNOWN)


def test_poststratified_mean_hand_computed():
    data = StratifiedData(cells=[(10.0, 1.0), (30.0, 3.0)], N=40.0)
    assert poststratified_mean(data) == pytest.approx(2.5)
    single = StratifiedData(cells=[(5.0, -1.25)], N=5.0)
    assert poststratified_mean(single) == pytest.approx(-1.25)


def test_stratified_data_validation():
    with pytest.raises(ValueError):
        StratifiedData(cells=[(10.0, 1.0)], N=11.0)
    with pytest.raises(ValueError):
        StratifiedData(cells=[], N=0.0)
    with pytest.raises(ValueError):
        StratifiedData(cells=[(0.0, 1.0)], N=0.0)


def test_poststratify_samples_two_cells():
    """Test cell means are reweighted by population counts on a 2x2 partition"""
    locations = np.array([[0.1, 0.1], [0.2, 0.3], [0.8, 0.9], [0.2, 0.2]])
    z = np.array([1.0, 3.0, 10.0, 2.0])
    samples = SampleSet(locations=locations, z=z)
    population = np.array([[0.1, 0.1]] * 3 + [[0.9, 0.9]] * 1 + [[0.9, 0.1]] * 4)
    data = poststratify_samples(samples, RectDomain.unit_square(), 2, population)
    assert data.N == 4.0
    # lower-left mean 2 with N=3, upper-right mean 10 with N=1; the unsampled cell is dropped
    assert poststratified_mean(data) == pytest.approx(0.75 * 2.0 + 0.25 * 10.0)
