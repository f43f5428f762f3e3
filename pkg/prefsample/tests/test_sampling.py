import numpy as np
import pytest

from prefsample.sampling_management.point_process import inhomogeneous_ppp
from prefsample.sampling_management.sample_set import SampleSet, TruthSurface
from prefsample.sampling_management.scenarios import (SurfaceInterpolator, scenario1_mean, selection_prob_scn1,
                                                      simulate_scenario1, simulate_scenario2)
from prefsample.spatial_core.covariance import CovSpec, GPRealization, simulate_gp
from prefsample.spatial_core.geometry import Point2, RectDomain, RegularGrid
from prefsample.utils.enums import Scenario_tags
from prefsample.utils.errors import IntensityBoundError, SamplingError


def test_selection_prob_values():
    assert selection_prob_scn1(Point2(0.5, 0.5)) == 1.0
    assert selection_prob_scn1(Point2(0.0, 0.0)) == pytest.approx(0.00390625, rel=1e-12)
    assert selection_prob_scn1(Point2(0.5, 0.0)) == pytest.approx(0.100113, rel=1e-5)
    values = selection_prob_scn1(np.array([[0.5, 0.5], [0.0, 0.0]]))
    assert values.shape == (2,)


def test_selection_prob_radial_decay():
    """Test the probability is in (0, 1] and decreases away from the center"""
    radii = np.linspace(0.0, 0.5, 20)
    pts = np.column_stack([0.5 + radii, np.full(20, 0.5)])
    probs = selection_prob_scn1(pts)
    assert np.all(probs > 0) and np.all(probs <= 1)
    assert np.all(np.diff(probs) < 0)


def test_sample_set_validation():
    with pytest.raises(ValueError):
        SampleSet(locations=np.zeros((3, 2)), z=np.zeros(2))
    with pytest.raises(ValueError):
        SampleSet(locations=np.zeros((2, 2)), z=np.zeros(2), scenario_tag=Scenario_tags.SCENARIO1)
    with pytest.raises(ValueError):
        SampleSet(locations=np.zeros((2, 2)), z=np.zeros(2), p_true=np.array([0.5, 1.5]),
                  scenario_tag=Scenario_tags.SCENARIO1)
    with pytest.raises(ValueError):
        SampleSet(locations=np.zeros((2, 2)), z=np.zeros(2), p_true=np.array([0.5, 0.0]))
    ok = SampleSet(locations=np.zeros((2, 2)), z=np.zeros(2), p_true=np.array([2.0, 3.0]),
                   scenario_tag=Scenario_tags.SCENARIO2)
    assert ok.n == 2 and ok.has_p_true


def test_scenario1_standardization():
    """Test p_tilde is standardized with the candidate-set mean and sd, so kept points sit above zero"""
    candidates = np.random.default_rng(3).random((1000, 2))
    samples, truth = simulate_scenario1(seed=12, candidates=candidates)
    probs = selection_prob_scn1(candidates)
    assert truth.p_mean == pytest.approx(np.mean(probs), rel=1e-12)
    assert truth.p_sd == pytest.approx(np.std(probs, ddof=1), rel=1e-12)
    p_tilde = (samples.p_true - truth.p_mean) / truth.p_sd
    assert np.mean(p_tilde) > 0.5
    assert samples.scenario_tag == Scenario_tags.SCENARIO1
    assert truth.values.shape == (41 * 41,)
    np.testing.assert_allclose(truth.values, scenario1_mean(truth.grid.centers, truth.p_mean, truth.p_sd))


def test_scenario1_reproducible():
    a, _ = simulate_scenario1(n_candidates=500, seed=8)
    b, _ = simulate_scenario1(n_candidates=500, seed=8)
    np.testing.assert_array_equal(a.locations, b.locations)
    np.testing.assert_array_equal(a.z, b.z)


def test_scenario1_degenerate_candidates():
    """Test candidates at the center are all kept and give a constant response without noise"""
    candidates = np.full((20, 2), 0.5)
    samples, truth = simulate_scenario1(noise_sd=0.0, seed=1, candidates=candidates)
    assert samples.n == 20
    np.testing.assert_allclose(samples.z, 3.5)
    assert truth.p_sd == 0.0


def test_scenario1_too_few_kept():
    with pytest.raises(SamplingError):
        simulate_scenario1(seed=0, candidates=np.zeros((10, 2)))
    with pytest.raises(ValueError):
        simulate_scenario1(n_candidates=5, seed=0)


def test_scenario1_expected_kept_count():
    """Test the mean kept count over seeds matches 1000 times the integral of the selection probability"""
    m = 400
    axis = (np.arange(m) + 0.5) / m
    s1, s2 = np.meshgrid(axis, axis)
    integral = float(np.mean(selection_prob_scn1(np.column_stack([s1.ravel(), s2.ravel()]))))
    counts = [simulate_scenario1(n_candidates=1000, seed=s)[0].n for s in range(200)]
    assert np.mean(counts) == pytest.approx(1000 * integral, rel=0.10)


def test_scenario1_kept_points_concentrate():
    candidates = np.random.default_rng(5).random((1000, 2))
    samples, _ = simulate_scenario1(seed=5, candidates=candidates)
    center = np.array([0.5, 0.5])
    kept_dist = np.mean(np.linalg.norm(samples.locations - center, axis=1))
    all_dist = np.mean(np.linalg.norm(candidates - center, axis=1))
    assert kept_dist < all_dist


def test_ppp_constant_intensity_is_poisson():
    """Test counts without thinning have Poisson(bound * area) mean and variance"""
    domain = RectDomain(0.0, 2.0, 0.0, 1.0)
    bound = 25.0

    def intensity(points):
        return np.full(points.shape[0], bound)

    counts = np.array([inhomogeneous_ppp(intensity, domain, bound, seed).shape[0] for seed in range(1000)])
    assert counts.mean() == pytest.approx(50.0, abs=1.0)
    assert counts.var(ddof=1) == pytest.approx(50.0, abs=10.0)


def test_ppp_points_inside_domain():
    domain = RectDomain(-1.0, 1.0, 2.0, 3.0)
    pts = inhomogeneous_ppp(lambda p: 40.0 * p[:, 1] / 3.0, domain, 40.0, 3)
    assert np.all(domain.contains(pts))


def test_ppp_bound_violation():
    with pytest.raises(IntensityBoundError):
        inhomogeneous_ppp(lambda p: np.full(p.shape[0], 100.0), RectDomain.unit_square(), 50.0, 0)


def _constant_gp(value: float, size: int = 11) -> GPRealization:
    grid = RegularGrid.square(RectDomain.unit_square(), size)
    return GPRealization(grid=grid, values=np.full(grid.size, value), spec=CovSpec(), seed=0)


def test_scenario2_constant_surface_count():
    """Test a flat surface gives a homogeneous process with target_n expected points"""
    gp = _constant_gp(0.3)
    counts = [simulate_scenario2(gp, target_n=150, seed=s)[0].n for s in range(500)]
    assert np.mean(counts) == pytest.approx(150, rel=0.05)


def test_scenario2_noiseless_response():
    grid = RegularGrid.square(RectDomain.unit_square(), 11)
    gp = simulate_gp(grid, CovSpec(amplitude=1.0, length_scale=0.5), seed=9)
    samples, truth = simulate_scenario2(gp, target_n=100, noise_sd=0.0, seed=4)
    np.testing.assert_allclose(samples.z, SurfaceInterpolator(grid, gp.values)(samples.locations))
    np.testing.assert_array_equal(truth.values, gp.values)
    assert samples.scenario_tag == Scenario_tags.SCENARIO2
    assert np.all(samples.p_true > 0)


def test_scenario2_prefers_high_surface():
    """Test cell counts correlate positively with the mean surface per cell"""
    grid = RegularGrid.square(RectDomain.unit_square(), 20)
    correlations = []
    for seed in range(100):
        gp = simulate_gp(grid, CovSpec(amplitude=1.0, length_scale=0.5), seed=seed)
        samples, _ = simulate_scenario2(gp, target_n=150, seed=seed)
        cell = (np.minimum((samples.locations * 5).astype(int), 4) * [1, 5]).sum(axis=1)
        counts = np.bincount(cell, minlength=25)
        grid_cell = (np.minimum((grid.centers * 5).astype(int), 4) * [1, 5]).sum(axis=1)
        mean_p = np.bincount(grid_cell, weights=gp.values, minlength=25) / np.bincount(grid_cell, minlength=25)
        if np.ptp(counts) > 0:
            correlations.append(np.corrcoef(counts, mean_p)[0, 1])
    assert np.mean(correlations) > 0


def test_scenario2_rejects_small_target():
    with pytest.raises(ValueError):
        simulate_scenario2(_constant_gp(0.0), target_n=5, seed=0)


def test_surface_interpolator_clamps():
    """Test the interpolant reproduces grid values and never exceeds the maximum"""
    grid = RegularGrid.square(RectDomain.unit_square(), 5)
    values = np.arange(grid.size, dtype=float)
    interp = SurfaceInterpolator(grid, values)
    np.testing.assert_allclose(interp(grid.centers), values)
    corners = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    out = interp(corners)
    assert np.all(out <= interp.max_value)
    assert out[1] == pytest.approx(values.max())
