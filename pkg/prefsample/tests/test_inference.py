import numpy as np
import pytest
from scipy.signal import lfilter

from prefsample.inference.diagnostics import ess, summarize
from prefsample.inference.hmc import DualAveraging, _transition, hmc_sample
from prefsample.inference.posterior import PosteriorDraws, SamplerConfig
from prefsample.inference.prediction import predict_surface
from prefsample.inference import shared_sampler
from prefsample.inference.shared_sampler import mwg_sample_shared
from prefsample.models.pseudo_linear import PseudoLinearModel, PseudoLinearSpec
from prefsample.models.shared_process import SharedProcessSpec
from prefsample.sampling_management.sample_set import SampleSet
from prefsample.spatial_core.geometry import RectDomain, RegularGrid
from prefsample.utils.errors import NonFiniteDensityError, SamplerError
from prefsample.weight_management.weights import WeightVector


def _gaussian(scales):
    inv_var = 1.0 / np.square(np.asarray(scales, dtype=float))

    def logpost(theta):
        return -0.5 * float(np.sum(inv_var * theta ** 2)), -inv_var * theta
    return logpost


def test_sampler_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig(n_iter=100, n_burn=100)
    with pytest.raises(ValueError):
        SamplerConfig(target_accept=1.0)
    with pytest.raises(ValueError):
        SamplerConfig(leapfrog_steps=0)
    assert SamplerConfig(n_iter=500, n_burn=100).n_keep == 400
    assert SamplerConfig().with_seed(9).seed == 9


def test_dual_averaging_moves_towards_target():
    adapter = DualAveraging(0.1, target_accept=0.8)
    shrunk = adapter.update(0.1)
    adapter.restart(0.1)
    grown = adapter.update(1.0)
    assert shrunk < grown


def test_hmc_standard_normal_moments():
    """Test mean and variance of a two dimensional normal with unequal scales"""
    cfg = SamplerConfig(n_iter=21000, n_burn=1000, leapfrog_steps=10, seed=11)
    result = hmc_sample(_gaussian([1.0, 3.0]), np.array([0.5, -0.5]), cfg, names=["a", "b"])
    assert result.draws.shape == (20000, 2)
    assert result.names == ["a", "b"]
    means = result.draws.mean(axis=0)
    assert abs(means[0]) < 0.05
    assert abs(means[1]) < 0.15
    np.testing.assert_allclose(result.draws.var(axis=0), [1.0, 9.0], rtol=0.1)
    assert 0.5 < result.accept_rate <= 1.0
    assert result.n_divergent == 0


def _conjugate_regression():
    """Regression with known noise: log posterior, exact posterior mean and covariance"""
    rng = np.random.default_rng(4)
    x = rng.random((50, 2))
    y = x @ np.array([5.0, 2.0]) + 0.5 * rng.standard_normal(50)
    noise_var, prior_var = 0.25, 10.0
    precision = x.T @ x / noise_var + np.eye(2) / prior_var
    cov = np.linalg.inv(precision)
    exact_mean = cov @ x.T @ y / noise_var

    def logpost(theta):
        r = y - x @ theta
        value = -0.5 * r @ r / noise_var - 0.5 * theta @ theta / prior_var
        return float(value), x.T @ r / noise_var - theta / prior_var

    return logpost, exact_mean, cov


def test_hmc_conjugate_regression():
    """Test draws against the exact posterior of a regression with known noise"""
    logpost, exact_mean, cov = _conjugate_regression()
    cfg = SamplerConfig(n_iter=6000, n_burn=1000, leapfrog_steps=10, seed=2)
    result = hmc_sample(logpost, np.zeros(2), cfg)
    sd = np.sqrt(np.diag(cov))
    for j in range(2):
        mcse = sd[j] / np.sqrt(ess(result.draws[:, j]))
        assert abs(result.draws[:, j].mean() - exact_mean[j]) < 4 * mcse
    np.testing.assert_allclose(result.draws.std(axis=0), sd, rtol=0.1)


def test_hmc_split_halves_agree():
    """Test the two halves of the kept draws have means within 3 Monte Carlo standard errors"""
    logpost, _, _ = _conjugate_regression()
    cfg = SamplerConfig(n_iter=6000, n_burn=1000, leapfrog_steps=10, seed=2)
    draws = hmc_sample(logpost, np.zeros(2), cfg).draws
    first, second = draws[:2500], draws[2500:]
    for j in range(2):
        mcse = np.sqrt(first[:, j].var(ddof=1) / ess(first[:, j]) + second[:, j].var(ddof=1) / ess(second[:, j]))
        assert abs(first[:, j].mean() - second[:, j].mean()) < 3 * mcse


def test_hmc_flat_target_accepts_everything():
    flat = lambda theta: (0.0, np.zeros_like(theta))
    result = hmc_sample(flat, np.zeros(2), SamplerConfig(n_iter=400, n_burn=200, leapfrog_steps=5, seed=1))
    assert result.accept_rate == pytest.approx(1.0)


def test_transition_small_step_is_accepted():
    logpost = _gaussian([1.0, 1.0, 1.0])
    theta = np.array([0.3, -1.2, 0.8])
    logp, grad = logpost(theta)
    rng = np.random.default_rng(0)
    for _ in range(20):
        _, _, _, accept, divergent = _transition(logpost, theta, logp, grad, 1e-4, 10, np.ones(3), rng)
        assert accept > 0.999
        assert not divergent


def test_hmc_reproducible():
    cfg = SamplerConfig(n_iter=300, n_burn=100, leapfrog_steps=5, seed=8)
    a = hmc_sample(_gaussian([1.0]), np.array([0.2]), cfg)
    b = hmc_sample(_gaussian([1.0]), np.array([0.2]), cfg)
    c = hmc_sample(_gaussian([1.0]), np.array([0.2]), cfg.with_seed(9))
    np.testing.assert_array_equal(a.draws, b.draws)
    assert not np.array_equal(a.draws, c.draws)


def test_hmc_non_finite_initial_point():
    bad = lambda theta: (float("nan"), np.zeros_like(theta))
    with pytest.raises(SamplerError):
        hmc_sample(bad, np.zeros(2), SamplerConfig(n_iter=200, n_burn=100))


def test_hmc_all_divergent_raises():
    """Test a density that is finite only at its starting point"""
    def spike(theta):
        if np.any(theta != 0.0):
            raise NonFiniteDensityError("off the support")
        return 0.0, np.zeros_like(theta)

    with pytest.raises(SamplerError):
        hmc_sample(spike, np.zeros(2), SamplerConfig(n_iter=200, n_burn=100, leapfrog_steps=3))


def test_ess_white_noise():
    rng = np.random.default_rng(5)
    ratios = [ess(rng.standard_normal(4000)) / 4000 for _ in range(20)]
    assert np.mean(ratios) == pytest.approx(1.0, rel=0.1)
    assert max(ratios) <= 1.0


def test_ess_autoregressive_chain():
    """Test an AR(1) chain with phi = 0.9 against n (1 - phi) / (1 + phi)"""
    phi, n = 0.9, 50000
    noise = np.random.default_rng(6).standard_normal(n)
    chain = lfilter([1.0], [1.0, -phi], noise)
    expected = n * (1 - phi) / (1 + phi)
    assert ess(chain) == pytest.approx(expected, rel=0.25)


def test_ess_edge_cases():
    assert ess(np.full(200, 3.0)) == 0.0
    with pytest.raises(ValueError):
        ess(np.zeros(50))


def test_summarize_quantiles():
    values = np.random.default_rng(7).normal(size=(1000, 2))
    draws = PosteriorDraws(names=["a", "b"], draws=values, accept_rate=1.0, seed=0)
    summary = summarize(draws, level=0.5)
    np.testing.assert_allclose(summary.lower, np.quantile(values, 0.25, axis=0))
    np.testing.assert_allclose(summary.upper, np.quantile(values, 0.75, axis=0))
    np.testing.assert_allclose(summary.mean, values.mean(axis=0))
    assert summary.index("b") == 1
    frame = summary.to_frame()
    assert list(frame.columns) == ["parameter", "mean", "lower", "upper", "ess"]
    short = summarize(PosteriorDraws(names=["a"], draws=values[:20, :1], accept_rate=1.0, seed=0))
    assert np.isnan(short.ess[0])
    with pytest.raises(ValueError):
        summarize(draws, level=1.0)


def _linear_model():
    rng = np.random.default_rng(12)
    samples = SampleSet(locations=rng.random((20, 2)), z=rng.normal(size=20))
    return PseudoLinearModel(PseudoLinearSpec(weights=WeightVector.unit(20)), samples)


def test_predict_surface_single_draw_collapses():
    model = _linear_model()
    grid = RegularGrid.square(RectDomain.unit_square(), 5)
    draws = PosteriorDraws(names=model.parameter_names, draws=np.array([[5.0, 2.0, 0.0]]), accept_rate=1.0, seed=0)
    surface = predict_surface(model, draws, grid)
    expected = grid.centers @ np.array([5.0, 2.0])
    np.testing.assert_allclose(surface.mean, expected)
    np.testing.assert_allclose(surface.lower, expected)
    np.testing.assert_allclose(surface.upper, expected)
    assert model.mean_function(draws.draws, np.array([[1.0, 1.0]]))[0, 0] == pytest.approx(7.0)


def test_predict_surface_matches_brute_force():
    model = _linear_model()
    grid = RegularGrid.square(RectDomain.unit_square(), 9)
    values = np.random.default_rng(13).normal([5.0, 2.0, 0.0], 0.3, size=(400, 3))
    draws = PosteriorDraws(names=model.parameter_names, draws=values, accept_rate=1.0, seed=0)
    surface = predict_surface(model, draws, grid, level=0.9, chunk_size=7)
    for k in (0, 13, 40, 57, 80):
        at_center = values[:, :2] @ grid.centers[k]
        assert surface.mean[k] == pytest.approx(at_center.mean())
        assert surface.lower[k] == pytest.approx(np.quantile(at_center, 0.05))
        assert surface.upper[k] == pytest.approx(np.quantile(at_center, 0.95))
    assert np.all(surface.lower <= surface.mean) and np.all(surface.mean <= surface.upper)


def test_mwg_shared_short_chain():
    """Test shape, names and determinism of a short shared-process chain"""
    spec = SharedProcessSpec.default(knots_per_axis=5, grid_size=11)
    rng = np.random.default_rng(14)
    locations = rng.random((40, 2))
    samples = SampleSet(locations=locations, z=1.0 + locations[:, 0] + 0.3 * rng.standard_normal(40))
    cfg = SamplerConfig(n_iter=300, n_burn=100, seed=3)
    first = mwg_sample_shared(spec, samples, cfg)
    second = mwg_sample_shared(spec, samples, cfg)
    assert first.draws.shape == (200, spec.n_params)
    assert first.names == spec.parameter_names()
    assert first.accept_rate >= 0.01
    np.testing.assert_array_equal(first.draws, second.draws)
    assert abs(first.column("mu").mean() - 1.5) < 1.0


def test_mwg_shared_stuck_chain_raises(monkeypatch):
    """Test a chain whose scalar acceptance falls below the floor raises SamplerError"""
    monkeypatch.setattr(shared_sampler, "MIN_SCALAR_ACCEPT", 1.01)
    spec = SharedProcessSpec.default(knots_per_axis=4, grid_size=9)
    rng = np.random.default_rng(15)
    locations = rng.random((30, 2))
    samples = SampleSet(locations=locations, z=locations[:, 1] + 0.3 * rng.standard_normal(30))
    with pytest.raises(SamplerError, match="stuck"):
        mwg_sample_shared(spec, samples, SamplerConfig(n_iter=120, n_burn=60, seed=5))
