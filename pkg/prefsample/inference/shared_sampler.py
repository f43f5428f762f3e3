"""
Metropolis-within-Gibbs sampler for the shared latent process model.

Each sweep updates the knot coefficients gamma with one elliptical slice move
under their N(0, sigma_gamma^2 I) prior, then every scalar parameter with a
random-walk Metropolis step whose scale is tuned during burn-in.
"""
from typing import Tuple

import numpy as np

from prefsample.inference.posterior import PosteriorDraws, SamplerConfig
from prefsample.models.shared_process import (SharedParams, SharedProcessModel, SharedProcessSpec,
                                              gamma_prior_term, point_process_term, response_term,
                                              scalar_prior_term)
from prefsample.sampling_management.sample_set import SampleSet
from prefsample.utils.errors import SamplerError
from prefsample.utils.logger import get_logger
from prefsample.utils.seed_management import get_generator

TARGET_SCALAR_ACCEPT = 0.44
ADAPT_BATCH = 50
MAX_SLICE_SHRINKS = 100
MIN_SCALAR_ACCEPT = 0.01
INITIAL_RW_SCALE = 0.1


class _SharedState:
    """Current parameters plus the cached latent field at observations and grid cells"""

    def __init__(self, model: SharedProcessModel, theta: np.ndarray):
        self.model = model
        self.params = SharedParams.unpack(model.spec, theta)
        self.y_obs = model.k_obs @ self.params.gamma
        self.y_grid = model.k_grid @ self.params.gamma

    def theta(self) -> np.ndarray:
        return self.params.pack()

    def response_mean(self, params: SharedParams, y_obs: np.ndarray) -> np.ndarray:
        return params.mu + self.model.x_obs @ params.b + params.beta * y_obs

    def log_likelihood(self, params: SharedParams, y_obs: np.ndarray, y_grid: np.ndarray) -> float:
        """Point-process plus response terms; -inf on overflow"""
        with np.errstate(over="ignore", invalid="ignore"):
            value = (point_process_term(params.alpha, y_obs, y_grid, self.model.spec.fit_grid.cell_area)
                     + response_term(self.model.samples.z, self.response_mean(params, y_obs), params.log_sigma_z))
        return value if np.isfinite(value) else -np.inf

    def log_scalar_conditional(self, params: SharedParams) -> float:
        value = (self.log_likelihood(params, self.y_obs, self.y_grid)
                 + scalar_prior_term(self.model.spec, params)
                 + gamma_prior_term(params.gamma, params.log_sigma_gamma))
        return value if np.isfinite(value) else -np.inf


def _elliptical_slice(state: _SharedState, rng: np.random.Generator) -> int:
    """One elliptical slice move on gamma. Returns the number of bracket shrinks."""
    p = state.params
    sigma_gamma = np.exp(p.log_sigma_gamma)
    nu = sigma_gamma * rng.standard_normal(p.gamma.shape[0])
    nu_obs = state.model.k_obs @ nu
    nu_grid = state.model.k_grid @ nu

    current = state.log_likelihood(p, state.y_obs, state.y_grid)
    log_y = current + np.log(rng.random())
    angle = rng.uniform(0.0, 2.0 * np.pi)
    lo, hi = angle - 2.0 * np.pi, angle
    for shrinks in range(MAX_SLICE_SHRINKS):
        c, s = np.cos(angle), np.sin(angle)
        y_obs = state.y_obs * c + nu_obs * s
        y_grid = state.y_grid * c + nu_grid * s
        if state.log_likelihood(p, y_obs, y_grid) > log_y:
            p.gamma = p.gamma * c + nu * s
            state.y_obs, state.y_grid = y_obs, y_grid
            return shrinks
        if angle < 0.0:
            lo = angle
        else:
            hi = angle
        angle = rng.uniform(lo, hi)
    # bracket collapsed onto the current state
    return MAX_SLICE_SHRINKS


def _scalar_fields(spec: SharedProcessSpec) -> Tuple[Tuple[str, int], ...]:
    """(attribute, index) of every scalar coordinate; index is -1 for plain floats"""
    fields = [("mu", -1)] + [("b", i) for i in range(spec.n_covariates)]
    return tuple(fields + [("beta", -1), ("alpha", -1), ("log_sigma_z", -1), ("log_sigma_gamma", -1)])


def _get(params: SharedParams, field: Tuple[str, int]) -> float:
    name, idx = field
    return float(getattr(params, name)[idx]) if idx >= 0 else float(getattr(params, name))


def _set(params: SharedParams, field: Tuple[str, int], value: float):
    name, idx = field
    if idx >= 0:
        getattr(params, name)[idx] = value
    else:
        setattr(params, name, value)


def mwg_sample_shared(spec: SharedProcessSpec, samples: SampleSet, cfg: SamplerConfig) -> PosteriorDraws:
    """
    Run the shared-process chain.

    Random-walk scales adapt per batch of 50 burn-in sweeps: the log scale moves
    by min(0.1, 1/sqrt(batch)) up when batch acceptance is above 0.44, down otherwise.

    :raises SamplerError: when the mean scalar acceptance after burn-in is below 0.01
    """
    logger = get_logger()
    rng = get_generator(cfg.seed)
    model = SharedProcessModel(spec, samples)
    state = _SharedState(model, model.initial_point())
    fields = _scalar_fields(spec)
    log_scales = np.full(len(fields), np.log(INITIAL_RW_SCALE))
    batch_accepts = np.zeros(len(fields))

    current = state.log_scalar_conditional(state.params)
    if not np.isfinite(current):
        raise SamplerError("Shared-process log posterior is not finite at the initial point")

    kept = np.empty((cfg.n_keep, spec.n_params))
    accepted_after_burn = 0
    slice_shrinks = 0
    for it in range(cfg.n_iter):
        slice_shrinks += _elliptical_slice(state, rng)
        current = state.log_scalar_conditional(state.params)

        for f, field in enumerate(fields):
            old = _get(state.params, field)
            _set(state.params, field, old + np.exp(log_scales[f]) * rng.standard_normal())
            proposed = state.log_scalar_conditional(state.params)
            if np.log(rng.random()) < proposed - current:
                current = proposed
                batch_accepts[f] += 1
                if it >= cfg.n_burn:
                    accepted_after_burn += 1
            else:
                _set(state.params, field, old)

        if it < cfg.n_burn and (it + 1) % ADAPT_BATCH == 0:
            batch = (it + 1) // ADAPT_BATCH
            delta = min(0.1, 1.0 / np.sqrt(batch))
            rates = batch_accepts / ADAPT_BATCH
            log_scales += np.where(rates > TARGET_SCALAR_ACCEPT, delta, -delta)
            batch_accepts[:] = 0.0
            if logger.is_debug():
                logger.debug(f"mwg_sample_shared: batch {batch}, scalar accept {np.round(rates, 2)}")
        if it >= cfg.n_burn:
            kept[it - cfg.n_burn] = state.theta()

    accept_rate = accepted_after_burn / (cfg.n_keep * len(fields))
    if accept_rate < MIN_SCALAR_ACCEPT:
        raise SamplerError(f"Shared-process chain is stuck: scalar acceptance {accept_rate:.4f} after burn-in")
    logger.debug(f"mwg_sample_shared: seed={cfg.seed}, scalar accept={accept_rate:.3f}, "
                 f"mean slice shrinks={slice_shrinks / cfg.n_iter:.2f}")
    return PosteriorDraws(names=spec.parameter_names(), draws=kept, accept_rate=accept_rate, seed=cfg.seed)
