"""
Builds and fits the comparison models by tag.

UW, PEW and PKW are pseudo-likelihood models whose mean structure follows the
scenario (linear trend in Scenario1, bisquare basis otherwise) and differ only
in their weights. PRD is the shared latent process model, WCR the
weight-covariate regression.
"""
import time
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from prefsample.inference.hmc import hmc_sample
from prefsample.inference.posterior import PosteriorDraws, SamplerConfig
from prefsample.inference.shared_sampler import mwg_sample_shared
from prefsample.models.basis_spatial import BasisSpatialModel, BasisSpatialSpec
from prefsample.models.closed_form import WeightCovariateModel
from prefsample.models.pseudo_linear import PseudoLinearModel, PseudoLinearSpec
from prefsample.models.shared_process import SharedProcessModel, SharedProcessSpec
from prefsample.sampling_management.sample_set import SampleSet
from prefsample.spatial_core.basis import build_basis_set
from prefsample.spatial_core.geometry import RectDomain
from prefsample.utils.enums import MODEL_WEIGHT_MODES, Mean_structures, Model_tags, Scenario_tags, Weight_modes
from prefsample.utils.errors import WeightError
from prefsample.utils.logger import get_logger
from prefsample.utils.singleton_management import SingletonManager
from prefsample.weight_management.weights import WeightVector, weights_from_mode

BASIS_DOMAIN_MARGIN = 0.1

FittedModel = Union[PseudoLinearModel, BasisSpatialModel, SharedProcessModel, WeightCovariateModel]


@dataclass
class ModelOptions:
    """
    Geometry knobs shared by the models of one experiment.

    :param domain: study region of the sample locations
    :param basis_resolutions: number of bisquare resolutions of the basis model
    :param shared_knots_per_axis: knot lattice size of the shared process model
    :param shared_grid_size: fit grid size of the shared process model
    :param wcr_intercept: include an intercept in the weight-covariate regression
    """
    domain: RectDomain = field(default_factory=RectDomain.unit_square)
    basis_resolutions: int = 2
    shared_knots_per_axis: int = 15
    shared_grid_size: int = 41
    wcr_intercept: bool = False


@dataclass
class ModelFit:
    """A fitted model with its draws in output coordinates and the wall-clock fit time"""
    tag: Model_tags
    model: FittedModel
    draws: PosteriorDraws
    runtime: float


def mean_structure_for(scenario: Scenario_tags) -> Mean_structures:
    return Mean_structures.LINEAR if scenario == Scenario_tags.SCENARIO1 else Mean_structures.BASIS


def model_weights(tag: Model_tags, samples: SampleSet) -> WeightVector:
    """Weights a model uses: its own mode for UW/PEW/PKW, KDE weights as the WCR covariate"""
    if tag.is_pseudo_likelihood:
        mode = MODEL_WEIGHT_MODES[tag]
        if mode == Weight_modes.KNOWN and not samples.has_p_true:
            raise WeightError(f"{tag.value} needs known selection probabilities; {samples} has none")
        return weights_from_mode(samples, mode)
    if tag == Model_tags.WCR:
        return weights_from_mode(samples, Weight_modes.KDE)
    return WeightVector.unit(samples.n)


def _basis_set(options: ModelOptions):
    domain = options.domain.expand(BASIS_DOMAIN_MARGIN)
    key = f"basis_set:{domain}:{options.basis_resolutions}"
    return SingletonManager.get_or_create(key, lambda: build_basis_set(domain, options.basis_resolutions))


def build_model(tag: Model_tags, samples: SampleSet, structure: Mean_structures,
                options: Optional[ModelOptions] = None) -> FittedModel:
    options = options or ModelOptions()
    if tag == Model_tags.PRD:
        spec = SharedProcessSpec.default(options.domain, covariates=structure == Mean_structures.LINEAR,
                                         knots_per_axis=options.shared_knots_per_axis,
                                         grid_size=options.shared_grid_size)
        return SharedProcessModel(spec, samples)
    weights = model_weights(tag, samples)
    if tag == Model_tags.WCR:
        return WeightCovariateModel(samples, weights, intercept=options.wcr_intercept)
    if structure == Mean_structures.LINEAR:
        return PseudoLinearModel(PseudoLinearSpec(weights=weights), samples)
    return BasisSpatialModel(BasisSpatialSpec(basis=_basis_set(options), weights=weights), samples)


def fit_model(tag: Model_tags, samples: SampleSet, structure: Mean_structures, cfg: SamplerConfig,
              options: Optional[ModelOptions] = None) -> ModelFit:
    """
    Build weights and model, then run its sampler. The runtime covers both.

    HMC for the pseudo-likelihood models, Metropolis-within-Gibbs for PRD and
    draws from the coefficient sampling distribution for WCR.
    """
    logger = get_logger()
    start = time.perf_counter()
    model = build_model(tag, samples, structure, options)
    if isinstance(model, SharedProcessModel):
        raw = mwg_sample_shared(model.spec, samples, cfg)
    elif isinstance(model, WeightCovariateModel):
        values = model.sample(cfg.n_keep, cfg.seed)
        raw = PosteriorDraws(names=model.parameter_names, draws=values, accept_rate=1.0, seed=cfg.seed)
    else:
        raw = hmc_sample(model.log_density, model.initial_point(), cfg, names=model.parameter_names)
    draws = PosteriorDraws(names=raw.names, draws=model.to_output(raw.draws), accept_rate=raw.accept_rate,
                           seed=raw.seed, step_size=raw.step_size, n_divergent=raw.n_divergent)
    runtime = time.perf_counter() - start
    logger.debug(f"fit_model: {tag.value} ({structure.value}) n={samples.n} accept={draws.accept_rate:.3f} "
                 f"in {runtime:.2f}s")
    return ModelFit(tag=tag, model=model, draws=draws, runtime=runtime)
