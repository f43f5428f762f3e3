from .posterior import SamplerConfig, PosteriorDraws, PosteriorSummary, PredictionSurface
from .hmc import hmc_sample
from .shared_sampler import mwg_sample_shared
from .diagnostics import ess, summarize
from .prediction import predict_surface
