"""
Error types for prefsample.

Everything derives from ValueError so callers that only know about
ValueError keep working; the subclasses let the experiment runner tell
retryable simulation failures apart from configuration mistakes.
"""


class PrefSampleError(ValueError):
    """Root of all prefsample errors"""


class DegenerateCovarianceError(PrefSampleError):
    """Cholesky factorization failed even after jitter escalation"""


class SamplingError(PrefSampleError):
    """A simulated sample is too small to be used; draw again with another seed"""


class IntensityBoundError(PrefSampleError):
    """The dominating rate of a thinning sampler was exceeded by the intensity"""


class WeightError(PrefSampleError):
    """Weights cannot be built for the requested mode"""


class RankDeficiencyError(PrefSampleError):
    """A regression design matrix is rank deficient"""


class NonFiniteDensityError(PrefSampleError):
    """A log density evaluated to a non-finite value"""


class SamplerError(PrefSampleError):
    """An MCMC chain failed its health checks"""


class ConfigError(PrefSampleError):
    """Invalid experiment configuration"""


class DataFormatError(PrefSampleError):
    """Malformed input data file"""

    def __init__(self, message: str, line_number: int = None):
        super().__init__(message)
        self.line_number = line_number
