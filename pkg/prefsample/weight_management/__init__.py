from .kde import KDEConfig, default_bandwidth, kde2d_density
from .weights import WeightVector, weights_from_mode
from .poststratification import StratifiedData, poststratified_mean, poststratify_samples
