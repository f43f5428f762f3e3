from .pseudo_linear import PseudoLinearSpec, PseudoLinearModel, log_pseudo_posterior_linear
from .basis_spatial import BasisSpatialSpec, BasisSpatialModel, log_pseudo_posterior_basis
from .shared_process import SharedProcessSpec, SharedProcessModel, log_posterior_shared
from .closed_form import wls_solve, weighted_score, weight_covariate_fit, WeightCovariateModel
