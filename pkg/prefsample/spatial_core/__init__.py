from .geometry import Point2, RectDomain, RegularGrid, as_points
from .covariance import CovSpec, GPRealization, sq_exp_cov, build_cov_matrix, simulate_gp
from .basis import BasisSet, bisquare, build_basis_set, evaluate_basis_matrix
