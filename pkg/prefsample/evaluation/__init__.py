from .reports import ModelReport, ReplicationReport, ModelAggregate, AggregateReport
from .metrics import surface_mse, mean_abs_bias, coverage_and_width, runtime_ratio, aggregate, mse_ordering_holds
