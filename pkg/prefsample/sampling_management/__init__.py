from .sample_set import SampleSet, TruthSurface
from .point_process import inhomogeneous_ppp
from .scenarios import selection_prob_scn1, simulate_scenario1, simulate_scenario2
