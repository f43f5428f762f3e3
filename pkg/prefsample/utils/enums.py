from enum import Enum


class Scenario_tags(Enum):
    SCENARIO1 = "Scenario1"  # spatially implicit: thinned uniform candidates
    SCENARIO2 = "Scenario2"  # spatially explicit: GP intensity, Poisson sampling
    EXTERNAL = "External"    # user-supplied data, no known selection probabilities


class Model_tags(Enum):
    UW = "UW"    # unweighted
    PEW = "PEW"  # pseudo-likelihood, KDE-estimated weights
    PKW = "PKW"  # pseudo-likelihood, known weights
    PRD = "PRD"  # shared latent process (point process + response)
    WCR = "WCR"  # weight-covariate regression

    @property
    def is_pseudo_likelihood(self) -> bool:
        return self in (Model_tags.UW, Model_tags.PEW, Model_tags.PKW)


class Weight_modes(Enum):
    UNIT = "Unit"
    KNOWN = "Known"
    KDE = "KDE"


class Noise_interpretations(Enum):
    VARIANCE = "variance"
    SD = "sd"


class Response_transforms(Enum):
    NONE = "none"
    LOG = "log"


# pseudo-likelihood model tag -> weight mode used to build its weights
MODEL_WEIGHT_MODES = {
    Model_tags.UW: Weight_modes.UNIT,
    Model_tags.PEW: Weight_modes.KDE,
    Model_tags.PKW: Weight_modes.KNOWN,
}


class Mean_structures(Enum):
    LINEAR = "linear"  # z = s'beta, Scenario1
    BASIS = "basis"    # z = Phi(s) eta, Scenario2 and external data
