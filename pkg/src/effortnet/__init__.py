"""Software effort estimation with Intermediate COCOMO, RBNN and GRNN."""

from .cocomo import (
    COST_DRIVER_TABLE,
    DRIVERS,
    CocomoInput,
    DevelopmentMode,
    Level,
    compute_eaf,
    estimate_effort,
    lookup_multiplier,
)
from .dataset import Dataset, Encoding, ProjectRecord, SplitPlan, load_dataset, save_dataset, split
from .grnn import FittedGrnn, fit_grnn, predict_grnn
from .metrics import EvaluationReport, evaluate
from .radial import RadialLayer, bias_from_spread, layer1_output, radbas
from .rbnn import FittedRbnn, fit_rbnn, predict_rbnn

__version__ = "0.1.0"
