"""Goodness-of-fit test for the row/column cluster numbers of latent block models."""

__version__ = "0.1.0"

from .coclustering import align_labels, ward_cocluster, ward_labels  # noqa: E402
from .errors import *  # noqa: E402,F401,F403
from .estimation import EstimationResult, estimate  # noqa: E402
from .generator import Family, GeneratorSpec, generate, interpolate_means, preset_params  # noqa: E402
from .gof import TestConfig, gof_test, sequential_select, test_statistic  # noqa: E402
from .model import (  # noqa: E402
    BlockParams,
    BlockStructure,
    NormalizedMatrix,
    ObservedMatrix,
    ScalingConstants,
    SelectionStep,
    SelectionTrace,
    TestResult,
    validate,
)
from .spectral import SpectralConfig, max_eigenvalue, scaling_constants  # noqa: E402
from .tracy_widom import TW1Table, tw1_cdf, tw1_upper_quantile  # noqa: E402
