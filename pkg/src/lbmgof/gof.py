"""Goodness-of-fit test for the cluster numbers of a latent block model.

For a hypothesis (K0, H0): estimate a block structure, standardize every
block by its own mean and standard deviation, and compare the scaled
largest eigenvalue of Zhat^T Zhat with the TW1 upper quantile.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable

from .coclustering import ward_cocluster
from .errors import DegenerateBlock, Inapplicable, InvalidParams, LBMError
from .estimation import estimate
from .model import ObservedMatrix, SelectionStep, SelectionTrace, TestResult
from .spectral import SpectralConfig, max_eigenvalue, scaling_constants
from .tracy_widom import tw1_upper_quantile

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TestConfig:
    alpha: float = 0.01
    L_max: int = 12
    clustering: Callable = ward_cocluster
    spectral: SpectralConfig = field(default_factory=SpectralConfig)

    __test__ = False

    def __post_init__(self):
        if not 0.0001 < self.alpha <= 0.5:
            raise InvalidParams(f"alpha must lie in (0.0001, 0.5], got {self.alpha}")
        if self.L_max < 2:
            raise InvalidParams(f"L_max must be at least 2, got {self.L_max}")


def test_statistic(matrix, structure, spectral=None):
    """Return ``(T, lambda1_hat, scaling)`` for a fixed block structure."""
    est = estimate(matrix, structure)
    lam = max_eigenvalue(est.normalized, spectral)
    n, p = est.normalized.shape
    scaling = scaling_constants(n, p)
    return (lam - scaling.a) / scaling.b, lam, scaling


test_statistic.__test__ = False


def decide(T, lam, scaling, alpha):
    quantile = tw1_upper_quantile(alpha)
    return TestResult(
        lambda1_hat=float(lam),
        scaling=scaling,
        statistic_T=float(T),
        alpha=float(alpha),
        quantile=float(quantile),
        reject=bool(T >= quantile),
    )


def gof_test(matrix, K0, H0, cfg=None):
    """Test (K, H) = (K0, H0) against K > K0 or H > H0.

    Raises Inapplicable when an estimated block has zero variance.
    """
    cfg = cfg or TestConfig()
    if not isinstance(matrix, ObservedMatrix):
        matrix = ObservedMatrix(matrix)
    structure = cfg.clustering(matrix, K0, H0)
    try:
        T, lam, scaling = test_statistic(matrix, structure, cfg.spectral)
    except DegenerateBlock as exc:
        raise Inapplicable(exc) from exc
    return decide(T, lam, scaling, cfg.alpha)


def scan_order(L_max):
    """Hypotheses in test order: by K0 + H0, then by increasing K0."""
    for level in range(2, L_max + 1):
        for K0 in range(1, level):
            yield K0, level - K0


def sequential_select(matrix, cfg=None):
    """Select (K, H) as the first hypothesis in scan order that is not rejected.

    Failed steps (e.g. an inapplicable test) count as rejections and are
    kept in the trace with their error message.
    """
    cfg = cfg or TestConfig()
    if not isinstance(matrix, ObservedMatrix):
        matrix = ObservedMatrix(matrix)
    if cfg.L_max > min(matrix.n, matrix.p) + 1:
        raise InvalidParams(
            f"L_max={cfg.L_max} exceeds min(n, p) + 1 = {min(matrix.n, matrix.p) + 1}"
        )
    steps = []
    for K0, H0 in scan_order(cfg.L_max):
        try:
            result = gof_test(matrix, K0, H0, cfg)
        except LBMError as exc:
            log.debug("(%d, %d): %s", K0, H0, exc)
            steps.append(SelectionStep(K0, H0, None, f"{type(exc).__name__}: {exc}"))
            continue
        steps.append(SelectionStep(K0, H0, result))
        log.debug("(%d, %d): T=%.4g reject=%s", K0, H0, result.statistic_T, result.reject)
        if not result.reject:
            return SelectionTrace(tuple(steps), (K0, H0), False)
    return SelectionTrace(tuple(steps), None, True)
