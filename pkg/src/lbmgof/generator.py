"""Synthetic latent block model data.

Randomness: every draw uses numpy's PCG64 seeded through ``SeedSequence``.
``GeneratorSpec.seed`` is the entropy; the assignment vectors for attempt
``r`` come from spawn key ``(0, r)`` and the entries from spawn key ``(1,)``,
so a redraw after an empty cluster never disturbs the entry stream's seed.
Experiments derive one seed per trial with :func:`trial_seed`.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidParams
from .model import BlockParams, BlockStructure, ObservedMatrix


class Family(str, Enum):
    GAUSSIAN = "gaussian"
    BERNOULLI = "bernoulli"
    POISSON = "poisson"


# Block means/stds of the (K, H) = (4, 3) synthetic models
PRESET_MEANS = np.array(
    [
        [0.9, 0.1, 0.4],
        [0.2, 0.7, 0.3],
        [0.3, 0.2, 0.8],
        [0.6, 0.9, 0.1],
    ]
)
PRESET_STDS = np.array(
    [
        [0.08, 0.06, 0.15],
        [0.14, 0.12, 0.07],
        [0.09, 0.1, 0.11],
        [0.16, 0.13, 0.05],
    ]
)
PRESET_POISSON_MEANS = 10.0 * PRESET_MEANS

INTERPOLATION_CENTER = {Family.GAUSSIAN: 0.5, Family.BERNOULLI: 0.5, Family.POISSON: 5.0}


def preset_params(family):
    """The 4x3 preset for ``family`` (std field unused for Bernoulli/Poisson)."""
    family = Family(family)
    if family is Family.GAUSSIAN:
        return BlockParams(PRESET_MEANS, PRESET_STDS)
    if family is Family.BERNOULLI:
        means = PRESET_MEANS
        return BlockParams(means, np.sqrt(means * (1 - means)))
    return BlockParams(PRESET_POISSON_MEANS, np.sqrt(PRESET_POISSON_MEANS))


def interpolate_means(base, t, center):
    """Shrink the block means towards ``center`` by a factor 1 - t/10."""
    if int(t) != t or not 0 <= t <= 9:
        raise InvalidParams(f"t must be an integer in 0..9, got {t}")
    if t == 0:
        return base
    shrink = 1.0 - t / 10.0
    return BlockParams(shrink * (base.means - center) + center, base.stds)


@dataclass(frozen=True)
class GeneratorSpec:
    family: Family
    params: BlockParams
    n: int
    p: int
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        means, stds = self.params.means, self.params.stds
        if self.n < 1 or self.p < 1:
            raise InvalidParams("n and p must be positive")
        if not 0 <= self.seed < 2**64:
            raise InvalidParams("seed must be an unsigned 64-bit integer")
        if not np.isfinite(means).all():
            raise InvalidParams("block means must be finite")
        if self.family is Family.BERNOULLI and ((means < 0) | (means > 1)).any():
            raise InvalidParams("Bernoulli block means must lie in [0, 1]")
        if self.family is Family.POISSON and (means < 0).any():
            raise InvalidParams("Poisson block means must be non-negative")
        if self.family is Family.GAUSSIAN and not (stds > 0).all():
            raise InvalidParams("Gaussian block stds must be strictly positive")
        K, H = means.shape
        if K > self.n or H > self.p:
            raise InvalidParams(f"cannot fill {K}x{H} blocks in a {self.n}x{self.p} matrix")


def trial_seed(base_seed, *key):
    """Independent 64-bit seed for the trial identified by ``key``."""
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _rng(seed, *key):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=key)))


def _draw_labels(seed, n, p, K, H):
    attempt = 0
    while True:
        rng = _rng(seed, 0, attempt)
        rows = rng.integers(0, K, size=n)
        cols = rng.integers(0, H, size=p)
        if np.bincount(rows, minlength=K).all() and np.bincount(cols, minlength=H).all():
            return rows, cols
        attempt += 1


def generate(spec):
    """Draw (ObservedMatrix, true BlockStructure) for ``spec``."""
    K, H = spec.params.shape
    rows, cols = _draw_labels(spec.seed, spec.n, spec.p, K, H)
    mean = spec.params.means[rows[:, None], cols[None, :]]
    rng = _rng(spec.seed, 1)
    if spec.family is Family.GAUSSIAN:
        std = spec.params.stds[rows[:, None], cols[None, :]]
        data = mean + std * rng.standard_normal(mean.shape)
    elif spec.family is Family.BERNOULLI:
        data = (rng.random(mean.shape) < mean).astype(np.float64)
    else:
        data = rng.poisson(mean).astype(np.float64)
    return ObservedMatrix(data), BlockStructure(rows, cols, K, H)
