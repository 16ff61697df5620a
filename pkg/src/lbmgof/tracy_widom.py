"""Tracy-Widom (beta = 1) distribution function and upper quantiles.

Values come from a tabulated CDF (``data/tw1_table.csv``, built by
:mod:`lbmgof.tw_reference`) interpolated with a shape-preserving cubic,
so the CDF is exactly monotone. Outside the table the CDF is clamped to
0 or 1. A different table in the same two-column CSV layout can be
loaded with :meth:`TW1Table.from_csv`.
"""

from functools import lru_cache
from importlib import resources

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import AlphaOutOfRange

ALPHA_MIN = 0.0001
ALPHA_MAX = 0.9999


class TW1Table:
    """Tabulated TW1 CDF on a strictly increasing grid."""

    def __init__(self, grid, cdf_values):
        grid = np.asarray(grid, dtype=float)
        cdf_values = np.asarray(cdf_values, dtype=float)
        if grid.ndim != 1 or grid.shape != cdf_values.shape or grid.size < 4:
            raise ValueError("grid and cdf_values must be 1-D arrays of equal length >= 4")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(np.diff(cdf_values) < 0):
            raise ValueError("cdf values must be nondecreasing")
        if cdf_values[0] < 0 or cdf_values[-1] > 1:
            raise ValueError("cdf values must lie in [0, 1]")
        self.grid = grid
        self.cdf_values = cdf_values
        self._interp = PchipInterpolator(grid, cdf_values, extrapolate=False)

    @classmethod
    def from_csv(cls, path):
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        return cls(data[:, 0], data[:, 1])

    def cdf(self, s):
        s = np.asarray(s, dtype=float)
        out = self._interp(np.clip(s, self.grid[0], self.grid[-1]))
        out = np.where(s < self.grid[0], 0.0, np.where(s > self.grid[-1], 1.0, out))
        out = np.clip(out, 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    def upper_quantile(self, alpha):
        """Return t with F1(t) = 1 - alpha."""
        alpha = float(alpha)
        if not ALPHA_MIN < alpha < ALPHA_MAX:
            raise AlphaOutOfRange(f"alpha must lie in ({ALPHA_MIN}, {ALPHA_MAX}), got {alpha}")
        return self.ppf(1.0 - alpha)

    def ppf(self, target):
        """Inverse CDF for a level strictly inside the tabulated range."""
        target = float(target)
        if not self.cdf_values[0] < target < self.cdf_values[-1]:
            raise ValueError(f"level {target} outside the tabulated CDF range")
        k = int(np.searchsorted(self.cdf_values, target))
        lo, hi = self.grid[max(k - 1, 0)], self.grid[min(k, self.grid.size - 1)]
        if lo == hi:
            return float(lo)
        return float(brentq(lambda s: float(self._interp(s)) - target, lo, hi, xtol=1e-13, rtol=1e-15))


@lru_cache(maxsize=1)
def default_table():
    with resources.files("lbmgof").joinpath("data/tw1_table.csv").open("r") as fh:
        data = np.loadtxt(fh, delimiter=",", comments="#", ndmin=2)
    return TW1Table(data[:, 0], data[:, 1])


def tw1_cdf(s, table=None):
    return (table or default_table()).cdf(s)


def tw1_upper_quantile(alpha, table=None):
    return (table or default_table()).upper_quantile(alpha)
