"""Domain types shared by every stage of the test.

All types are immutable after construction: array fields are copied and
marked read-only, so values can be shared freely between workers.

Cluster labels are stored 0-based internally (``row_labels``) and are
exposed 1-based in every external format (``row_assign``).
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateShape, InvalidStructure, NonFiniteEntry


def _frozen(array, dtype):
    out = np.array(array, dtype=dtype, copy=True, order="C")
    out.setflags(write=False)
    return out


def validate(matrix):
    """Check that ``matrix`` is a finite real matrix of shape at least 2x2.

    Accepts an :class:`ObservedMatrix` or anything convertible to a 2-D
    float array. Raises :class:`DegenerateShape` or :class:`NonFiniteEntry`
    (with the 1-based position of the first offending entry).
    """
    data = matrix.data if isinstance(matrix, ObservedMatrix) else np.asarray(matrix, dtype=float)
    if data.ndim != 2:
        raise DegenerateShape(*(tuple(data.shape) + (1, 1))[:2])
    n, p = data.shape
    if n < 2 or p < 2:
        raise DegenerateShape(n, p)
    bad = ~np.isfinite(data)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise NonFiniteEntry(int(i) + 1, int(j) + 1)


@dataclass(frozen=True, eq=False)
class ObservedMatrix:
    """Dense n x p data matrix."""

    data: np.ndarray

    def __post_init__(self):
        data = _frozen(self.data, np.float64)
        validate(data)
        object.__setattr__(self, "data", data)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def __eq__(self, other):
        return isinstance(other, ObservedMatrix) and np.array_equal(self.data, other.data)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BlockStructure:
    """Row and column cluster assignments with cluster counts (K, H)."""

    row_labels: np.ndarray
    col_labels: np.ndarray
    K: int
    H: int

    def __post_init__(self):
        rows = _frozen(self.row_labels, np.int64)
        cols = _frozen(self.col_labels, np.int64)
        if rows.ndim != 1 or cols.ndim != 1:
            raise InvalidStructure("assignment vectors must be one-dimensional")
        K, H = int(self.K), int(self.H)
        if K < 1 or H < 1:
            raise InvalidStructure(f"cluster counts must be positive, got K={K}, H={H}")
        for name, labels, count in (("row", rows, K), ("column", cols, H)):
            if labels.size == 0:
                raise InvalidStructure(f"empty {name} assignment")
            if labels.min() < 0 or labels.max() >= count:
                raise InvalidStructure(f"{name} labels outside 1..{count}")
            sizes = np.bincount(labels, minlength=count)
            if (sizes == 0).any():
                missing = [int(c) + 1 for c in np.flatnonzero(sizes == 0)]
                raise InvalidStructure(f"empty {name} clusters: {missing}")
        object.__setattr__(self, "row_labels", rows)
        object.__setattr__(self, "col_labels", cols)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "H", H)

    @classmethod
    def from_assign(cls, row_assign, col_assign, K=None, H=None):
        """Build from 1-based assignment vectors (counts default to the max label)."""
        rows = np.asarray(row_assign, dtype=np.int64) - 1
        cols = np.asarray(col_assign, dtype=np.int64) - 1
        K = int(rows.max()) + 1 if K is None else K
        H = int(cols.max()) + 1 if H is None else H
        return cls(rows, cols, K, H)

    @property
    def row_assign(self):
        return self.row_labels + 1

    @property
    def col_assign(self):
        return self.col_labels + 1

    @property
    def n(self) -> int:
        return self.row_labels.size

    @property
    def p(self) -> int:
        return self.col_labels.size

    def row_sizes(self):
        return np.bincount(self.row_labels, minlength=self.K)

    def col_sizes(self):
        return np.bincount(self.col_labels, minlength=self.H)

    def check_shape(self, n, p):
        if (self.n, self.p) != (n, p):
            raise InvalidStructure(
                f"structure is for a {self.n}x{self.p} matrix, got {n}x{p}"
            )

    def permuted(self, row_perm=None, col_perm=None):
        """Structure of the matrix ``A[row_perm][:, col_perm]``."""
        rows = self.row_labels if row_perm is None else self.row_labels[row_perm]
        cols = self.col_labels if col_perm is None else self.col_labels[col_perm]
        return BlockStructure(rows, cols, self.K, self.H)

    def to_dict(self):
        return {
            "row_assign": self.row_assign.tolist(),
            "col_assign": self.col_assign.tolist(),
            "K": self.K,
            "H": self.H,
        }

    @classmethod
    def from_dict(cls, record):
        return cls.from_assign(record["row_assign"], record["col_assign"], record["K"], record["H"])

    def __eq__(self, other):
        return (
            isinstance(other, BlockStructure)
            and (self.K, self.H) == (other.K, other.H)
            and np.array_equal(self.row_labels, other.row_labels)
            and np.array_equal(self.col_labels, other.col_labels)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BlockParams:
    """K x H block means (B) and standard deviations (S)."""

    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        means = _frozen(self.means, np.float64)
        stds = _frozen(self.stds, np.float64)
        if means.ndim != 2 or means.shape != stds.shape:
            raise InvalidStructure(
                f"means and stds must be matching K x H matrices, got {means.shape} and {stds.shape}"
            )
        if (stds < 0).any():
            raise InvalidStructure("block standard deviations must be non-negative")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "stds", stds)

    @property
    def shape(self):
        return self.means.shape

    def to_dict(self):
        return {"means": self.means.tolist(), "stds": self.stds.tolist()}

    @classmethod
    def from_dict(cls, record):
        return cls(np.asarray(record["means"], float), np.asarray(record["stds"], float))

    def __eq__(self, other):
        return (
            isinstance(other, BlockParams)
            and np.array_equal(self.means, other.means)
            and np.array_equal(self.stds, other.stds)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class NormalizedMatrix:
    """Block-standardized residual matrix and the structure used to build it."""

    data: np.ndarray
    source_structure: Optional[BlockStructure] = None

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen(self.data, np.float64))

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True)
class ScalingConstants:
    a: float
    b: float


@dataclass(frozen=True)
class TestResult:
    lambda1_hat: float
    scaling: ScalingConstants
    statistic_T: float
    alpha: float
    quantile: float
    reject: bool

    __test__ = False  # not a pytest class

    def to_dict(self):
        return {
            "lambda1_hat": self.lambda1_hat,
            "scaling": {"a": self.scaling.a, "b": self.scaling.b},
            "statistic_T": self.statistic_T,
            "alpha": self.alpha,
            "quantile": self.quantile,
            "reject": self.reject,
        }

    @classmethod
    def from_dict(cls, record):
        return cls(
            lambda1_hat=float(record["lambda1_hat"]),
            scaling=ScalingConstants(float(record["scaling"]["a"]), float(record["scaling"]["b"])),
            statistic_T=float(record["statistic_T"]),
            alpha=float(record["alpha"]),
            quantile=float(record["quantile"]),
            reject=bool(record["reject"]),
        )


@dataclass(frozen=True)
class SelectionStep:
    """One tested hypothesis; ``result`` is None when the test was inapplicable."""

    K0: int
    H0: int
    result: Optional[TestResult] = None
    error: Optional[str] = None

    @property
    def accepted(self) -> bool:
        return self.result is not None and not self.result.reject

    def to_dict(self):
        return {
            "K0": self.K0,
            "H0": self.H0,
            "result": None if self.result is None else self.result.to_dict(),
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, record):
        result = record.get("result")
        return cls(
            K0=int(record["K0"]),
            H0=int(record["H0"]),
            result=None if result is None else TestResult.from_dict(result),
            error=record.get("error"),
        )


@dataclass(frozen=True)
class SelectionTrace:
    steps: tuple = field(default_factory=tuple)
    selected: Optional[tuple] = None
    exhausted: bool = False

    def to_dict(self):
        return {
            "steps": [step.to_dict() for step in self.steps],
            "selected": None if self.selected is None else list(self.selected),
            "exhausted": self.exhausted,
        }

    @classmethod
    def from_dict(cls, record):
        selected = record.get("selected")
        return cls(
            steps=tuple(SelectionStep.from_dict(s) for s in record["steps"]),
            selected=None if selected is None else tuple(int(v) for v in selected),
            exhausted=bool(record["exhausted"]),
        )
