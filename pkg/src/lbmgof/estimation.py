"""Block-wise mean/std estimates and the block-standardized residual matrix."""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBlock
from .model import BlockParams, BlockStructure, NormalizedMatrix, ObservedMatrix

DEGENERATE_STD = 1e-12


@dataclass(frozen=True, eq=False)
class EstimationResult:
    params: BlockParams
    fitted_mean: np.ndarray
    fitted_std: np.ndarray
    normalized: NormalizedMatrix


def _block_slices(labels, count):
    order = np.argsort(labels, kind="stable")
    bounds = np.concatenate([[0], np.cumsum(np.bincount(labels, minlength=count))])
    return order, [slice(bounds[c], bounds[c + 1]) for c in range(count)]


def block_moments(data, structure):
    """Population mean and RMS deviation of every block.

    The mean is refined with a second pass over the residuals, and the
    deviation is accumulated around the refined mean, which keeps the
    standardized blocks at zero mean and unit RMS to ~1e-13.
    """
    row_order, row_slices = _block_slices(structure.row_labels, structure.K)
    col_order, col_slices = _block_slices(structure.col_labels, structure.H)
    grouped = data[row_order][:, col_order]
    means = np.empty((structure.K, structure.H))
    stds = np.empty((structure.K, structure.H))
    for k, rs in enumerate(row_slices):
        for h, cs in enumerate(col_slices):
            block = grouped[rs, cs]
            count = block.size
            mean = block.sum() / count
            mean += (block - mean).sum() / count
            means[k, h] = mean
            stds[k, h] = np.sqrt(np.square(block - mean).sum() / count)
    return means, stds


def estimate(matrix, structure):
    """Estimate block parameters for ``structure`` and standardize ``matrix``.

    Raises DegenerateBlock (1-based block indices) for the first block whose
    estimated standard deviation is below ``DEGENERATE_STD``.
    """
    data = matrix.data if isinstance(matrix, ObservedMatrix) else np.asarray(matrix, dtype=float)
    structure.check_shape(*data.shape)
    means, stds = block_moments(data, structure)
    low = np.argwhere(stds < DEGENERATE_STD)
    if low.size:
        k, h = low[0]
        raise DegenerateBlock(int(k) + 1, int(h) + 1, float(stds[k, h]))
    rows, cols = structure.row_labels[:, None], structure.col_labels[None, :]
    fitted_mean = means[rows, cols]
    fitted_std = stds[rows, cols]
    z = (data - fitted_mean) / fitted_std
    for arr in (fitted_mean, fitted_std):
        arr.setflags(write=False)
    return EstimationResult(
        params=BlockParams(means, stds),
        fitted_mean=fitted_mean,
        fitted_std=fitted_std,
        normalized=NormalizedMatrix(z, structure),
    )
