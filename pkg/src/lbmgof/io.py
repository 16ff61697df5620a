"""Plain-text file formats: matrix CSV and assignment lists."""

import numpy as np

from .model import BlockStructure, ObservedMatrix


def read_matrix(path):
    """Read a header-less comma-separated matrix."""
    data = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    return ObservedMatrix(data)


def write_matrix(matrix, path):
    data = matrix.data if hasattr(matrix, "data") else np.asarray(matrix, float)
    # 17 significant digits: bit-exact round trip
    np.savetxt(path, data, delimiter=",", fmt="%.17g")


def read_assignments(path):
    """Read one 1-based integer cluster index per line."""
    with open(path, encoding="utf-8") as fh:
        return np.array([int(line) for line in fh if line.strip()], dtype=np.int64)


def write_assignments(assign, path):
    with open(path, "w", encoding="utf-8") as fh:
        for value in np.asarray(assign, dtype=np.int64):
            fh.write(f"{int(value)}\n")


def read_structure(row_path, col_path, K=None, H=None):
    return BlockStructure.from_assign(read_assignments(row_path), read_assignments(col_path), K, H)
