"""Block-structure estimation by Ward clustering of rows and of columns.

Rows of A are clustered as vectors in R^p and columns as vectors in R^n,
independently. Any function with the signature of :func:`ward_cocluster`
(``(matrix, K0, H0) -> BlockStructure``) can be passed to the test as
the clustering step.
"""

from itertools import permutations
from typing import Callable, NamedTuple

import numpy as np

from .errors import DimensionMismatch, TooManyClusters, TooManyClustersForExhaustiveAlignment
from .model import BlockStructure, ObservedMatrix

Clusterer = Callable[[ObservedMatrix, int, int], BlockStructure]

MAX_ALIGN_CLUSTERS = 8


def _squared_distances(X):
    X = X - X.mean(axis=0)
    sq = np.einsum("ij,ij->i", X, X)
    D = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(D, 0.0, out=D)
    np.fill_diagonal(D, np.inf)
    return D


def ward_labels(X, n_clusters):
    """Cut Ward's dendrogram of the rows of ``X`` at ``n_clusters`` clusters.

    Greedy agglomeration on squared Euclidean distances with the
    Lance-Williams update. Each cluster lives in the slot of its smallest
    original member, and among equal-cost merges the pair with the
    lexicographically smallest (low, high) slot pair wins. Returns 0-based
    labels numbered by the smallest member of each cluster.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if not 1 <= n_clusters <= n:
        raise TooManyClusters(f"cannot form {n_clusters} clusters from {n} points")
    if n_clusters == 1:
        return np.zeros(n, dtype=np.int64)
    if n_clusters == n:
        return np.arange(n, dtype=np.int64)

    D = _squared_distances(X)
    size = np.ones(n)
    active = np.ones(n, dtype=bool)
    parent = np.arange(n)
    # argmin returns the first minimum: the smallest slot wins ties
    nn = np.argmin(D, axis=1)
    nnd = D[np.arange(n), nn]
    slots = np.arange(n)

    for _ in range(n - n_clusters):
        best = nnd.min()
        cand = np.flatnonzero(nnd == best)
        lo = np.minimum(cand, nn[cand])
        hi = np.maximum(cand, nn[cand])
        pick = np.lexsort((hi, lo))[0]
        a, b = int(lo[pick]), int(hi[pick])

        sa, sb, d_ab = size[a], size[b], D[a, b]
        others = active.copy()
        others[[a, b]] = False
        sk = size[others]
        new = ((sa + sk) * D[a, others] + (sb + sk) * D[b, others] - sk * d_ab) / (sa + sb + sk)
        D[a, others] = new
        D[others, a] = new
        D[b, :] = np.inf
        D[:, b] = np.inf
        size[a] = sa + sb
        active[b] = False
        nnd[b] = np.inf
        parent[b] = a

        stale = others & ((nn == a) | (nn == b))
        closer = others & ~stale & ((D[:, a] < nnd) | ((D[:, a] == nnd) & (a < nn)))
        nn[closer] = a
        nnd[closer] = D[closer, a]
        stale[a] = True
        redo = slots[stale]
        sub = D[redo]
        nn[redo] = np.argmin(sub, axis=1)
        nnd[redo] = sub[np.arange(redo.size), nn[redo]]

    # resolve each point to its surviving slot
    root = parent.copy()
    while True:
        nxt = root[root]
        if np.array_equal(nxt, root):
            break
        root = nxt
    _, labels = np.unique(root, return_inverse=True)
    return labels.astype(np.int64)


def ward_cocluster(matrix, K0, H0):
    """Estimate a (K0, H0) block structure with Ward clustering on each axis."""
    data = matrix.data if isinstance(matrix, ObservedMatrix) else np.asarray(matrix, dtype=float)
    n, p = data.shape
    if K0 < 1 or H0 < 1 or K0 > n or H0 > p:
        raise TooManyClusters(f"(K0, H0) = ({K0}, {H0}) not possible for a {n}x{p} matrix")
    return BlockStructure(ward_labels(data, K0), ward_labels(data.T, H0), K0, H0)


class Alignment(NamedTuple):
    row_perm: tuple
    col_perm: tuple
    row_agreement: float
    col_agreement: float
    agreement: float

    @property
    def exact(self):
        return self.agreement == 1.0


def _best_permutation(est, truth, count):
    table = np.zeros((count, count), dtype=np.int64)
    np.add.at(table, (est, truth), 1)
    perms = np.array(list(permutations(range(count))))
    scores = table[np.arange(count), perms].sum(axis=1)
    best = int(np.argmax(scores))
    return tuple(int(v) for v in perms[best]), int(scores[best])


def align_labels(estimated, truth):
    """Best relabelling of ``estimated`` onto ``truth`` by exhaustive search.

    ``row_perm[k]`` is the 0-based truth label matched to estimated row
    cluster k (likewise for columns). ``agreement`` is the fraction of all
    n + p rows and columns whose matched labels agree.
    """
    if (estimated.n, estimated.p) != (truth.n, truth.p):
        raise DimensionMismatch("structures describe matrices of different shapes")
    if (estimated.K, estimated.H) != (truth.K, truth.H):
        raise DimensionMismatch("structures have different cluster counts")
    if max(truth.K, truth.H) > MAX_ALIGN_CLUSTERS:
        raise TooManyClustersForExhaustiveAlignment(
            f"exhaustive alignment supports at most {MAX_ALIGN_CLUSTERS} clusters per axis"
        )
    row_perm, row_hits = _best_permutation(estimated.row_labels, truth.row_labels, truth.K)
    col_perm, col_hits = _best_permutation(estimated.col_labels, truth.col_labels, truth.H)
    return Alignment(
        row_perm,
        col_perm,
        row_hits / truth.n,
        col_hits / truth.p,
        (row_hits + col_hits) / (truth.n + truth.p),
    )
