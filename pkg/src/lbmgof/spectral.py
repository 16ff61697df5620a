"""Largest eigenvalue of Z^T Z and the centering/scaling constants.

The leading singular value of Z is found by Golub-Kahan-Lanczos
bidiagonalization with full reorthogonalization; Z^T Z is never formed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence
from .model import NormalizedMatrix, ScalingConstants

START_SEED = 20190416


@dataclass(frozen=True)
class SpectralConfig:
    rel_tolerance: float = 1e-10
    max_iterations: int = 10000

    def __post_init__(self):
        if not self.rel_tolerance > 0:
            raise ValueError("rel_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


def scaling_constants(n, p):
    """Centering a and scale b for the largest eigenvalue of an n x p noise matrix."""
    if n < 1 or p < 1:
        raise ValueError("n and p must be positive")
    rn, rp = np.sqrt(n), np.sqrt(p)
    a = (rn + rp) ** 2
    b = (rn + rp) * (1.0 / rn + 1.0 / rp) ** (1.0 / 3.0)
    return ScalingConstants(float(a), float(b))


def _top_singular_triplet(B):
    # B is small and upper bidiagonal
    _, s, vt = np.linalg.svd(B)
    return s[0], vt[0]


def _lanczos_sigma(Z, v0, cfg):
    """Largest singular value of Z from one Lanczos run started at v0."""
    n, p = Z.shape
    kmax = min(n, p)
    V = np.empty((p, min(kmax, cfg.max_iterations) + 1))
    U = np.empty((n, min(kmax, cfg.max_iterations)))
    alphas, betas = [], []

    v = v0 / np.linalg.norm(v0)
    V[:, 0] = v
    u = Z @ v
    beta = 0.0
    prev = prev2 = None
    sigma, y = 0.0, np.ones(1)
    residual = np.inf
    scale = np.sqrt(np.einsum("ij,ij->", Z, Z))
    breakdown_tol = 1e-13 * max(scale, np.finfo(float).tiny)

    for k in range(min(kmax, cfg.max_iterations)):
        if k > 0:
            u = Z @ V[:, k] - beta * U[:, k - 1]
            u -= U[:, :k] @ (U[:, :k].T @ u)
        alpha = np.linalg.norm(u)
        if alpha <= breakdown_tol:
            # invariant subspace: the bidiagonal built so far (last diag = 0) is exact
            alphas.append(0.0)
            break
        U[:, k] = u / alpha
        alphas.append(alpha)

        w = Z.T @ U[:, k] - alpha * V[:, k]
        w -= V[:, : k + 1] @ (V[:, : k + 1].T @ w)
        beta = np.linalg.norm(w)

        B = np.diag(alphas) + np.diag(betas, 1)
        sigma, y = _top_singular_triplet(B)
        lam = sigma * sigma

        if beta <= breakdown_tol or k + 1 >= kmax:
            break
        betas.append(beta)
        V[:, k + 1] = w / beta

        if prev is not None and prev2 is not None and lam > 0:
            changes = abs(lam - prev) / lam, abs(prev - prev2) / lam
            if max(changes) < cfg.rel_tolerance:
                residual = _residual(Z, V[:, : k + 1] @ y, lam)
                if residual < np.sqrt(cfg.rel_tolerance):
                    return sigma
        prev2, prev = prev, lam
    else:
        residual = _residual(Z, V[:, : len(alphas)] @ y, sigma * sigma) if sigma > 0 else 0.0
        if residual >= np.sqrt(cfg.rel_tolerance):
            raise NoConvergence(sigma * sigma, residual, cfg.max_iterations)

    if len(alphas) == 0:
        return 0.0
    B = np.diag(alphas) + np.diag(betas[: len(alphas) - 1], 1)
    sigma, _ = _top_singular_triplet(B)
    return sigma


def _residual(Z, v, lam):
    v = v / np.linalg.norm(v)
    return float(np.linalg.norm(Z.T @ (Z @ v) - lam * v) / lam)


def max_eigenvalue(Z, cfg=None, seed=START_SEED):
    """Largest eigenvalue of Z^T Z (the squared top singular value of Z).

    Two independent seeded start vectors are used; if their estimates
    disagree beyond the tolerance the larger one is returned.
    """
    cfg = cfg or SpectralConfig()
    data = Z.data if isinstance(Z, NormalizedMatrix) else np.asarray(Z, dtype=float)
    if data.ndim != 2 or not np.isfinite(data).all():
        raise ValueError("Z must be a finite 2-D matrix")
    if not data.any():
        return 0.0
    if data.shape[0] < data.shape[1]:
        # tall orientation: after min(n, p) steps the square bidiagonal is exact
        data = data.T
    rng = np.random.default_rng(seed)
    first = _lanczos_sigma(data, rng.standard_normal(data.shape[1]), cfg) ** 2
    second = _lanczos_sigma(data, rng.standard_normal(data.shape[1]), cfg) ** 2
    if abs(first - second) > cfg.rel_tolerance * max(first, second):
        return float(max(first, second))
    return float(first)
