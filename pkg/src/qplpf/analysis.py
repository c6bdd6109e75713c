"""Principal components of an embedded cloud, for phase-space plots."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embed import EmbeddedCloud
from .errors import InvalidParameterError, TooFewPointsError


@dataclass(frozen=True, eq=False)
class PCAResult:
    components: np.ndarray          # (k, dim), orthonormal rows
    projections: np.ndarray         # (n, k)
    explained_variance: np.ndarray  # (k,), non-increasing
    mean: np.ndarray
    degenerate: bool = False


def pca(cloud, k: int) -> PCAResult:
    """Top-``k`` principal components of a point cloud.

    Uses the unbiased sample covariance and a symmetric eigensolver.  Each
    component is signed so that its largest-magnitude entry is positive.
    A cloud with no variance returns the first ``k`` canonical basis vectors
    and ``degenerate=True``.

    Parameters
    ----------
    cloud : EmbeddedCloud or array_like of shape (n, dim)
    k : int
        Number of components, ``1 <= k <= min(n, dim)``.
    """
    X = np.asarray(cloud.points if isinstance(cloud, EmbeddedCloud) else cloud, dtype=float)
    n, dim = X.shape
    if n < 2:
        raise TooFewPointsError(f"need at least 2 points, got {n}")
    if not 1 <= k <= min(n, dim):
        raise InvalidParameterError(f"k must be in [1, {min(n, dim)}], got {k}")
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = Xc.T @ Xc / (n - 1)
    if not np.any(cov):
        comps = np.eye(dim)[:k]
        return PCAResult(comps, Xc @ comps.T, np.zeros(k), mean, degenerate=True)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1][:k]
    comps = evecs[:, order].T
    lead = np.argmax(np.abs(comps), axis=1)
    comps *= np.sign(comps[np.arange(k), lead])[:, None]
    # eigh can return tiny negative eigenvalues for a semidefinite matrix.
    variance = np.clip(evals[order], 0.0, None)
    return PCAResult(comps, Xc @ comps.T, variance, mean)
