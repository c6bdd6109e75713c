"""
S-nearest-neighbor graphs over embedded point clouds.

Two builders share one contract:

* :func:`knn_brute` scans every pair.  It is the reference.
* :func:`knn_indexed` prunes candidates first (a k-d tree in low dimension,
  blocked Gram-matrix distances in high dimension) and then ranks the
  surviving candidates with the very same distance kernel as the brute
  scan, so both return identical neighbor lists.

Neighbors are ranked by squared Euclidean distance, ties broken by the
smaller vertex id.  A vertex never lists itself; self-adjacency is implied
by the averaging step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .embed import EmbeddedCloud
from .errors import InvalidParameterError, TooFewPointsError

# Above this dimension a k-d tree degenerates into a slow linear scan.
KDTREE_MAX_DIM = 16
# Upper bound on (rows x candidates) entries held at once while ranking.
_BLOCK_ENTRIES = 1 << 22


class MetricKind(str, enum.Enum):
    EUCLIDEAN = "euclidean"


@dataclass(frozen=True, eq=False)
class NeighborGraph:
    """Directed S-nearest-neighbor graph.

    Attributes
    ----------
    S : int
        Effective neighborhood size, ``min(requested_S, n_vertices - 1)``.
    neighbors : ndarray of int64, shape (n_vertices, S)
        Row ``v`` lists the neighbors of ``v`` nearest first.
    requested_S : int
        The S that was asked for.
    clipped : bool
        True when ``requested_S`` exceeded ``n_vertices - 1``.
    """

    S: int
    neighbors: np.ndarray
    requested_S: int
    clipped: bool = False

    @property
    def n_vertices(self) -> int:
        return self.neighbors.shape[0]

    def edges(self) -> set:
        return {(v, int(w)) for v, row in enumerate(self.neighbors) for w in row}

    def to_lines(self) -> list:
        return [f"{v}: " + " ".join(str(int(w)) for w in row)
                for v, row in enumerate(self.neighbors)]


def _check_metric(metric) -> MetricKind:
    try:
        return MetricKind(metric)
    except ValueError:
        raise InvalidParameterError(f"unsupported metric {metric!r}") from None


def _effective_s(n: int, S: int) -> tuple:
    if n < 2:
        raise TooFewPointsError(f"need at least 2 points, got {n}")
    if S < 1:
        raise InvalidParameterError(f"S must be >= 1, got {S}")
    return min(S, n - 1), S > n - 1


def _sq_dist(points: np.ndarray, rows: np.ndarray, cand: np.ndarray) -> np.ndarray:
    """Squared distances ``|points[cand[r, c]] - points[rows[r]]|^2``.

    Accumulates one coordinate at a time, so the rounding of each entry
    depends only on the two points involved and never on block layout.
    Entries with ``cand < 0`` are padding and come back as ``inf``.
    """
    pad = cand < 0
    safe = np.where(pad, 0, cand)
    acc = np.zeros(cand.shape)
    for k in range(points.shape[1]):
        diff = points[safe, k] - points[rows, k][:, None]
        acc += diff * diff
    acc[pad] = np.inf
    return acc


def _rank(points: np.ndarray, rows: np.ndarray, cand: np.ndarray, S: int) -> np.ndarray:
    """Pick the S nearest non-self candidates per row.

    ``cand`` rows must be sorted by id (padding ``-1`` last) so that a stable
    sort on distance breaks ties by id.
    """
    d = _sq_dist(points, rows, cand)
    d[cand == rows[:, None]] = np.inf
    if cand.shape[1] > 4 * S + 8:
        # Keep only entries at or below the S-th smallest distance (all ties
        # included), preserving id order, before the stable sort.
        kth = np.partition(d, S - 1, axis=1)[:, S - 1]
        keep = np.argsort(~(d <= kth[:, None]), axis=1, kind="stable")
        width = int((d <= kth[:, None]).sum(axis=1).max())
        keep = keep[:, :width]
        cand = np.take_along_axis(cand, keep, axis=1)
        d = np.take_along_axis(d, keep, axis=1)
    order = np.argsort(d, axis=1, kind="stable")[:, :S]
    return np.take_along_axis(cand, order, axis=1)


def knn_brute(cloud: EmbeddedCloud, S: int, metric=MetricKind.EUCLIDEAN) -> NeighborGraph:
    """Exact S-nearest-neighbor graph by exhaustive pairwise scan."""
    _check_metric(metric)
    P = cloud.points
    n = P.shape[0]
    s_eff, clipped = _effective_s(n, S)
    out = np.empty((n, s_eff), dtype=np.int64)
    block = max(1, _BLOCK_ENTRIES // n)
    all_ids = np.arange(n)
    for start in range(0, n, block):
        rows = all_ids[start:start + block]
        cand = np.broadcast_to(all_ids, (rows.size, n))
        out[rows] = _rank(P, rows, cand, s_eff)
    return NeighborGraph(s_eff, out, S, clipped)


def _kdtree_candidates(P: np.ndarray, s_eff: int) -> list:
    tree = cKDTree(P)
    dist, _ = tree.query(P, k=s_eff + 1)
    # The (S+1)-th distance counting self bounds the S-th non-self distance.
    radius = dist[:, -1] * (1.0 + 1e-9) + 1e-300
    return tree.query_ball_point(P, radius, return_sorted=True)


def _gram_candidates(P: np.ndarray, s_eff: int) -> list:
    n, dim = P.shape
    C = P - P.mean(axis=0)
    sq = np.einsum("ij,ij->i", C, C)
    eps = np.finfo(float).eps
    slack = 8.0 * (dim + 4) * eps
    block = max(1, _BLOCK_ENTRIES // n)
    out = []
    for start in range(0, n, block):
        stop = min(n, start + block)
        approx = sq[start:stop, None] + sq[None, :] - 2.0 * (C[start:stop] @ C.T)
        idx = np.arange(start, stop)
        approx[idx - start, idx] = np.inf
        kth = np.partition(approx, s_eff - 1, axis=1)[:, s_eff - 1]
        # Gram distances can be off by ~dim*eps*(|a|^2+|b|^2); widen twice that.
        tol = 2.0 * slack * (sq[start:stop] + sq.max())
        keep = approx <= (kth + tol)[:, None]
        keep[idx - start, idx] = True
        out.extend(np.flatnonzero(row) for row in keep)
    return out


def _pad(lists: list, rows: np.ndarray) -> np.ndarray:
    width = max(len(lists[r]) for r in rows)
    cand = np.full((rows.size, width), -1, dtype=np.int64)
    for i, r in enumerate(rows):
        cand[i, :len(lists[r])] = lists[r]
    return cand


def knn_indexed(cloud: EmbeddedCloud, S: int, metric=MetricKind.EUCLIDEAN) -> NeighborGraph:
    """S-nearest-neighbor graph with candidate pruning.

    Returns exactly what :func:`knn_brute` returns.  Clouds of dimension up
    to ``KDTREE_MAX_DIM`` are searched with a k-d tree; higher-dimensional
    clouds use blocked BLAS distances to shortlist candidates.  Either way
    the shortlist is conservative and final ranking uses exact distances.
    """
    if _check_metric(metric) is not MetricKind.EUCLIDEAN:
        raise InvalidParameterError("indexed search requires the euclidean metric")
    P = cloud.points
    n = P.shape[0]
    s_eff, clipped = _effective_s(n, S)
    if cloud.dim <= KDTREE_MAX_DIM:
        lists = _kdtree_candidates(P, s_eff)
    else:
        lists = _gram_candidates(P, s_eff)

    out = np.empty((n, s_eff), dtype=np.int64)
    lengths = np.fromiter((len(c) for c in lists), dtype=np.int64, count=n)
    # Group rows of similar shortlist length so padding stays small.
    order = np.argsort(lengths, kind="stable")
    start = 0
    while start < n:
        width = lengths[order[start]]
        stop = start + 1
        while stop < n and (stop - start + 1) * lengths[order[stop]] <= max(_BLOCK_ENTRIES, width):
            stop += 1
        rows = np.sort(order[start:stop])
        out[rows] = _rank(P, rows, _pad(lists, rows), s_eff)
        start = stop
    return NeighborGraph(s_eff, out, S, clipped)
