"""
Neighborhood averaging and the end-to-end quasiperiodic low pass filter.

Each sample that owns an embedding row is replaced by the mean of itself
and its ``S`` graph neighbors::

    out[i] = (x[i] + sum(x[j] for j in neighbors(i))) / (1 + S)

Samples without a row (the last ``m`` samples of a series, the right and
bottom border of an image) are copied through unchanged and reported as
flagged, so filtered output always has the input's shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embed import (
    EmbeddedCloud,
    GridImage,
    SampleSeries,
    consecutive_delays,
    embed_image,
    embed_series,
    square_window_offsets,
)
from .errors import DomainTooShortError, InvalidParameterError, ShapeError
from .graph import MetricKind, NeighborGraph, _effective_s, knn_indexed


@dataclass(frozen=True, eq=False)
class PhaseOracle:
    """Known phase angle (radians) of every sample of a test signal."""

    phase: np.ndarray

    def __post_init__(self):
        phase = np.array(self.phase, dtype=float).ravel()
        if not np.all(np.isfinite(phase)):
            raise InvalidParameterError("phase values must be finite")
        phase.setflags(write=False)
        object.__setattr__(self, "phase", phase)

    def __len__(self) -> int:
        return self.phase.size


@dataclass(frozen=True, eq=False)
class FilterRun:
    """Filter output plus the bookkeeping a report needs."""

    output: object
    flagged: np.ndarray
    graph: NeighborGraph
    cloud: EmbeddedCloud


def wrap_angle(x):
    """Map angles into ``(-pi, pi]``."""
    x = np.asarray(x, dtype=float)
    return x - 2.0 * np.pi * np.ceil((x - np.pi) / (2.0 * np.pi))


def neighborhood_average(values, graph: NeighborGraph, domain_index) -> np.ndarray:
    """Average every embedded sample with its graph neighbors.

    Parameters
    ----------
    values : array_like
        Samples over the full domain (flattened row-major for images).
    graph : NeighborGraph
        Graph over the embedded rows.
    domain_index : array_like of int
        Source sample of each graph vertex.

    Returns
    -------
    ndarray
        Same length as ``values``; entries without a vertex are copied.
    """
    x = np.asarray(values, dtype=float).ravel()
    domain_index = np.asarray(domain_index, dtype=np.int64)
    if domain_index.shape != (graph.n_vertices,):
        raise ShapeError(
            f"graph has {graph.n_vertices} vertices but domain_index has {domain_index.size}"
        )
    if domain_index.size and (domain_index.min() < 0 or domain_index.max() >= x.size):
        raise ShapeError("domain_index points outside the value array")
    out = x.copy()
    acc = x[domain_index].copy()
    # Fixed summation order: self first, then neighbors in list order.
    for k in range(graph.S):
        acc += x[domain_index[graph.neighbors[:, k]]]
    out[domain_index] = acc / (1 + graph.S)
    return out


def series_flags(length: int, m: int) -> np.ndarray:
    """Indices of a length-``length`` series left without a row by ``m`` delays."""
    return np.arange(max(0, length - m), length)


def image_flags(width: int, height: int, w: int) -> np.ndarray:
    """Boolean ``(height, width)`` mask of pixels without a ``w x w`` window."""
    mask = np.zeros((height, width), dtype=bool)
    mask[height - w + 1:, :] = True
    mask[:, width - w + 1:] = True
    return mask


def run_qplpf_series(series: SampleSeries, m: int, S: int,
                     metric=MetricKind.EUCLIDEAN) -> FilterRun:
    if m < 1 or S < 1:
        raise InvalidParameterError("m and S must be >= 1")
    if len(series) <= m + 1:
        raise DomainTooShortError(f"series of length {len(series)} is too short for m={m}")
    cloud = embed_series(series, consecutive_delays(m))
    graph = knn_indexed(cloud, S, metric)
    out = neighborhood_average(series.values, graph, cloud.domain_index)
    return FilterRun(series.with_values(out), series_flags(len(series), m), graph, cloud)


def qplpf_series(series: SampleSeries, m: int, S: int,
                 metric=MetricKind.EUCLIDEAN) -> SampleSeries:
    """Filter a series with ``m`` unit delays and neighborhoods of size ``S``."""
    return run_qplpf_series(series, m, S, metric).output


def run_qplpf_image(image: GridImage, w: int, S: int,
                    metric=MetricKind.EUCLIDEAN) -> FilterRun:
    if w < 1 or S < 1:
        raise InvalidParameterError("w and S must be >= 1")
    if image.width <= w or image.height <= w:
        raise DomainTooShortError(
            f"{image.width}x{image.height} image is too small for a {w}x{w} window"
        )
    cloud = embed_image(image, square_window_offsets(w))
    graph = knn_indexed(cloud, S, metric)
    out = neighborhood_average(image.flat, graph, cloud.domain_index)
    out_image = GridImage(out.reshape(image.height, image.width))
    return FilterRun(out_image, image_flags(image.width, image.height, w), graph, cloud)


def qplpf_image(image: GridImage, w: int, S: int,
                metric=MetricKind.EUCLIDEAN) -> GridImage:
    """Filter an image using ``w x w`` patch embeddings and ``S`` neighbors."""
    return run_qplpf_image(image, w, S, metric).output


def _proximity_key(cand: np.ndarray, i: np.ndarray) -> np.ndarray:
    # Equal phase distance: prefer the sample closest in index, then the earlier one.
    return 2 * np.abs(cand - i) + (cand > i)


def _pick_nearest_index(pool: np.ndarray, members: np.ndarray, k: int) -> np.ndarray:
    """For each member, the ``k`` entries of sorted ``pool`` closest in index.

    Members themselves are never picked.
    """
    pos = np.searchsorted(pool, members)
    span = np.arange(-k - 1, k + 2)
    at = pos[:, None] + span[None, :]
    valid = (at >= 0) & (at < pool.size)
    cand = pool[np.clip(at, 0, pool.size - 1)]
    key = _proximity_key(cand, members[:, None])
    big = np.iinfo(np.int64).max
    key = np.where(valid & (cand != members[:, None]), key, big)
    order = np.argsort(key, axis=1, kind="stable")[:, :k]
    return np.take_along_axis(cand, order, axis=1)


def oracle_phase_graph(oracle: PhaseOracle, S: int) -> NeighborGraph:
    """Neighbor graph that links samples of nearest known phase.

    Phase distance is the wrapped angle difference ``|wrap(p_j - p_i)|``.
    Ties in phase distance go to the sample closest in index, then to the
    earlier sample.
    """
    wrapped = wrap_angle(oracle.phase)
    n = wrapped.size
    s_eff, clipped = _effective_s(n, S)
    uniq, inverse, counts = np.unique(wrapped, return_inverse=True, return_counts=True)
    order = np.argsort(inverse, kind="stable")
    groups = np.split(order, np.cumsum(counts)[:-1])
    G = uniq.size
    out = np.empty((n, s_eff), dtype=np.int64)

    for g in range(G):
        members = groups[g]
        need = s_eff
        parts = []  # (phase distance, (c, *) candidate matrix)
        if members.size - 1 >= need:
            parts.append((0.0, _pick_nearest_index(members, members, need)))
            need = 0
        elif members.size > 1:
            others = np.broadcast_to(members, (members.size, members.size))
            others = others[others != members[:, None]].reshape(members.size, -1)
            parts.append((0.0, others))
            need -= members.size - 1
        left = right = 1
        while need > 0:
            gl, gr = (g - left) % G, (g + right) % G
            dl = abs(float(wrap_angle(uniq[gl] - uniq[g])))
            dr = abs(float(wrap_angle(uniq[gr] - uniq[g])))
            dist = min(dl, dr)
            tied = []
            if dl == dist:
                tied.append(gl)
                left += 1
            if dr == dist and gr != gl:
                tied.append(gr)
                right += 1
            pool = np.sort(np.concatenate([groups[t] for t in tied]))
            if pool.size <= need:
                parts.append((dist, np.broadcast_to(pool, (members.size, pool.size))))
                need -= pool.size
            else:
                parts.append((dist, _pick_nearest_index(pool, members, need)))
                need = 0
        cand = np.concatenate([p for _, p in parts], axis=1)
        dist = np.concatenate([np.full(p.shape[1], d) for d, p in parts])
        dist = np.broadcast_to(dist, cand.shape)
        key = _proximity_key(cand, members[:, None])
        idx = np.lexsort((key, dist), axis=-1) if cand.shape[1] > 1 else np.zeros_like(cand)
        out[members] = np.take_along_axis(cand, idx, axis=1)
    return NeighborGraph(s_eff, out, S, clipped)


def oracle_phase_average(values, oracle: PhaseOracle, S: int) -> np.ndarray:
    """Average each sample with the ``S`` samples nearest to it in known phase."""
    x = np.asarray(values, dtype=float).ravel()
    if x.size != len(oracle):
        raise ShapeError(f"{x.size} values but {len(oracle)} phases")
    graph = oracle_phase_graph(oracle, S)
    return neighborhood_average(x, graph, np.arange(x.size))
