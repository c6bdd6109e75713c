"""
Delay embedding of sampled signals and images.

The first stage of the filter lifts every sample ``x`` to the vector

    F(x) = (u(x), u(g_1 x), ..., u(g_m x))

where the ``g_k`` are translations of the sampling grid.  Translations are
stored as integer offsets: plain integers for 1-D series and ``(dx, dy)``
pairs for images.  Samples whose shifted partners fall outside the domain
are dropped (no wrapping, no clamping), so an embedded cloud generally has
fewer rows than the source has samples.  ``EmbeddedCloud.domain_index``
records which source sample each row came from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np

from .errors import DomainTooShortError, InvalidParameterError, ShapeError

Offset = Union[int, Tuple[int, int]]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SampleSeries:
    """Uniformly sampled real signal.

    Parameters
    ----------
    start_time : float
        Time of the first sample [s].
    dt : float
        Sample spacing [s], strictly positive.
    values : array_like
        Sample values, finite.
    """

    start_time: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(np.ravel(self.values))
        if not self.dt > 0:
            raise InvalidParameterError(f"dt must be positive, got {self.dt}")
        if values.size == 0:
            raise InvalidParameterError("series must contain at least one sample")
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("series values must be finite")
        object.__setattr__(self, "start_time", float(self.start_time))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def sample_rate(self) -> float:
        return 1.0 / self.dt

    @property
    def times(self) -> np.ndarray:
        return self.start_time + self.dt * np.arange(len(self))

    def with_values(self, values) -> "SampleSeries":
        """Same time axis, new samples."""
        values = np.asarray(values, dtype=float)
        if values.shape != self.values.shape:
            raise ShapeError(f"expected {self.values.shape}, got {values.shape}")
        return SampleSeries(self.start_time, self.dt, values)


@dataclass(frozen=True, eq=False)
class GridImage:
    """Real image on a pixel grid.

    ``values`` is held as a ``(height, width)`` array; pixel ``(x, y)`` is
    ``values[y, x]`` and the flat (row-major) index is ``y * width + x``.
    """

    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 2 or values.size == 0:
            raise ShapeError(f"image must be a non-empty 2-D array, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("image values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_flat(cls, width: int, height: int, values: Sequence[float]) -> "GridImage":
        values = np.asarray(values, dtype=float)
        if width < 1 or height < 1 or values.size != width * height:
            raise ShapeError(
                f"need width*height = {width * height} values, got {values.size}"
            )
        return cls(values.reshape(height, width))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()


@dataclass(frozen=True)
class DelaySet:
    """Translations ``g_1 ... g_m`` as integer offsets.

    All offsets must share one kind: ints for series, ``(dx, dy)`` pairs for
    images.  The zero offset is implicit (coordinate 0 of the embedding) and
    may not be listed.
    """

    offsets: Tuple[Offset, ...] = field(default_factory=tuple)

    def __post_init__(self):
        offsets = tuple(
            tuple(int(c) for c in o) if isinstance(o, (tuple, list, np.ndarray)) else int(o)
            for o in self.offsets
        )
        kinds = {isinstance(o, tuple) for o in offsets}
        if len(kinds) > 1:
            raise InvalidParameterError("cannot mix scalar and 2-D offsets")
        for o in offsets:
            if isinstance(o, tuple):
                if len(o) != 2:
                    raise InvalidParameterError(f"2-D offsets need two components, got {o}")
                if o[0] < 0 or o[1] < 0:
                    raise InvalidParameterError(f"offsets must be non-negative, got {o}")
            elif o < 0:
                raise InvalidParameterError(f"offsets must be non-negative, got {o}")
        if any(o == 0 or o == (0, 0) for o in offsets):
            raise InvalidParameterError("the zero offset is implicit and may not be listed")
        if len(set(offsets)) != len(offsets):
            raise InvalidParameterError("offsets must be pairwise distinct")
        object.__setattr__(self, "offsets", offsets)

    @property
    def m(self) -> int:
        return len(self.offsets)

    @property
    def is_2d(self) -> bool:
        return bool(self.offsets) and isinstance(self.offsets[0], tuple)


@dataclass(frozen=True, eq=False)
class EmbeddedCloud:
    """Image of the delay map: one row of ``m + 1`` coordinates per kept sample."""

    points: np.ndarray
    domain_index: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2:
            raise ShapeError("points must be a 2-D array")
        index = np.asarray(self.domain_index, dtype=np.int64)
        if index.shape != (points.shape[0],):
            raise ShapeError("domain_index needs one entry per row")
        points.setflags(write=False)
        index.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "domain_index", index)

    @property
    def n_valid(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def consecutive_delays(m: int) -> DelaySet:
    """Unit forward shifts ``[1, 2, ..., m]``.

    A matching window of ``w`` samples corresponds to ``m = w - 1``.
    """
    if m < 1:
        raise InvalidParameterError(f"m must be >= 1, got {m}")
    return DelaySet(tuple(range(1, m + 1)))


def square_window_offsets(w: int) -> DelaySet:
    """All ``(dx, dy)`` with ``0 <= dx, dy < w`` except ``(0, 0)``.

    Offsets are listed row by row (``dy`` outer, ``dx`` inner), so the
    embedding coordinates of a pixel read the ``w x w`` patch anchored at
    its top-left corner in row-major order.
    """
    if w < 1:
        raise InvalidParameterError(f"window must be >= 1, got {w}")
    return DelaySet(tuple((dx, dy) for dy in range(w) for dx in range(w) if dx or dy))


def embed_series(series: SampleSeries, delays: DelaySet) -> EmbeddedCloud:
    """Delay-embed a series; rows exist for ``i + max(offsets) < len(series)``."""
    if delays.is_2d:
        raise InvalidParameterError("series embedding needs scalar offsets")
    x = series.values
    n = x.size
    max_off = max(delays.offsets, default=0)
    if max_off >= n:
        raise DomainTooShortError(
            f"largest offset {max_off} does not fit a series of length {n}"
        )
    n_valid = n - max_off
    shifts = (0,) + delays.offsets
    points = np.empty((n_valid, len(shifts)))
    for k, s in enumerate(shifts):
        points[:, k] = x[s:s + n_valid]
    return EmbeddedCloud(points, np.arange(n_valid))


def embed_image(image: GridImage, delays: DelaySet) -> EmbeddedCloud:
    """Delay-embed an image over corner-anchored windows.

    Rows exist for pixels with ``x + max_dx < width`` and
    ``y + max_dy < height``, ordered row-major.
    """
    if delays.offsets and not delays.is_2d:
        raise InvalidParameterError("image embedding needs (dx, dy) offsets")
    v = image.values
    h, w = v.shape
    max_dx = max((o[0] for o in delays.offsets), default=0)
    max_dy = max((o[1] for o in delays.offsets), default=0)
    if max_dx >= w or max_dy >= h:
        raise DomainTooShortError(
            f"window reaching ({max_dx}, {max_dy}) does not fit a {w}x{h} image"
        )
    vw, vh = w - max_dx, h - max_dy
    shifts = ((0, 0),) + delays.offsets
    points = np.empty((vh * vw, len(shifts)))
    for k, (dx, dy) in enumerate(shifts):
        points[:, k] = v[dy:dy + vh, dx:dx + vw].ravel()
    ys, xs = np.divmod(np.arange(vh * vw), vw)
    return EmbeddedCloud(points, ys * w + xs)
