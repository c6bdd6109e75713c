"""
Evaluation quantities: RMS error, peak envelopes, and 2-D spectra.

The envelope of a series is the piecewise-linear curve through its local
maxima, held constant before the first and after the last peak.  Its
variability is the RMS deviation from its own mean, measured only between
the first and last peak so the flat extensions do not dilute it.
"""

from __future__ import annotations

import numpy as np

from .embed import GridImage, SampleSeries
from .errors import DegenerateEnvelopeError, ShapeError, UndefinedMetricError


def _exclusion_mask(mask, n: int) -> np.ndarray:
    if mask is None:
        return np.zeros(n, dtype=bool)
    mask = np.asarray(mask)
    if mask.dtype == bool:
        mask = mask.ravel()
        if mask.size != n:
            raise ShapeError(f"boolean mask has {mask.size} entries, expected {n}")
        return mask
    excluded = np.zeros(n, dtype=bool)
    excluded[np.asarray(list(np.ravel(mask)), dtype=np.int64)] = True
    return excluded


def rms_error(a, b, mask=None) -> float:
    """Root-mean-square difference over samples not excluded by ``mask``.

    ``mask`` is either a collection of indices to exclude or a boolean array
    that is True where a sample is excluded.  Images are compared flattened.
    """
    a = np.asarray(getattr(a, "values", a), dtype=float).ravel()
    b = np.asarray(getattr(b, "values", b), dtype=float).ravel()
    if a.shape != b.shape:
        raise ShapeError(f"length mismatch: {a.size} vs {b.size}")
    keep = ~_exclusion_mask(mask, a.size)
    if not keep.any():
        raise UndefinedMetricError("no samples left after masking")
    d = a[keep] - b[keep]
    return float(np.sqrt(np.mean(d * d)))


def find_peaks(series) -> list:
    """Interior local maxima as ``(index, value)`` pairs.

    A flat top counts once, at its leftmost sample, if it is higher than the
    samples on both sides of it.
    """
    x = np.asarray(getattr(series, "values", series), dtype=float)
    if x.size < 3:
        return []
    starts = np.flatnonzero(np.concatenate(([True], x[1:] != x[:-1])))
    run_vals = x[starts]
    up = run_vals[1:-1] > run_vals[:-2]
    down = run_vals[1:-1] > run_vals[2:]
    peaks = starts[1:-1][up & down]
    return [(int(i), float(x[i])) for i in peaks]


def envelope(series: SampleSeries) -> SampleSeries:
    """Linear interpolation through the peaks, constant beyond the end peaks."""
    peaks = find_peaks(series)
    if len(peaks) < 2:
        raise DegenerateEnvelopeError(f"need at least 2 peaks, found {len(peaks)}")
    idx, vals = zip(*peaks)
    env = np.interp(np.arange(len(series)), idx, vals)
    return series.with_values(env)


def envelope_variability(series: SampleSeries) -> float:
    peaks = find_peaks(series)
    env = envelope(series).values
    inner = env[peaks[0][0]:peaks[-1][0] + 1]
    d = inner - inner.mean()
    return float(np.sqrt(np.mean(d * d)))


def spectrum2d(image: GridImage) -> GridImage:
    """Centered magnitude of the unitary 2-D DFT of the mean-removed image.

    With the unitary scaling, the squared magnitudes sum to
    ``n_pixels * variance``.
    """
    v = image.values - image.values.mean()
    return GridImage(np.abs(np.fft.fftshift(np.fft.fft2(v, norm="ortho"))))
