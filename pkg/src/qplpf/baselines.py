"""Reference filters: fixed boxcar and a frequency-adaptive boxcar."""

from __future__ import annotations

import numpy as np

from .embed import SampleSeries
from .errors import InvalidParameterError

MIN_FREQ_WINDOW = 4


def _window_bounds(n: int, width, center_offset) -> tuple:
    idx = np.arange(n)
    lo = np.clip(idx - center_offset, 0, n)
    hi = np.clip(idx - center_offset + width, 0, n)
    return lo, hi


def _centered_means(x: np.ndarray, width) -> np.ndarray:
    """Mean over ``[i - width//2, i - width//2 + width)`` clipped to the signal."""
    width = np.broadcast_to(np.asarray(width, dtype=np.int64), x.shape)
    lo, hi = _window_bounds(x.size, width, width // 2)
    csum = np.concatenate(([0.0], np.cumsum(x)))
    return (csum[hi] - csum[lo]) / (hi - lo)


def boxcar(series: SampleSeries, k: int) -> SampleSeries:
    """Centered moving average of odd width ``k``; edge windows are truncated."""
    if k < 1 or k % 2 == 0:
        raise InvalidParameterError(f"boxcar width must be a positive odd integer, got {k}")
    if k > len(series):
        raise InvalidParameterError(f"boxcar width {k} exceeds series length {len(series)}")
    return series.with_values(_centered_means(series.values, k))


def estimate_local_frequency(window, sample_rate: float) -> tuple:
    """DFT-peak frequency of a window, plus a flag for the degenerate case.

    Returns ``(frequency_hz, degenerate)``.  The window is mean-removed and
    the largest-magnitude bin among ``1 .. n // 2`` wins (lowest bin on ties).
    A window with no AC content returns ``sample_rate / 4`` and ``True``.
    """
    x = np.asarray(window, dtype=float)
    n = x.size
    if n < MIN_FREQ_WINDOW:
        raise InvalidParameterError(f"need at least {MIN_FREQ_WINDOW} samples, got {n}")
    x = x - x.mean()
    mag = np.abs(np.fft.rfft(x)[1:n // 2 + 1])
    scale = max(1.0, float(np.max(np.abs(window))))
    if mag.max() <= 1e-12 * n * scale:
        return sample_rate / 4.0, True
    return (int(np.argmax(mag)) + 1) * sample_rate / n, False


def local_max_frequency(window, sample_rate: float) -> float:
    return estimate_local_frequency(window, sample_rate)[0]


def _batched_frequency(windows: np.ndarray, sample_rate: float) -> np.ndarray:
    n = windows.shape[1]
    x = windows - windows.mean(axis=1, keepdims=True)
    mag = np.abs(np.fft.rfft(x, axis=1)[:, 1:n // 2 + 1])
    scale = np.maximum(1.0, np.max(np.abs(windows), axis=1))
    f = (np.argmax(mag, axis=1) + 1) * sample_rate / n
    return np.where(mag.max(axis=1) <= 1e-12 * n * scale, sample_rate / 4.0, f)


def local_frequencies(series: SampleSeries, est_window: int) -> np.ndarray:
    """Per-sample frequency estimate over a centered, edge-truncated window.

    The window for sample ``i`` covers ``[i - w//2, i - w//2 + w)``.
    """
    n = len(series)
    if est_window > n:
        raise InvalidParameterError(f"est_window {est_window} exceeds series length {n}")
    # Edge truncation leaves ceil(w/2) samples; the estimator needs 4.
    if (est_window + 1) // 2 < MIN_FREQ_WINDOW:
        raise InvalidParameterError(f"est_window must be >= 7, got {est_window}")
    x = series.values
    fs = series.sample_rate
    half = est_window // 2
    lo, hi = _window_bounds(n, est_window, half)
    freqs = np.empty(n)
    full = (hi - lo) == est_window
    if full.any():
        views = np.lib.stride_tricks.sliding_window_view(x, est_window)
        freqs[full] = _batched_frequency(views[lo[full]], fs)
    for i in np.flatnonzero(~full):
        freqs[i] = local_max_frequency(x[lo[i]:hi[i]], fs)
    return freqs


def adaptive_block_sizes(series: SampleSeries, est_window: int) -> np.ndarray:
    """Block width ``max(1, round(fs / (2 f_i)))``, rounding halves up."""
    f = local_frequencies(series, est_window)
    return np.maximum(1, np.floor(series.sample_rate / (2.0 * f) + 0.5)).astype(np.int64)


def adaptive_filter(series: SampleSeries, est_window: int) -> SampleSeries:
    """Boxcar whose width tracks half the locally dominant period.

    Each sample gets its own block width from :func:`adaptive_block_sizes`
    and is replaced by the centered, edge-truncated mean over that block.
    """
    blocks = adaptive_block_sizes(series, est_window)
    return series.with_values(_centered_means(series.values, blocks))
