"""
Deterministic test signals and noise.

Noise comes from NumPy's ``Generator(PCG64(seed))`` and its
``standard_normal`` method (ziggurat sampler), scaled by sigma.  Both the
bit generator and the sampler are fixed, so a given ``(n, sigma, seed)``
reproduces the same sequence on every platform NumPy supports.  Monte-Carlo
trial ``k`` uses seed ``base_seed + k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .embed import GridImage, SampleSeries
from .errors import InvalidParameterError

CHIRP_RATE = 2.0 * np.pi / 5.0


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise InvalidParameterError(f"sigma must be >= 0, got {self.sigma}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidParameterError("seed must fit in 64 unsigned bits")


def lfm_phase(t) -> np.ndarray:
    """Unwrapped phase ``(2 pi / 5) t (t + 1)`` of the test chirp."""
    t = np.asarray(t, dtype=float)
    return CHIRP_RATE * t * (t + 1.0)


def lfm_chirp(fs: float = 50.0, t_end: float = 10.0) -> SampleSeries:
    """Noiseless chirp ``sin((2 pi / 5) t (t + 1))`` on ``t = 0, 1/fs, ..., t_end``.

    Instantaneous frequency is ``(2t + 1) / 5`` Hz, 4.2 Hz at the default
    end time, well below the 25 Hz Nyquist limit of the default rate.
    """
    if not fs > 0 or not t_end > 0:
        raise InvalidParameterError("fs and t_end must be positive")
    n = int(math.floor(t_end * fs + 1e-9)) + 1
    t = np.arange(n) / fs
    return SampleSeries(0.0, 1.0 / fs, np.sin(lfm_phase(t)))


def periodic_sine(period_samples: int, n_periods: int) -> SampleSeries:
    """``sin(2 pi i / period)`` with bit-identical repeats across periods."""
    if period_samples < 2 or n_periods < 1:
        raise InvalidParameterError("need period_samples >= 2 and n_periods >= 1")
    i = np.arange(period_samples * n_periods)
    values = np.sin(2.0 * np.pi * (i % period_samples) / period_samples)
    return SampleSeries(0.0, 1.0, values)


def periodic_sine_phase(period_samples: int, n_periods: int) -> np.ndarray:
    i = np.arange(period_samples * n_periods)
    return 2.0 * np.pi * (i % period_samples) / period_samples


def awgn(n: int, spec: NoiseSpec) -> np.ndarray:
    """``n`` i.i.d. N(0, sigma^2) samples; pure function of ``(n, spec)``."""
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    if spec.sigma == 0:
        return np.zeros(n)
    rng = np.random.Generator(np.random.PCG64(int(spec.seed)))
    return spec.sigma * rng.standard_normal(n)


def snr_to_sigma(snr_db: float, signal_power: float) -> float:
    """Noise std for a power SNR (mean signal power over noise variance) in dB.

    ``snr_db = inf`` gives zero noise.
    """
    if not signal_power > 0:
        raise InvalidParameterError("signal_power must be positive")
    return math.sqrt(signal_power / 10.0 ** (snr_db / 10.0))


def signal_power(values) -> float:
    values = np.asarray(values, dtype=float)
    return float(np.mean(values * values))


def warped_sine_image(width: int, height: int, a: float = 0.05, b: float = 0.03,
                      c: float = 0.0005) -> GridImage:
    """``sin(2 pi (a x + b y + c/2 (x^2 + y^2)))`` on a ``width x height`` grid."""
    if width < 2 or height < 2:
        raise InvalidParameterError("image dimensions must be >= 2")
    y, x = np.mgrid[0:height, 0:width].astype(float)
    return GridImage(np.sin(2.0 * np.pi * (a * x + b * y + 0.5 * c * (x * x + y * y))))
