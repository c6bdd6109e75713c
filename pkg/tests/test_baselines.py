import cmath
import math

import numpy as np
import pytest

from qplpf.baselines import (
    adaptive_block_sizes,
    adaptive_filter,
    boxcar,
    estimate_local_frequency,
    local_frequencies,
    local_max_frequency,
)
from qplpf.embed import SampleSeries
from qplpf.errors import InvalidParameterError
from qplpf.synth import lfm_chirp


def tone(freq, fs=50.0, n=50):
    t = np.arange(n) / fs
    return np.sin(2 * np.pi * freq * t)


def naive_peak_frequency(window, fs):
    """Direct DFT sum, independent of numpy.fft."""
    x = [v - sum(window) / len(window) for v in window]
    n = len(x)
    best, best_k = -1.0, None
    for k in range(1, n // 2 + 1):
        mag = abs(sum(x[j] * cmath.exp(-2j * math.pi * k * j / n) for j in range(n)))
        if mag > best + 1e-9:
            best, best_k = mag, k
    return best_k * fs / n


class TestBoxcar:
    def test_truncated_edges(self):
        out = boxcar(SampleSeries(0, 1, [1.0, 2.0, 3.0]), 3)
        np.testing.assert_allclose(out.values, [1.5, 2.0, 2.5])

    def test_impulse(self):
        out = boxcar(SampleSeries(0, 1, [0, 0, 1, 0, 0]), 3)
        np.testing.assert_allclose(out.values, [0, 1 / 3, 1 / 3, 1 / 3, 0])

    def test_constant(self):
        s = SampleSeries(0, 1, np.full(20, 4.0))
        np.testing.assert_allclose(boxcar(s, 11).values, 4.0)

    @pytest.mark.parametrize("k", [0, 2, 7])
    def test_invalid_width(self, k):
        with pytest.raises(InvalidParameterError):
            boxcar(SampleSeries(0, 1, np.zeros(5)), k)

    def test_linearity(self):
        rng = np.random.default_rng(0)
        v, w = rng.standard_normal(30), rng.standard_normal(30)
        s = SampleSeries(0, 1, v)
        lhs = boxcar(s.with_values(2 * v - 3 * w), 5).values
        rhs = 2 * boxcar(s, 5).values - 3 * boxcar(s.with_values(w), 5).values
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


class TestFrequencyEstimate:
    @pytest.mark.parametrize("freq", [5.0, 10.0])
    def test_integer_bin_tones(self, freq):
        w = tone(freq)
        assert local_max_frequency(w, 50.0) == freq
        assert naive_peak_frequency(list(w), 50.0) == freq

    def test_agrees_with_direct_dft(self):
        w = np.random.default_rng(4).standard_normal(37)
        assert local_max_frequency(w, 50.0) == pytest.approx(naive_peak_frequency(list(w), 50.0))

    def test_constant_window_fallback(self):
        assert estimate_local_frequency(np.full(50, 0.3), 50.0) == (12.5, True)
        assert estimate_local_frequency(tone(5.0), 50.0) == (5.0, False)

    def test_too_short(self):
        with pytest.raises(InvalidParameterError):
            local_max_frequency([1.0, 2.0, 3.0], 50.0)


class TestAdaptive:
    def test_pure_tone_blocks(self):
        s = SampleSeries(0, 1 / 50, tone(5.0, n=300))
        b = adaptive_block_sizes(s, 50)
        assert np.all(b[25:300 - 25] == 5)

    def test_reduces_to_boxcar_on_tone(self):
        s = SampleSeries(0, 1 / 50, tone(5.0, n=300))
        out = adaptive_filter(s, 50).values
        ref = boxcar(s, 5).values
        np.testing.assert_allclose(out[25:275], ref[25:275], atol=1e-12)

    def test_constant(self):
        s = SampleSeries(0, 0.02, np.full(120, 1.25))
        np.testing.assert_allclose(adaptive_filter(s, 50).values, 1.25)

    def test_chirp_blocks_shrink(self):
        chirp = lfm_chirp()
        f = local_frequencies(chirp, 50)
        b = adaptive_block_sizes(chirp, 50)
        interior = slice(25, len(chirp) - 25)
        smooth_f = np.array([np.median(f[max(0, i - 12):i + 13]) for i in range(len(f))])[interior]
        smooth_b = np.array([np.median(b[max(0, i - 12):i + 13]) for i in range(len(b))])[interior]
        assert np.all(np.diff(smooth_f) >= 0)
        assert np.all(np.diff(smooth_b) <= 0)
        assert b[interior][0] > b[interior][-1]

    def test_window_bounds(self):
        s = SampleSeries(0, 1, np.zeros(20))
        with pytest.raises(InvalidParameterError):
            adaptive_filter(s, 21)
        with pytest.raises(InvalidParameterError):
            adaptive_filter(s, 6)
