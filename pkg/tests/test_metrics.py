import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from qplpf.embed import GridImage, SampleSeries
from qplpf.errors import DegenerateEnvelopeError, ShapeError, UndefinedMetricError
from qplpf.metrics import envelope, envelope_variability, find_peaks, rms_error, spectrum2d
from qplpf.synth import lfm_chirp, periodic_sine


def series(values):
    return SampleSeries(0.0, 1.0, values)


class TestRMS:
    def test_examples(self):
        assert rms_error([3, 4], [0, 0]) == pytest.approx(3.53553, abs=1e-5)
        assert rms_error([1, 2, 3], [1, 2, 3]) == 0.0
        assert rms_error([1, 1, 1], [0, 2, 1], mask=[2]) == 1.0
        assert rms_error([1, 1, 1], [0, 2, 1], mask=np.array([False, False, True])) == 1.0

    def test_errors(self):
        with pytest.raises(ShapeError):
            rms_error([1, 2], [1])
        with pytest.raises(UndefinedMetricError):
            rms_error([1, 2], [3, 4], mask=[0, 1])

    @settings(max_examples=100, deadline=None)
    @given(arrays(float, 8, elements=st.floats(-1e3, 1e3)),
           arrays(float, 8, elements=st.floats(-1e3, 1e3)),
           arrays(float, 8, elements=st.floats(-1e3, 1e3)))
    def test_metric_axioms(self, a, b, c):
        mask = [0, 5]
        assert rms_error(a, b, mask) == pytest.approx(rms_error(b, a, mask))
        assert rms_error(a, a, mask) == 0.0
        assert rms_error(a, c, mask) <= rms_error(a, b, mask) + rms_error(b, c, mask) + 1e-9


class TestPeaks:
    def test_examples(self):
        assert find_peaks(series([0, 1, 0, 2, 0])) == [(1, 1.0), (3, 2.0)]
        assert find_peaks(series(np.arange(10.0))) == []
        assert find_peaks(series([0, 1, 1, 0])) == [(1, 1.0)]

    def test_plateau_must_beat_both_sides(self):
        assert find_peaks(series([0, 1, 1, 2, 0])) == [(3, 2.0)]


class TestEnvelope:
    def test_interpolation_and_extension(self):
        env = envelope(series([0, 1, 0, 2, 0]))
        np.testing.assert_allclose(env.values, [1, 1, 1.5, 2, 2])

    def test_unit_sine(self):
        env = envelope(periodic_sine(4, 30)).values
        assert np.max(np.abs(env - 1.0)) <= 1e-9

    def test_noiseless_chirp_near_unit(self):
        c = lfm_chirp()
        peaks = find_peaks(c)
        env = envelope(c).values[peaks[0][0]:peaks[-1][0] + 1]
        assert np.max(np.abs(env - 1.0)) <= 0.02

    def test_degenerate(self):
        with pytest.raises(DegenerateEnvelopeError):
            envelope(series([0, 1, 0, 0]))

    def test_scaling(self):
        x = np.random.default_rng(1).standard_normal(200)
        s = series(x)
        np.testing.assert_allclose(envelope(s.with_values(2.5 * x)).values,
                                   2.5 * envelope(s).values)
        assert envelope_variability(s.with_values(2.5 * x)) == pytest.approx(
            2.5 * envelope_variability(s))


class TestVariability:
    def test_constant_envelope(self):
        assert envelope_variability(periodic_sine(4, 20)) == pytest.approx(0.0, abs=1e-12)

    def test_linear_envelope(self):
        # peaks 1, 2, 3 at indices 1, 3, 5 -> interior envelope 1, 1.5, 2, 2.5, 3
        s = series([0, 1, 0, 2, 0, 3, 0])
        env = np.array([1, 1.5, 2, 2.5, 3])
        assert envelope_variability(s) == pytest.approx(np.sqrt(np.mean((env - 2) ** 2)))

    def test_three_point_definition(self):
        env = np.array([1.0, 2.0, 3.0])
        assert np.sqrt(np.mean((env - env.mean()) ** 2)) == pytest.approx(0.8165, abs=1e-4)

    def test_amplitude_modulated(self):
        t = np.arange(8000)
        x = (1 + 0.5 * np.sin(2 * np.pi * t / 800)) * np.sin(2 * np.pi * t / 8)
        v = envelope_variability(series(x))
        assert v == pytest.approx(0.5 / np.sqrt(2), rel=0.1)


class TestSpectrum:
    def test_constant_image(self):
        assert np.all(spectrum2d(GridImage(np.full((8, 8), 3.0))).values < 1e-12)

    def test_plane_wave_bins(self):
        w, h, k = 64, 32, 5
        x = np.arange(w)
        img = GridImage(np.tile(np.sin(2 * np.pi * k * x / w), (h, 1)))
        mag = spectrum2d(img).values
        energy = mag ** 2
        cy, cx = h // 2, w // 2
        peak = energy[cy, cx - k] + energy[cy, cx + k]
        assert peak / energy.sum() > 1 - 1e-12

    @pytest.mark.parametrize("seed", range(3))
    def test_white_noise_flat(self, seed):
        img = GridImage(np.random.default_rng(seed).standard_normal((128, 128)))
        mag = spectrum2d(img).values
        assert mag.max() <= 5 * np.median(mag)

    def test_parseval(self):
        img = GridImage(np.random.default_rng(9).standard_normal((20, 30)) * 3 + 1)
        mag = spectrum2d(img).values
        assert (mag ** 2).sum() == pytest.approx(img.values.size * img.values.var(), rel=1e-6)
