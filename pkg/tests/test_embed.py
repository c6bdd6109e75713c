import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from qplpf.embed import (
    DelaySet,
    GridImage,
    SampleSeries,
    consecutive_delays,
    embed_image,
    embed_series,
    square_window_offsets,
)
from qplpf.errors import DomainTooShortError, InvalidParameterError


def series(values):
    return SampleSeries(0.0, 1.0, values)


class TestDelaySets:
    def test_consecutive(self):
        assert consecutive_delays(3).offsets == (1, 2, 3)
        assert consecutive_delays(1).offsets == (1,)

    def test_fifty_sample_window_is_49_delays(self):
        assert consecutive_delays(50 - 1).m == 49

    def test_consecutive_rejects_zero(self):
        with pytest.raises(InvalidParameterError):
            consecutive_delays(0)

    def test_square_window(self):
        assert square_window_offsets(1).m == 0
        assert set(square_window_offsets(2).offsets) == {(1, 0), (0, 1), (1, 1)}
        assert square_window_offsets(10).m == 99

    def test_square_window_rejects_zero(self):
        with pytest.raises(InvalidParameterError):
            square_window_offsets(0)

    @pytest.mark.parametrize("offsets", [(0,), (1, 1), ((0, 0),), (1, (1, 0)), (-1,)])
    def test_invalid_offsets(self, offsets):
        with pytest.raises(InvalidParameterError):
            DelaySet(offsets)


class TestEmbedSeries:
    def test_small_example(self):
        cloud = embed_series(series([1, 2, 3, 4, 5]), DelaySet((1, 2)))
        np.testing.assert_array_equal(cloud.points, [[1, 2, 3], [2, 3, 4], [3, 4, 5]])
        np.testing.assert_array_equal(cloud.domain_index, [0, 1, 2])

    def test_identity_embedding(self):
        cloud = embed_series(series([7.0]), DelaySet(()))
        np.testing.assert_array_equal(cloud.points, [[7.0]])
        np.testing.assert_array_equal(cloud.domain_index, [0])

    def test_quarter_period_circle(self):
        i = np.arange(400)
        cloud = embed_series(series(np.sin(2 * np.pi * i / 100)), DelaySet((25,)))
        r2 = (cloud.points ** 2).sum(axis=1)
        assert np.max(np.abs(r2 - 1.0)) <= 1e-9

    def test_too_short(self):
        with pytest.raises(DomainTooShortError):
            embed_series(series([1.0, 2.0]), DelaySet((2,)))

    @settings(max_examples=50, deadline=None)
    @given(arrays(float, st.integers(2, 60), elements=st.floats(-1e3, 1e3)),
           st.lists(st.integers(1, 20), min_size=1, max_size=5, unique=True))
    def test_row_invariants(self, values, offsets):
        if max(offsets) >= values.size:
            return
        d = DelaySet(tuple(offsets))
        cloud = embed_series(series(values), d)
        assert cloud.n_valid == values.size - max(offsets)
        np.testing.assert_array_equal(cloud.points[:, 0], values[cloud.domain_index])
        for k, o in enumerate(offsets, start=1):
            np.testing.assert_array_equal(cloud.points[:, k], values[cloud.domain_index + o])
        assert np.all(np.diff(cloud.domain_index) > 0)
        again = embed_series(series(values), d)
        assert again.points.tobytes() == cloud.points.tobytes()


class TestEmbedImage:
    def test_two_by_two(self):
        cloud = embed_image(GridImage(np.array([[1.0, 2.0], [3.0, 4.0]])), square_window_offsets(2))
        np.testing.assert_array_equal(cloud.points, [[1, 2, 3, 4]])
        np.testing.assert_array_equal(cloud.domain_index, [0])

    def test_constant_image(self):
        cloud = embed_image(GridImage(np.full((6, 5), 2.5)), square_window_offsets(3))
        assert np.all(cloud.points == 2.5)

    def test_ramp(self):
        y, x = np.mgrid[0:3, 0:3]
        cloud = embed_image(GridImage(x + 3.0 * y), square_window_offsets(2))
        assert cloud.n_valid == 4
        v = cloud.points[:, 0]
        np.testing.assert_array_equal(cloud.points, np.stack([v, v + 1, v + 3, v + 4], axis=1))
        np.testing.assert_array_equal(cloud.domain_index, [0, 1, 3, 4])

    def test_window_too_big(self):
        with pytest.raises(DomainTooShortError):
            embed_image(GridImage(np.zeros((3, 3))), square_window_offsets(4))

    def test_row_count_and_coordinate_zero(self):
        rng = np.random.default_rng(3)
        img = GridImage(rng.standard_normal((9, 13)))
        d = DelaySet(((2, 0), (0, 3), (1, 1)))
        cloud = embed_image(img, d)
        assert cloud.n_valid == (13 - 2) * (9 - 3)
        np.testing.assert_array_equal(cloud.points[:, 0], img.flat[cloud.domain_index])
        assert np.all(np.diff(cloud.domain_index) > 0)
