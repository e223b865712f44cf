import numpy as np
import pytest
from hypothesis import given, strategies as st

from text2plan.codec import (angular_augment, bit2int, bit2int_array, denormalize, int2bit,
                             int2bit_array, normalize)
from text2plan.errors import DegenerateError, RangeError
from text2plan.geometry import Loop, rect_loop
from text2plan.rooms import RoomType


@pytest.mark.parametrize("v, bits", [
    (0, [0] * 8),
    (255, [1] * 8),
    (170, [1, 0, 1, 0, 1, 0, 1, 0]),
])
def test_int2bit_examples(v, bits):
    assert int2bit(v) == bits


def test_bit2int_examples():
    assert bit2int([0, 0, 0, 0, 0, 0, 0, 1]) == 1
    assert bit2int([1, 0, 0, 0, 0, 0, 0, 0]) == 128


@pytest.mark.parametrize("v", [-1, 256, 3.5, True])
def test_int2bit_rejects(v):
    with pytest.raises(RangeError) as e:
        int2bit(v)
    assert e.value.code == "E_RANGE"


@pytest.mark.parametrize("bits", [[0] * 7, [0] * 9, [0, 0, 0, 2, 0, 0, 0, 0]])
def test_bit2int_rejects(bits):
    with pytest.raises(RangeError):
        bit2int(bits)


def test_roundtrip_exhaustive():
    for v in range(256):
        assert bit2int(int2bit(v)) == v
        assert denormalize(normalize(v)) == v
    v = np.arange(256)
    assert (bit2int_array(int2bit_array(v)) == v).all()


def test_normalize_endpoints():
    assert normalize(0) == -1.0
    assert normalize(255) == 1.0


@given(st.floats(-5, 5, allow_nan=False))
def test_denormalize_clamps(x):
    assert 0 <= denormalize(x) <= 255


@given(st.integers(0, 255))
def test_int2bit_matches_format(v):
    assert "".join(map(str, int2bit(v))) == format(v, "08b")


def test_angular_axis_cases():
    lp = Loop(((0, 0), (1, 0), (1, 1), (0, 1)), RoomType.Bedroom)
    np.testing.assert_allclose(angular_augment(lp, 0)[2:], [1, 0])
    np.testing.assert_allclose(angular_augment(lp, 1)[2:], [0, 1])
    np.testing.assert_allclose(angular_augment(lp, 0)[:2], normalize([0, 0]))


@given(st.integers(0, 200), st.integers(0, 200), st.integers(1, 55), st.integers(1, 55))
def test_rectangle_directions_cancel(x, y, w, h):
    lp = rect_loop(x, y, x + w, y + h, RoomType.Kitchen)
    au = np.array([angular_augment(lp, j) for j in range(4)])
    assert abs(au[:, 2].sum()) < 1e-12 and abs(au[:, 3].sum()) < 1e-12


def test_angular_degenerate():
    lp = Loop(((5, 5),), RoomType.Bedroom)
    with pytest.raises(DegenerateError):
        angular_augment(lp, 0)
