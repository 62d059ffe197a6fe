import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from conftest import vertical_step
from edgekit.canny import (
    CannyConfig,
    canny,
    double_threshold,
    hysteresis,
    non_max_suppression,
    quantize_orientation,
)
from edgekit.filtering import FilterError, GradientField, gradient
from edgekit.image import GrayImage
from edgekit.kernels import KernelSpec
from oracles import hysteresis_oracle, nms_oracle

planes = hnp.arrays(np.float64, st.tuples(st.integers(1, 9), st.integers(1, 9)),
                    elements=st.sampled_from([0.0, 0.0, 0.0, 10.0, 40.0, 60.0, 100.0]))


def test_double_threshold_examples():
    assert double_threshold(255) == (178.5, 53.55)
    assert double_threshold(0) == (0, 0)
    assert double_threshold(100, CannyConfig(high_ratio=0.5, low_ratio=0.5)) == (50, 25)
    with pytest.raises(FilterError):
        double_threshold(-1)


@pytest.mark.parametrize("kw", [{"low_ratio": 0}, {"high_ratio": 1.5}, {"threshold_source": "max"}, {"sigma": 0}])
def test_config_validation(kw):
    with pytest.raises(FilterError):
        CannyConfig(**kw)


@pytest.mark.parametrize("deg,expected", [
    (0, 0), (22.5, 0), (22.6, 1), (45, 1), (67.5, 1), (90, 2), (112.5, 2), (135, 3),
    (157.5, 3), (158, 0), (180, 0), (-45, 3), (-90, 2), (-135, 1), (-22.5, 3), (-22.4, 0),
])
def test_quantization_bins(deg, expected):
    assert quantize_orientation(np.array([math.radians(deg)]))[0] == expected


def test_single_pixel_survives():
    mag = np.zeros((5, 5))
    mag[2, 2] = 7
    for theta in (0, math.pi / 4, math.pi / 2, 3 * math.pi / 4):
        out = non_max_suppression(GradientField(mag.copy(), np.full((5, 5), theta)))
        assert out[2, 2] == 7 and np.count_nonzero(out) == 1


def test_ramp_along_x():
    # 1 < 2 < 3 along the gradient direction: only the end pixel is a local maximum
    out = non_max_suppression(GradientField(np.array([[1.0, 2.0, 3.0]]), np.zeros((1, 3))))
    assert out.tolist() == [[0.0, 0.0, 3.0]]


def test_plateau_survives():
    out = non_max_suppression(GradientField(np.full((1, 4), 5.0), np.zeros((1, 4))))
    assert out.tolist() == [[5.0] * 4]


def test_diagonal_direction():
    # I = row + col increases toward the lower right; its ridge of magnitude runs along the anti-diagonal
    img = GrayImage(np.fromfunction(lambda r, c: 10.0 * (r + c), (6, 6)))
    f = gradient(img, *KernelSpec().pair())
    assert np.all(quantize_orientation(f.orientation)[1:-1, 1:-1] == 1)


@given(planes, st.sampled_from([0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, -math.pi / 3]))
def test_nms_matches_oracle(mag, theta):
    field = GradientField(mag.copy(), np.full(mag.shape, theta))
    expected = nms_oracle(mag, quantize_orientation(field.orientation))
    assert np.array_equal(non_max_suppression(field), expected)


@given(planes)
def test_nms_thinness(mag):
    bins = np.random.default_rng(0).integers(0, 4, mag.shape)
    theta = np.radians(bins * 45.0)
    out = non_max_suppression(GradientField(mag.copy(), theta))
    offs = [(0, 1), (1, 1), (1, 0), (1, -1)]
    h, w = mag.shape
    for y, x in zip(*np.nonzero(out)):
        dy, dx = offs[int(quantize_orientation(theta[y:y + 1, x])[0])]
        for sy, sx in ((y + dy, x + dx), (y - dy, x - dx)):
            if 0 <= sy < h and 0 <= sx < w:
                assert mag[sy, sx] <= mag[y, x]


def test_hysteresis_examples():
    plane = np.zeros((5, 5))
    plane[2, 2] = 200
    assert np.array_equal(hysteresis(plane, 150, 50).mask, plane > 0)
    plane[3, 3] = 80  # weak, diagonal to the strong pixel
    assert hysteresis(plane, 150, 50).mask[3, 3]
    blob = np.zeros((5, 5))
    blob[0:2, 0:2] = 80
    assert hysteresis(blob, 150, 50).count() == 0
    with pytest.raises(FilterError):
        hysteresis(plane, 10, 20)


@given(planes, st.sampled_from([40.0, 60.0, 100.0]), st.sampled_from([0.0, 10.0, 40.0]))
def test_hysteresis_matches_fixpoint(plane, high, low):
    assert np.array_equal(hysteresis(plane, high, low).mask, hysteresis_oracle(plane, high, low))


@given(planes)
def test_hysteresis_subset_of_low_threshold(plane):
    out = hysteresis(plane, 60.0, 10.0).mask
    assert not np.any(out & ~(plane >= 10.0))


def test_long_chain_no_recursion_limit():
    plane = np.full((1, 200_000), 60.0)
    plane[0, 0] = 200
    assert hysteresis(plane, 150, 50).count() == 200_000


def test_constant_image():
    assert canny(GrayImage(np.full((10, 10), 128.0))).count() == 0


def test_step_gives_one_pixel_line():
    # midpoint column 6 holds 127.5, so the 3x3 response peaks there alone
    img = vertical_step(height=10, width=14, at=6, midpoint=True)
    edges = canny(img, CannyConfig(smooth=False)).mask
    assert np.array_equal(np.flatnonzero(edges.any(axis=0)), [6])
    assert edges[:, 6].all()
    smoothed = canny(img).mask
    assert np.array_equal(np.flatnonzero(smoothed.any(axis=0)), [6])


def test_exact_step_ties_both_sides():
    # without a midpoint the two columns beside the step have equal magnitude; ties survive
    edges = canny(vertical_step(), CannyConfig(smooth=False)).mask
    assert np.array_equal(np.flatnonzero(edges.any(axis=0)), [5, 6])


def test_extended_7x7_step_location():
    img = vertical_step(height=12, width=24, at=12, midpoint=True)
    edges = canny(img, CannyConfig(kernel=KernelSpec("extended", 7))).mask
    cols = np.flatnonzero(edges.any(axis=0))
    assert cols.size > 0 and edges.any(axis=1).all()
    assert np.all(np.abs(cols - 12) <= 3)


def test_image_threshold_source(rng):
    img = GrayImage(rng.uniform(0, 100, (16, 16)))
    grad_mode = canny(img, CannyConfig(kernel=KernelSpec("extended", 5)))
    img_mode = canny(img, CannyConfig(kernel=KernelSpec("extended", 5), threshold_source="image"))
    # image peak < 100 while the normalized magnitude peaks at 255: lower thresholds, superset of edges
    assert np.all(img_mode.mask[grad_mode.mask])
    assert img_mode.count() >= grad_mode.count()


def test_canny_edges_within_low_threshold(rng):
    img = GrayImage(rng.uniform(0, 255, (20, 20)))
    cfg = CannyConfig(kernel=KernelSpec("extended", 9))
    out = canny(img, cfg).mask
    assert out.any()
