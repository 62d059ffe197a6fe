"""Exit criteria of the build, one test (or group) per criterion.

Run ``pytest tests/test_acceptance.py`` to get a PASS/FAIL line per criterion
in the terminal summary.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from edgekit.canny import CannyConfig, double_threshold, hysteresis
from edgekit.cli import main
from edgekit.evaluation import ConfusionCounts, compare_filters, match_edges, prf
from edgekit.filtering import convolve
from edgekit.image import EdgeMap, GrayImage
from edgekit.kernels import COMPARISON_FAMILIES, EXTENDED_SIZES, KernelSpec, extended_sobel
from edgekit.pipeline import PipelineConfig, detect_edges_sweep
from edgekit.synth import SceneParams, generate_dataset, write_dataset
from oracles import correlate_oracle, hysteresis_oracle

acceptance = pytest.mark.acceptance

# coefficients as printed for the zero-dilated 5x5 and 7x7 pair
GOLDEN = {
    (5, "x"): [
        [1, 0, 0, 0, -1],
        [0, 0, 0, 0, 0],
        [2, 0, 0, 0, -2],
        [0, 0, 0, 0, 0],
        [1, 0, 0, 0, -1],
    ],
    (5, "y"): [
        [1, 0, 2, 0, 1],
        [0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0],
        [-1, 0, -2, 0, -1],
    ],
    (7, "x"): [
        [1, 0, 0, 0, 0, 0, -1],
        [0] * 7,
        [0] * 7,
        [2, 0, 0, 0, 0, 0, -2],
        [0] * 7,
        [0] * 7,
        [1, 0, 0, 0, 0, 0, -1],
    ],
    (7, "y"): [
        [1, 0, 0, 2, 0, 0, 1],
        [0] * 7,
        [0] * 7,
        [0] * 7,
        [0] * 7,
        [0] * 7,
        [-1, 0, 0, -2, 0, 0, -1],
    ],
}

ALL_KERNELS = [KernelSpec("extended", n).kernel(a) for n in EXTENDED_SIZES for a in "xy"] + [
    KernelSpec(f, 5).kernel(a) for f in COMPARISON_FAMILIES for a in "xy"
]


@acceptance(1, "extended 5x5/7x7 kernels match the printed matrices")
@pytest.mark.parametrize("size,axis", sorted(GOLDEN))
def test_kernel_golden(size, axis):
    coeffs = extended_sobel(size, axis).coeffs
    assert coeffs.dtype.kind == "f" and np.all(coeffs == np.round(coeffs))
    assert coeffs.astype(int).tolist() == GOLDEN[(size, axis)]


@acceptance(2, "convolve equals the quadruple-loop oracle bit-exactly")
def test_convolution_oracle():
    assert len(ALL_KERNELS) == 22
    rng = np.random.default_rng(2)
    correlate_oracle(np.zeros((2, 2)), np.zeros((3, 3)))  # compile outside the timed region
    start = time.perf_counter()
    for _ in range(1000):
        h, w = rng.integers(1, 33, size=2)
        image = GrayImage(rng.uniform(0, 255, size=(h, w)))
        for kernel in ALL_KERNELS:
            got = convolve(image, kernel)
            want = correlate_oracle(image.data, kernel.coeffs)
            assert np.array_equal(got, want), (kernel.name, kernel.axis, h, w)
    assert time.perf_counter() - start < 30


@acceptance(3, "F1 identities over 10^4 random confusion counts")
def test_metric_identities():
    rng = np.random.default_rng(3)
    start = time.perf_counter()
    for tp, fp, fn in rng.integers(0, 10**6, size=(10**4, 3)):
        c = ConfusionCounts(int(tp), int(fp), int(fn))
        r = prf(c)
        denom = 2 * c.tp + c.fp + c.fn
        assert r.f1 == pytest.approx(2 * c.tp / denom if denom else 0.0, abs=1e-12)
        if r.precision + r.recall > 0:
            assert abs(r.f1 - 2 * r.precision * r.recall / (r.precision + r.recall)) <= 1e-12
    # boundary cases: zero counts on each side
    for tp, fp, fn in [(0, 0, 0), (0, 5, 0), (0, 0, 5), (5, 0, 0), (0, 3, 4)]:
        assert prf(ConfusionCounts(tp, fp, fn)).f1 == (2 * tp / (2 * tp + fp + fn) if tp else 0.0)
    assert time.perf_counter() - start < 1


def _ulp_close(computed: float, a: float, b: float) -> bool:
    exact = Fraction(a) * Fraction(b)
    return abs(Fraction(computed) - exact) <= Fraction(math.ulp(computed))


@acceptance(4, "double threshold (178.5, 53.55) and one-ulp property")
def test_double_threshold():
    config = CannyConfig()
    assert double_threshold(255.0, config) == (178.5, 53.55)
    rng = np.random.default_rng(4)
    for m in rng.uniform(0, 1e6, size=1000):
        high, low = double_threshold(float(m), config)
        assert _ulp_close(high, float(m), config.high_ratio)
        assert _ulp_close(low, high, config.low_ratio)


@acceptance(5, "hysteresis equals the flood-fill fixpoint oracle")
def test_hysteresis_oracle():
    rng = np.random.default_rng(5)
    for _ in range(500):
        h, w = rng.integers(1, 11, size=2)
        plane = rng.uniform(0, 255, size=(h, w)) * (rng.random((h, w)) < rng.uniform(0.2, 0.9))
        high = float(rng.uniform(0, 255))
        low = float(rng.choice([0.0, high, rng.uniform(0, high)]))
        got = hysteresis(plane, high, low).mask
        assert np.array_equal(got, hysteresis_oracle(plane, high, low))


@acceptance(6, "monotone sweep counts and tolerance matching")
@settings(max_examples=100, deadline=None)
@given(
    hnp.arrays(np.float64, st.tuples(st.integers(3, 16), st.integers(3, 16)), elements=st.floats(0, 255)),
    st.sampled_from(EXTENDED_SIZES),
)
def test_sweep_monotone(data, size):
    maps = detect_edges_sweep(GrayImage(data), PipelineConfig(kernel=KernelSpec("extended", size)),
                              list(range(0, 256, 15)))
    whites = [m.count() for m in maps]
    assert all(a >= b for a, b in zip(whites, whites[1:]))


@acceptance(6, "monotone sweep counts and tolerance matching")
@settings(max_examples=200, deadline=None)
@given(st.data())
def test_tolerance_monotone(data):
    shape = data.draw(st.tuples(st.integers(1, 14), st.integers(1, 14)))
    cand = data.draw(hnp.arrays(bool, shape))
    gts = data.draw(st.lists(hnp.arrays(bool, shape), min_size=1, max_size=3))
    prev = None
    for tol in range(5):
        c = match_edges(EdgeMap.from_mask(cand), [EdgeMap.from_mask(g) for g in gts], tol)
        if prev is not None:
            assert c.tp >= prev.tp and c.fp <= prev.fp and c.fn <= prev.fn
        prev = c


@pytest.fixture(scope="module")
def trend_sample():
    return generate_dataset(10, seed=0)


def _f1_by_size(dataset, mode):
    specs = [KernelSpec("extended", n) for n in EXTENDED_SIZES]
    reports = compare_filters(dataset, specs, mode=mode, jobs=4)
    scores = {n: r.overall.f1 for n, r in zip(EXTENDED_SIZES, reports)}
    print(f"\n{mode}: " + "  ".join(f"{n}x{n}={f:.4f}" for n, f in scores.items()))
    return scores


@acceptance(7, "threshold mode: 5x5..9x9 beat 3x3, 15x15 below the peak")
@pytest.mark.slow
def test_threshold_trend(trend_sample):
    start = time.perf_counter()
    f1 = _f1_by_size(trend_sample, "threshold")
    assert time.perf_counter() - start < 120
    for n in (5, 7, 9):
        assert f1[n] > f1[3], n
    assert f1[15] < max(f1.values())


@acceptance(8, "canny mode: 7x7 and 9x9 beat 3x3")
@pytest.mark.slow
def test_canny_trend(trend_sample):
    start = time.perf_counter()
    f1 = _f1_by_size(trend_sample, "canny")
    assert time.perf_counter() - start < 120
    assert f1[7] > f1[3]
    assert f1[9] > f1[3]


@pytest.fixture(scope="module")
def bench_set(tmp_path_factory):
    params = SceneParams(height=96, width=128)
    return write_dataset(tmp_path_factory.mktemp("bench") / "synth", 6, seed=9, params=params)


def _bench_outputs(root, out, mode, jobs, listing=None):
    argv = ["bench", str(root), "--mode", mode, "--jobs", str(jobs), "--out", str(out)]
    if listing is not None:
        argv += ["--images-list", str(listing)]
    assert main(argv) == 0
    csv = (out / f"synth_{mode}.csv").read_bytes()
    doc = json.loads((out / f"synth_{mode}.json").read_text())
    doc["manifest"].pop("runtime")
    return csv, doc


@acceptance(9, "bench reports identical across runs, jobs and listing order")
@pytest.mark.parametrize("mode", ["threshold", "canny"])
def test_bench_determinism(bench_set, tmp_path, mode):
    start = time.perf_counter()
    listing = tmp_path / "listing.txt"
    listing.write_text("\n".join(["0003", "0000", "0005", "0001", "0004", "0002"]) + "\n")
    base = _bench_outputs(bench_set, tmp_path / "a", mode, 1)
    assert _bench_outputs(bench_set, tmp_path / "b", mode, 1) == base
    assert _bench_outputs(bench_set, tmp_path / "c", mode, 4) == base
    assert _bench_outputs(bench_set, tmp_path / "d", mode, 3, listing) == base
    assert time.perf_counter() - start < 60
