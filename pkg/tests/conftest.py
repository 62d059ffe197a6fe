import numpy as np
import pytest
from hypothesis import settings

from edgekit.evaluation import Sample
from edgekit.image import EdgeMap, GrayImage

settings.register_profile("ci", max_examples=200, deadline=None)
settings.register_profile("dev", max_examples=50, deadline=None)
settings.register_profile("fast", max_examples=10, deadline=None)
settings.load_profile("dev")


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion of the build")
    config._acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    results = item.config._acceptance
    passed = report.passed if report.when == "call" else not report.failed
    prev = results.get(number, (title, True))
    results[number] = (title, prev[1] and passed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config._acceptance
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def vertical_step(height=8, width=12, at=6, midpoint=False):
    """0 left of column ``at``, 255 from it on; ``midpoint`` puts 127.5 in column ``at``."""
    data = np.zeros((height, width))
    data[:, at:] = 255.0
    if midpoint:
        data[:, at] = 127.5
    return GrayImage(data)


@pytest.fixture
def toy_dataset():
    """Three 1x6 images whose score is their own intensity; counts are worked out in test_evaluation."""
    def sample(name, values, truth):
        gt = np.zeros((1, 6), dtype=bool)
        gt[0, truth] = True
        return Sample(name, GrayImage(np.array([values], dtype=float)), (EdgeMap.from_mask(gt),))

    return [
        sample("a", [0, 60, 120, 250, 0, 0], [2, 3]),
        sample("b", [210, 0, 110, 0, 55, 0], [0, 4]),
        sample("c", [0, 0, 0, 150, 150, 0], [3, 4, 5]),
    ]
