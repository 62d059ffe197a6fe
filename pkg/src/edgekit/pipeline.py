"""Thresholded edge detector: gray image -> Gaussian -> gradient magnitude -> binary threshold."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .filtering import FilterError, gaussian_blur, gradient, normalize_magnitude
from .image import MAX_VALUE, EdgeMap, GrayImage
from .kernels import KernelSpec


@dataclass(frozen=True)
class PipelineConfig:
    kernel: KernelSpec = field(default_factory=KernelSpec)
    sigma: float = 1.4
    gaussian_ksize: int = 5
    threshold: float = 100.0
    # False skips the Gaussian step entirely
    smooth: bool = True

    def __post_init__(self):
        if not 0 <= self.threshold <= MAX_VALUE:
            raise FilterError(f"threshold must lie in [0, 255], got {self.threshold}")
        if not self.sigma > 0:
            raise FilterError(f"sigma must be positive, got {self.sigma}")
        if self.gaussian_ksize < 1 or self.gaussian_ksize % 2 == 0:
            raise FilterError(f"gaussian ksize must be a positive odd integer, got {self.gaussian_ksize}")

    def with_threshold(self, threshold: float) -> "PipelineConfig":
        return replace(self, threshold=threshold)


def default_thresholds() -> list[int]:
    """Integer levels 1..255; 0 is left out because it marks every pixel."""
    return list(range(1, MAX_VALUE + 1))


def edge_strength(image: GrayImage, config: PipelineConfig) -> GrayImage:
    """Gradient magnitude rescaled to [0, 255] (pipeline steps 2 and 3)."""
    if config.smooth:
        image = gaussian_blur(image, config.sigma, config.gaussian_ksize)
    kx, ky = config.kernel.pair()
    return normalize_magnitude(gradient(image, kx, ky))


def threshold_edges(strength: GrayImage, threshold: float) -> EdgeMap:
    """Pixels at or above ``threshold`` become 255, the rest 0."""
    return EdgeMap.from_mask(strength.data >= threshold)


def detect_edges(image: GrayImage, config: PipelineConfig) -> EdgeMap:
    return threshold_edges(edge_strength(image, config), config.threshold)


def detect_edges_sweep(
    image: GrayImage, config: PipelineConfig, thresholds: Sequence[float]
) -> list[EdgeMap]:
    """Edge maps for several thresholds from a single gradient computation."""
    thresholds = list(thresholds)
    if not thresholds:
        raise FilterError("threshold list is empty")
    bad = [t for t in thresholds if not 0 <= t <= MAX_VALUE]
    if bad:
        raise FilterError(f"thresholds outside [0, 255]: {bad[:5]}")
    strength = edge_strength(image, config)
    return [threshold_edges(strength, t) for t in thresholds]

