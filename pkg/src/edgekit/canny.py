"""Canny edge detection with pluggable gradient kernels.

Thresholds follow the ratio rule ``T_h = max * high_ratio``, ``T_l = T_h * low_ratio``
(0.7 and 0.3 by default). ``max`` is the peak of the gradient magnitude plane
that feeds non-maximum suppression; ``threshold_source="image"`` uses the
source image's peak intensity instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .filtering import GradientField, FilterError, gaussian_blur, gradient, normalize_magnitude
from .image import EdgeMap, GrayImage, max_intensity
from .kernels import KernelSpec

THRESHOLD_SOURCES = ("gradient", "image")

# (drow, dcol) of one neighbour along each quantized gradient direction: 0, 45, 90, 135 degrees
_DIRECTION_OFFSETS = ((0, 1), (1, 1), (1, 0), (1, -1))
_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class CannyConfig:
    kernel: KernelSpec = field(default_factory=KernelSpec)
    sigma: float = 1.4
    gaussian_ksize: int = 5
    high_ratio: float = 0.7
    low_ratio: float = 0.3
    threshold_source: str = "gradient"
    smooth: bool = True

    def __post_init__(self):
        for name in ("high_ratio", "low_ratio"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise FilterError(f"{name} must lie in (0, 1], got {value}")
        if self.threshold_source not in THRESHOLD_SOURCES:
            raise FilterError(
                f"threshold_source must be one of {THRESHOLD_SOURCES}, got {self.threshold_source!r}"
            )
        if not self.sigma > 0:
            raise FilterError(f"sigma must be positive, got {self.sigma}")
        if self.gaussian_ksize < 1 or self.gaussian_ksize % 2 == 0:
            raise FilterError(f"gaussian ksize must be a positive odd integer, got {self.gaussian_ksize}")


def double_threshold(max_magnitude: float, config: CannyConfig = CannyConfig()) -> tuple[float, float]:
    if max_magnitude < 0:
        raise FilterError(f"maximum magnitude must be non-negative, got {max_magnitude}")
    high = max_magnitude * config.high_ratio
    return high, high * config.low_ratio


def quantize_orientation(orientation: np.ndarray) -> np.ndarray:
    """Map angles to direction bins 0..3 (0, 45, 90, 135 degrees), nearest bin.

    An angle exactly halfway between two bins goes to the lower one.
    """
    deg = np.mod(np.degrees(orientation), 180.0)
    return (np.ceil((deg - 22.5) / 45.0).astype(np.int64)) % 4


def non_max_suppression(field: GradientField) -> np.ndarray:
    """Zero every pixel whose magnitude is below either neighbour along its gradient direction.

    Ties survive. Neighbours outside the image count as 0.
    """
    mag = field.magnitude
    h, w = mag.shape
    padded = np.pad(mag, 1, mode="constant", constant_values=0.0)
    bins = quantize_orientation(field.orientation)
    keep = np.zeros((h, w), dtype=bool)
    for b, (dr, dc) in enumerate(_DIRECTION_OFFSETS):
        ahead = padded[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]
        behind = padded[1 - dr : 1 - dr + h, 1 - dc : 1 - dc + w]
        keep |= (bins == b) & (mag >= ahead) & (mag >= behind)
    return np.where(keep, mag, 0.0)


def hysteresis(suppressed: np.ndarray, high: float, low: float) -> EdgeMap:
    """Keep strong pixels (>= high) and weak ones (>= low) 8-connected to a strong pixel.

    Suppressed (zero) pixels are never edges, even when ``low`` is 0.
    """
    if low > high:
        raise FilterError(f"low threshold {low} exceeds high threshold {high}")
    plane = np.asarray(suppressed, dtype=np.float64)
    candidate = (plane > 0) & (plane >= low)
    strong = candidate & (plane >= high)
    if not strong.any():
        return EdgeMap.from_mask(np.zeros(plane.shape, dtype=bool))
    # component labelling replaces a recursive flood fill: no stack-depth limit
    labels, _ = ndimage.label(candidate, structure=_EIGHT_CONNECTED)
    seeded = np.unique(labels[strong])
    return EdgeMap.from_mask(np.isin(labels, seeded) & candidate)


def canny(image: GrayImage, config: CannyConfig = CannyConfig()) -> EdgeMap:
    smoothed = gaussian_blur(image, config.sigma, config.gaussian_ksize) if config.smooth else image
    kx, ky = config.kernel.pair()
    field = gradient(smoothed, kx, ky)
    # rescale to [0, 255] so the "image" threshold source is on the same scale
    magnitude = normalize_magnitude(field).data
    field = GradientField(magnitude.copy(), field.orientation.copy())
    if config.threshold_source == "gradient":
        peak = float(magnitude.max())
    else:
        peak = max_intensity(image)
    high, low = double_threshold(peak, config)
    return hysteresis(non_max_suppression(field), high, low)
