"""Correlation with replicate borders, Gaussian smoothing and gradient magnitude/orientation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import MAX_VALUE, GrayImage
from .kernels import Kernel


# peaks below this are floating-point residue (e.g. a blurred constant image), not edges
MAGNITUDE_FLOOR = 1e-9


class FilterError(ValueError):
    pass


def correlate(data: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Correlate a 2-D array with an odd square kernel, clamping coordinates at the border.

    Zero coefficients are skipped, so a dilated kernel costs its nonzero taps
    only. Taps are accumulated in row-major kernel order; every output pixel
    sees the same summation sequence.
    """
    data = np.asarray(data, dtype=np.float64)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    n = coeffs.shape[0]
    if coeffs.ndim != 2 or coeffs.shape[1] != n or n % 2 == 0:
        raise FilterError(f"kernel must be square with odd size, got shape {coeffs.shape}")
    c = n // 2
    h, w = data.shape
    padded = np.pad(data, c, mode="edge")
    out = np.zeros((h, w))
    for i in range(n):
        for j in range(n):
            weight = coeffs[i, j]
            if weight != 0.0:
                out += weight * padded[i : i + h, j : j + w]
    return out


def convolve(image: GrayImage, kernel: Kernel) -> np.ndarray:
    """Response plane of ``kernel`` applied (as correlation, no flip) to ``image``."""
    return correlate(image.data, kernel.coeffs)


def gaussian_kernel(sigma: float, ksize: int) -> np.ndarray:
    if not sigma > 0:
        raise FilterError(f"sigma must be positive, got {sigma}")
    if ksize < 1 or ksize % 2 == 0:
        raise FilterError(f"gaussian ksize must be a positive odd integer, got {ksize}")
    r = np.arange(ksize) - ksize // 2
    g = np.exp(-(r[:, None] ** 2 + r[None, :] ** 2) / (2.0 * sigma * sigma))
    return g / g.sum()


def gaussian_blur(image: GrayImage, sigma: float = 1.4, ksize: int = 5) -> GrayImage:
    smoothed = correlate(image.data, gaussian_kernel(sigma, ksize))
    return GrayImage(np.clip(smoothed, 0.0, MAX_VALUE))


@dataclass(frozen=True, eq=False)
class GradientField:
    """Per-pixel gradient magnitude (>= 0) and orientation in (-pi, pi]."""

    magnitude: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        if self.magnitude.shape != self.orientation.shape:
            raise FilterError("magnitude and orientation planes differ in shape")
        for arr in (self.magnitude, self.orientation):
            arr.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.magnitude.shape

    @property
    def width(self) -> int:
        return self.shape[1]

    @property
    def height(self) -> int:
        return self.shape[0]

    @classmethod
    def from_responses(cls, gx, gy) -> "GradientField":
        gx = np.asarray(gx, dtype=np.float64)
        gy = np.asarray(gy, dtype=np.float64)
        theta = np.arctan2(gy, gx)
        # -0.0 or a tiny negative rounding residual in gy yields exactly -pi
        theta[theta <= -np.pi] = np.pi
        return cls(np.sqrt(gx * gx + gy * gy), theta)


def gradient(image: GrayImage, kx: Kernel, ky: Kernel) -> GradientField:
    if kx.axis != "x" or ky.axis != "y":
        raise FilterError(f"expected an x and a y kernel, got {kx.axis} and {ky.axis}")
    if kx.size != ky.size:
        raise FilterError(f"kernel sizes differ: {kx.size} vs {ky.size}")
    return GradientField.from_responses(convolve(image, kx), convolve(image, ky))


def normalize_magnitude(field: GradientField) -> GrayImage:
    """Scale magnitudes linearly so the maximum becomes exactly 255.

    A field whose peak is below ``MAGNITUDE_FLOOR`` maps to all zeros.
    """
    mag = field.magnitude
    peak = mag.max()
    if peak < MAGNITUDE_FLOOR:
        return GrayImage(np.zeros_like(mag))
    out = mag * (MAX_VALUE / peak)
    out[mag == peak] = MAX_VALUE
    return GrayImage(np.clip(out, 0.0, MAX_VALUE))
