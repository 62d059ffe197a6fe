"""Zero-dilated extended Sobel edge detection, Canny, and a boundary benchmark harness."""

__version__ = "0.1.0"

from .canny import CannyConfig, canny, double_threshold, hysteresis, non_max_suppression
from .evaluation import (
    ConfusionCounts,
    EvalReport,
    PRF,
    compare_filters,
    evaluate_filter,
    load_dataset,
    match_edges,
    prf,
)
from .filtering import GradientField, convolve, gaussian_blur, gradient, normalize_magnitude
from .image import EdgeMap, GrayImage, load_image, max_intensity, save_image, to_grayscale
from .kernels import Kernel, KernelSpec, comparison_kernel, extended_sobel, kernel_dump, sobel_3x3
from .pipeline import PipelineConfig, detect_edges, detect_edges_sweep

__all__ = [
    "CannyConfig", "ConfusionCounts", "EdgeMap", "EvalReport", "GradientField", "GrayImage",
    "Kernel", "KernelSpec", "PRF", "PipelineConfig", "canny", "compare_filters",
    "comparison_kernel", "convolve", "detect_edges", "detect_edges_sweep", "double_threshold",
    "evaluate_filter", "extended_sobel", "gaussian_blur", "gradient", "hysteresis",
    "kernel_dump", "load_dataset", "load_image", "match_edges", "max_intensity",
    "non_max_suppression", "normalize_magnitude", "prf", "save_image", "sobel_3x3",
    "to_grayscale",
]
