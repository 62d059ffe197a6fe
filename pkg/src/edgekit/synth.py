"""Synthetic scenes with annotated region boundaries, laid out like a BSDS-style dataset.

Each scene is a Voronoi partition into regions of distinct mean intensity with
smooth shading, region texture, an unannotated finer patterning, small
unannotated details, optical blur plus per-region defocus, and sensor noise.
Default frame size matches BSDS500 (481x321). Several simulated annotators each mark the region boundaries,
skipping some of the low-contrast ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .image import EdgeMap, GrayImage, save_image


@dataclass(frozen=True)
class SceneParams:
    height: int = 321
    width: int = 481
    regions: tuple[int, int] = (8, 24)
    blur_sigma: tuple[float, float] = (0.5, 1.5)
    # each region gets its own blur scale (depth of field); 0 disables
    defocus: tuple[float, float] = (0.0, 4.0)
    noise_sigma: tuple[float, float] = (3.0, 8.0)
    texture_amplitude: tuple[float, float] = (5.0, 30.0)
    details: tuple[int, int] = (30, 80)
    # fine unannotated partition overlaid on the scene (surface patterning)
    clutter_cells: tuple[int, int] = (40, 120)
    clutter_contrast: float = 20.0
    annotators: tuple[int, int] = (3, 5)
    # region pairs whose mean contrast falls below this are marked by roughly half the annotators
    faint_contrast: float = 30.0


def _voronoi_labels(rng: np.random.Generator, h: int, w: int, n: int) -> np.ndarray:
    seeds = rng.uniform((0, 0), (h, w), size=(n, 2))
    rows, cols = np.mgrid[0:h, 0:w]
    # anisotropic metric per seed gives less regular cells
    stretch = rng.uniform(0.6, 1.6, size=(n, 2))
    d = ((rows[None] - seeds[:, 0, None, None]) * stretch[:, 0, None, None]) ** 2 + (
        (cols[None] - seeds[:, 1, None, None]) * stretch[:, 1, None, None]
    ) ** 2
    return np.argmin(d, axis=0)


def _boundary_pairs(labels: np.ndarray) -> dict[tuple[int, int], np.ndarray]:
    """One-pixel-wide boundary masks keyed by the (smaller, larger) region pair."""
    h, w = labels.shape
    pairs: dict[tuple[int, int], np.ndarray] = {}
    right = labels[:, :-1] != labels[:, 1:]
    down = labels[:-1, :] != labels[1:, :]
    for r, c in zip(*np.nonzero(right)):
        key = tuple(sorted((int(labels[r, c]), int(labels[r, c + 1]))))
        pairs.setdefault(key, np.zeros((h, w), dtype=bool))[r, c] = True
    for r, c in zip(*np.nonzero(down)):
        key = tuple(sorted((int(labels[r, c]), int(labels[r + 1, c]))))
        pairs.setdefault(key, np.zeros((h, w), dtype=bool))[r, c] = True
    return pairs


def _defocus(scene: np.ndarray, labels: np.ndarray, sigmas: np.ndarray) -> np.ndarray:
    """Spatially varying blur: per-pixel blend between a ladder of Gaussian blurs."""
    sigma_map = ndimage.gaussian_filter(sigmas[labels], 3.0, mode="nearest")
    levels = np.linspace(0.0, sigmas.max(), 6)
    stack = np.stack([scene if s == 0 else ndimage.gaussian_filter(scene, s, mode="nearest") for s in levels])
    pos = np.clip(np.interp(sigma_map, levels, np.arange(levels.size)), 0, levels.size - 1)
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, levels.size - 1)
    frac = pos - lo
    pick = lambda idx: np.take_along_axis(stack, idx[None], axis=0)[0]
    return (1 - frac) * pick(lo) + frac * pick(hi)


def generate_scene(rng: np.random.Generator, params: SceneParams = SceneParams()):
    """Return ``(image, ground_truths)`` for one random scene."""
    h, w = params.height, params.width
    n = int(rng.integers(params.regions[0], params.regions[1] + 1))
    labels = _voronoi_labels(rng, h, w, n)

    means = rng.uniform(35, 220, size=n)
    rows, cols = np.mgrid[0:h, 0:w] / max(h, w)
    scene = np.zeros((h, w))
    for k in range(n):
        region = labels == k
        slope = rng.normal(0, 25, size=2)
        amp = rng.uniform(*params.texture_amplitude)
        texture = ndimage.gaussian_filter(rng.normal(0, 1, size=(h, w)), rng.uniform(0.6, 1.5))
        texture *= amp / max(texture.std(), 1e-9)
        scene[region] = (means[k] + slope[0] * rows + slope[1] * cols + texture)[region]

    n_cells = int(rng.integers(params.clutter_cells[0], params.clutter_cells[1] + 1))
    if n_cells > 1:
        cells = _voronoi_labels(rng, h, w, n_cells)
        scene += rng.uniform(-params.clutter_contrast, params.clutter_contrast, size=n_cells)[cells]

    # unannotated detail: small faint blobs and strokes inside regions
    for _ in range(int(rng.integers(params.details[0], params.details[1] + 1))):
        r0, c0 = rng.uniform((0, 0), (h, w))
        contrast = rng.uniform(-35, 35)
        if rng.random() < 0.5:
            radius = rng.uniform(1.5, 5)
            blob = (np.mgrid[0:h, 0:w][0] - r0) ** 2 + (np.mgrid[0:h, 0:w][1] - c0) ** 2 <= radius**2
            scene[blob] += contrast
        else:
            angle = rng.uniform(0, np.pi)
            length = rng.uniform(8, 30)
            t = np.linspace(0, length, int(length * 2))
            rr = np.clip(np.round(r0 + t * np.sin(angle)).astype(int), 0, h - 1)
            cc = np.clip(np.round(c0 + t * np.cos(angle)).astype(int), 0, w - 1)
            scene[rr, cc] += contrast

    scene = ndimage.gaussian_filter(scene, rng.uniform(*params.blur_sigma), mode="nearest")
    if params.defocus[1] > 0:
        scene = _defocus(scene, labels, rng.uniform(*params.defocus, size=n))
    scene += rng.normal(0, rng.uniform(*params.noise_sigma), size=(h, w))
    image = GrayImage(np.clip(np.round(scene), 0, 255))

    pairs = _boundary_pairs(labels)
    n_annot = int(rng.integers(params.annotators[0], params.annotators[1] + 1))
    truths = []
    for _ in range(n_annot):
        mask = np.zeros((h, w), dtype=bool)
        for (a, b), boundary in sorted(pairs.items()):
            faint = abs(means[a] - means[b]) < params.faint_contrast
            if not faint or rng.random() < 0.5:
                mask |= boundary
        truths.append(EdgeMap.from_mask(mask))
    return image, truths


def write_dataset(root, count: int, seed: int = 0, params: SceneParams = SceneParams(), fmt: str = "png") -> Path:
    """Write ``count`` scenes as ``<root>/images/NNNN.<fmt>`` plus ``<root>/groundtruth/NNNN/aK.<fmt>``."""
    root = Path(root)
    (root / "images").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    for i in range(count):
        image, truths = generate_scene(rng, params)
        stem = f"{i:04d}"
        save_image(root / "images" / f"{stem}.{fmt}", image)
        gt_dir = root / "groundtruth" / stem
        gt_dir.mkdir(parents=True, exist_ok=True)
        for k, gt in enumerate(truths):
            save_image(gt_dir / f"a{k}.{fmt}", gt)
    return root


def generate_dataset(count: int, seed: int = 0, params: SceneParams = SceneParams()):
    """In-memory variant of :func:`write_dataset` returning evaluation samples."""
    from .evaluation import Dataset, Sample

    rng = np.random.default_rng(seed)
    samples = []
    for i in range(count):
        image, truths = generate_scene(rng, params)
        samples.append(Sample(f"{i:04d}", image, tuple(truths)))
    return Dataset(f"synthetic-{seed}", samples)
