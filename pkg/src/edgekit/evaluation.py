"""Ground-truth matching, precision/recall/F1 and threshold-sweep benchmarking.

Matching is tolerant but not one-to-one: a candidate edge pixel is a true
positive when some ground-truth boundary pixel (from any annotator) lies within
Chebyshev distance ``tolerance``; a ground-truth pixel of the annotators' union
is a false negative when no candidate lies that close. This approximates the
BSDS correspondence step without its bipartite assignment.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from .image import EdgeMap, GrayImage, ImageError, load_edge_map, load_image

IMAGE_SUFFIXES = (".pgm", ".png")
BSDS_MAX_DIST = 0.0075

ScoreFn = Callable[[GrayImage], GrayImage]


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        for name in ("tp", "fp", "fn"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise EvaluationError(f"{name} must be a non-negative integer, got {value}")
            object.__setattr__(self, name, int(value))

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float


def prf(counts: ConfusionCounts) -> PRF:
    """Precision, recall and F1; any zero denominator yields 0 rather than NaN."""
    tp, fp, fn = counts.tp, counts.fp, counts.fn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
    return PRF(precision, recall, f1)


def default_tolerance(height: int, width: int) -> int:
    """BSDS-style match radius: 0.75% of the image diagonal, rounded half up."""
    return int(math.floor(BSDS_MAX_DIST * math.hypot(height, width) + 0.5))


def _check_inputs(shape, ground_truths: Sequence[EdgeMap], tolerance: int) -> np.ndarray:
    if not ground_truths:
        raise EvaluationError("at least one ground-truth map is required")
    if tolerance < 0 or int(tolerance) != tolerance:
        raise EvaluationError(f"tolerance must be a non-negative integer, got {tolerance}")
    for gt in ground_truths:
        if gt.shape != shape:
            raise EvaluationError(f"ground truth shape {gt.shape} differs from candidate {shape}")
    union = np.zeros(shape, dtype=bool)
    for gt in ground_truths:
        union |= gt.mask
    return union


def _near(mask: np.ndarray, tolerance: int) -> np.ndarray:
    """Pixels within Chebyshev distance ``tolerance`` of any set pixel of ``mask``."""
    if tolerance == 0:
        return mask.copy()
    return ndimage.maximum_filter(mask, size=2 * tolerance + 1, mode="constant", cval=False)


def match_edges(candidate: EdgeMap, ground_truths: Sequence[EdgeMap], tolerance: int = 0) -> ConfusionCounts:
    union = _check_inputs(candidate.shape, ground_truths, tolerance)
    cand = candidate.mask
    near_gt = _near(union, tolerance)
    near_cand = _near(cand, tolerance)
    tp = int(np.count_nonzero(cand & near_gt))
    fp = int(np.count_nonzero(cand & ~near_gt))
    fn = int(np.count_nonzero(union & ~near_cand))
    return ConfusionCounts(tp, fp, fn)


def sweep_counts(
    strength: GrayImage,
    ground_truths: Sequence[EdgeMap],
    thresholds: Sequence[float],
    tolerance: int = 0,
) -> np.ndarray:
    """``(len(thresholds), 3)`` array of tp/fp/fn for the edge maps ``strength >= t``.

    Gives the same counts as thresholding and calling :func:`match_edges` per
    threshold, but sorts once instead of re-matching for every level.
    """
    score = strength.data
    union = _check_inputs(score.shape, ground_truths, tolerance)
    near_gt = _near(union, tolerance)
    on_gt = np.sort(score[near_gt])
    off_gt = np.sort(score[~near_gt])
    if tolerance == 0:
        best_nearby = score[union]
    else:
        window = 2 * tolerance + 1
        best_nearby = ndimage.maximum_filter(score, size=window, mode="constant", cval=-np.inf)[union]
    best_nearby = np.sort(best_nearby)
    t = np.asarray(thresholds, dtype=np.float64)
    tp = on_gt.size - np.searchsorted(on_gt, t, side="left")
    fp = off_gt.size - np.searchsorted(off_gt, t, side="left")
    fn = np.searchsorted(best_nearby, t, side="left")
    return np.stack([tp, fp, fn], axis=1).astype(np.int64)


# ---------------------------------------------------------------------------
# datasets


@dataclass(frozen=True)
class Sample:
    name: str
    image: GrayImage
    ground_truths: tuple[EdgeMap, ...]


@dataclass
class Dataset:
    name: str
    samples: list[Sample]
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def __len__(self):
        return len(self.samples)


def _image_files(directory: Path) -> list[Path]:
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)


def load_dataset(root, names: Sequence[str] | None = None) -> Dataset:
    """Read ``<root>/images/*`` with masks from ``<root>/groundtruth/<stem>/*``.

    Images that cannot be read or have no ground truth are recorded in
    ``skipped`` instead of aborting the load. ``names`` restricts the load to
    the listed image stems.
    """
    root = Path(root)
    image_dir = root / "images"
    if not image_dir.is_dir():
        raise EvaluationError(f"{root}: no images/ directory")
    files = _image_files(image_dir)
    if names is not None:
        by_stem = {p.stem: p for p in files}
        missing = [n for n in names if n not in by_stem]
        files = [by_stem[n] for n in sorted(set(names)) if n in by_stem]
    else:
        missing = []
    samples, skipped = [], [(n, "not found in images/") for n in sorted(set(missing))]
    for path in files:
        gt_dir = root / "groundtruth" / path.stem
        gt_files = _image_files(gt_dir) if gt_dir.is_dir() else []
        if not gt_files:
            skipped.append((path.name, "no ground truth"))
            continue
        try:
            image = load_image(path)
            gts = tuple(load_edge_map(p) for p in gt_files)
        except ImageError as exc:
            skipped.append((path.name, str(exc)))
            continue
        bad = [p.name for p, g in zip(gt_files, gts) if g.shape != image.shape]
        if bad:
            skipped.append((path.name, f"ground-truth size mismatch: {', '.join(bad)}"))
            continue
        samples.append(Sample(path.stem, image, gts))
    return Dataset(root.name, samples, skipped)


def discover_sets(root) -> list[Path]:
    """``root`` itself if it holds ``images/``, else its subdirectories that do."""
    root = Path(root)
    if (root / "images").is_dir():
        return [root]
    if not root.is_dir():
        raise EvaluationError(f"{root}: not a directory")
    sets = sorted(p for p in root.iterdir() if (p / "images").is_dir())
    if not sets:
        raise EvaluationError(f"{root}: no image sets found")
    return sets


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class ImageResult:
    name: str
    tolerance: int
    best_threshold: float
    best_counts: ConfusionCounts
    best: PRF
    # counts at the dataset-wide best threshold
    ods_counts: ConfusionCounts


@dataclass(frozen=True)
class EvalReport:
    filter: str
    thresholds: tuple[float, ...]
    best_threshold: float
    counts: ConfusionCounts
    overall: PRF
    ois: PRF
    images: tuple[ImageResult, ...]
    tolerance: int | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["thresholds"] = list(self.thresholds)
        d["images"] = [asdict(r) for r in self.images]
        return d


def _best_index(count_rows: np.ndarray, thresholds: np.ndarray) -> int:
    """Row with the highest F1; ties go to the smallest threshold."""
    f1 = np.array([prf(ConfusionCounts(*row)).f1 for row in count_rows])
    ties = np.flatnonzero(f1 == f1.max())
    return int(ties[np.argmin(thresholds[ties])])


def _counts(row) -> ConfusionCounts:
    return ConfusionCounts(*(int(v) for v in row))


def evaluate_filter(
    dataset: Dataset | Sequence[Sample],
    score_fn: ScoreFn,
    thresholds: Sequence[float],
    tolerance: int | None = None,
    name: str = "filter",
    jobs: int = 1,
) -> EvalReport:
    """Sweep ``thresholds`` over ``score_fn`` outputs and pick the dataset-best F1 threshold.

    ``score_fn`` maps an image to an edge-strength plane; the edge map at
    threshold ``t`` is ``strength >= t``. ``tolerance=None`` uses
    :func:`default_tolerance` per image.
    """
    samples = list(dataset.samples if isinstance(dataset, Dataset) else dataset)
    if not samples:
        raise EvaluationError("dataset is empty")
    grid = np.asarray(list(thresholds), dtype=np.float64)
    if grid.size == 0:
        raise EvaluationError("threshold grid is empty")
    # sorted by name so reports do not depend on listing order
    samples.sort(key=lambda s: s.name)
    names = [s.name for s in samples]
    if len(set(names)) != len(names):
        raise EvaluationError("duplicate image names in dataset")

    def run(sample: Sample) -> tuple[int, np.ndarray]:
        tol = default_tolerance(*sample.image.shape) if tolerance is None else tolerance
        return tol, sweep_counts(score_fn(sample.image), sample.ground_truths, grid, tol)

    if jobs > 1 and len(samples) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_image = list(pool.map(run, samples))
    else:
        per_image = [run(s) for s in samples]

    total = np.zeros((grid.size, 3), dtype=np.int64)
    for _, rows in per_image:
        total += rows
    ods = _best_index(total, grid)

    results = []
    ois_total = ConfusionCounts()
    for sample, (tol, rows) in zip(samples, per_image):
        k = _best_index(rows, grid)
        best = _counts(rows[k])
        ois_total = ois_total + best
        results.append(
            ImageResult(sample.name, tol, float(grid[k]), best, prf(best), _counts(rows[ods]))
        )
    overall = _counts(total[ods])
    return EvalReport(
        filter=name,
        thresholds=tuple(float(t) for t in grid),
        best_threshold=float(grid[ods]),
        counts=overall,
        overall=prf(overall),
        ois=prf(ois_total),
        images=tuple(results),
        tolerance=tolerance,
    )


# ---------------------------------------------------------------------------
# filter comparison


MODES = ("threshold", "canny")


def make_score_fn(kernel, mode: str = "threshold", **params) -> ScoreFn:
    """Edge-strength function for one kernel choice.

    ``threshold`` mode yields the normalized gradient magnitude, ``canny`` the
    binary Canny output (so every threshold in 1..255 selects the same map).
    """
    from .canny import CannyConfig, canny
    from .pipeline import PipelineConfig, edge_strength

    if mode == "threshold":
        config = PipelineConfig(kernel=kernel, **params)
        return lambda image: edge_strength(image, config)
    if mode == "canny":
        config = CannyConfig(kernel=kernel, **params)
        return lambda image: GrayImage(canny(image, config).data)
    raise EvaluationError(f"unknown mode {mode!r}; choose from {MODES}")


def compare_filters(
    dataset: Dataset | Sequence[Sample],
    kernels: Sequence,
    mode: str = "threshold",
    thresholds: Sequence[float] | None = None,
    tolerance: int | None = None,
    jobs: int = 1,
    **params,
) -> list[EvalReport]:
    """One :class:`EvalReport` per kernel, in the order given.

    ``params`` are forwarded to :class:`PipelineConfig` or :class:`CannyConfig`.
    """
    from .pipeline import default_thresholds

    grid = default_thresholds() if thresholds is None else list(thresholds)
    return [
        evaluate_filter(
            dataset,
            make_score_fn(k, mode, **params),
            grid,
            tolerance=tolerance,
            name=k.label,
            jobs=jobs,
        )
        for k in kernels
    ]


REPORT_SCHEMA = "edgekit-report/1"
CSV_COLUMNS = ("filter", "recall", "precision", "f1", "best_threshold")


def _num(x: float) -> str:
    return f"{x:.6f}"


def render_csv(reports: Sequence[EvalReport], header: dict | None = None) -> str:
    """CSV table; ``header`` entries become ``# key: value`` comment lines after the schema tag."""
    lines = [f"# schema: {REPORT_SCHEMA}"]
    for key, value in (header or {}).items():
        lines.append(f"# {key}: {value}")
    lines.append(",".join(CSV_COLUMNS))
    for r in reports:
        t = r.best_threshold
        t_text = str(int(t)) if float(t).is_integer() else repr(t)
        lines.append(
            ",".join([r.filter, _num(r.overall.recall), _num(r.overall.precision), _num(r.overall.f1), t_text])
        )
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> list[dict]:
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    if not rows or tuple(rows[0].split(",")) != CSV_COLUMNS:
        raise EvaluationError("not an edgekit report CSV")
    out = []
    for ln in rows[1:]:
        name, rec, prec, f1, thr = ln.split(",")
        out.append(
            {"filter": name, "recall": float(rec), "precision": float(prec), "f1": float(f1), "best_threshold": float(thr)}
        )
    return out
