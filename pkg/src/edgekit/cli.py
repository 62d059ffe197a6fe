"""``edgekit`` command line: detect, canny, kernels, bench.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 data/validation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .canny import THRESHOLD_SOURCES, CannyConfig, canny
from .evaluation import (
    MODES,
    REPORT_SCHEMA,
    EvaluationError,
    compare_filters,
    discover_sets,
    load_dataset,
    render_csv,
)
from .filtering import FilterError
from .image import ImageError, ImageReadError, atomic_write_bytes, load_image, save_image
from .kernels import (
    COMPARISON_FAMILIES,
    EXTENDED_ALIASES,
    EXTENDED_SIZES,
    KernelError,
    KernelSpec,
    kernel_dump,
)
from .pipeline import PipelineConfig, default_thresholds, detect_edges

log = logging.getLogger("edgekit")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DATA = 0, 1, 2, 3
JOBS_ENV = "EDGEKIT_JOBS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _odd_size(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 3 or value % 2 == 0:
        raise argparse.ArgumentTypeError(f"kernel size must be odd and >= 3, got {value}")
    return value


def _ratio(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"ratio must lie in (0, 1], got {value}")
    return value


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _intensity(text: str) -> float:
    value = float(text)
    if not 0 <= value <= 255:
        raise argparse.ArgumentTypeError(f"threshold must lie in [0, 255], got {value}")
    return value


def parse_thresholds(text: str) -> list[float]:
    """``a:b`` (inclusive integer range), ``a:b:step``, or a comma list."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) == 3 else 1.0
            if step <= 0 or stop < start:
                raise ValueError
            n = int((stop - start) // step) + 1
            values = [start + i * step for i in range(n)]
        else:
            values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad threshold grid {text!r}") from None
    if not values or any(not 0 <= v <= 255 for v in values):
        raise argparse.ArgumentTypeError(f"threshold grid must be non-empty within [0, 255]: {text!r}")
    return values


def _tolerance(text: str):
    if text == "auto":
        return None
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance must be 'auto' or an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"tolerance must be >= 0, got {value}")
    return value


def default_jobs() -> int:
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"{JOBS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _family_choices():
    return list(EXTENDED_ALIASES) + list(COMPARISON_FAMILIES)


def _kernel_args(p: argparse.ArgumentParser):
    p.add_argument("--kernel", "--family", dest="family", default="sobel", choices=_family_choices(),
                   help="gradient kernel family; 'sobel'/'extended' is the zero-dilated Sobel (default: sobel)")
    p.add_argument("--size", type=_odd_size, default=3,
                   help=f"kernel size for the extended Sobel family, one of {EXTENDED_SIZES} (default: 3)")


def _smoothing_args(p: argparse.ArgumentParser):
    p.add_argument("--sigma", type=_positive, default=1.4, help="Gaussian sigma (default: 1.4)")
    p.add_argument("--ksize", type=_odd_size, default=5, help="Gaussian kernel size (default: 5)")
    p.add_argument("--no-smooth", dest="smooth", action="store_false",
                   help="skip the Gaussian smoothing step")


def _canny_args(p: argparse.ArgumentParser):
    p.add_argument("--high-ratio", type=_ratio, default=0.7, help="T_h = max * high_ratio (default: 0.7)")
    p.add_argument("--low-ratio", type=_ratio, default=0.3, help="T_l = T_h * low_ratio (default: 0.3)")
    p.add_argument("--threshold-source", choices=THRESHOLD_SOURCES, default="gradient",
                   help="take max from the gradient magnitude plane or the source image (default: gradient)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="edgekit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"edgekit {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("detect", help="thresholded gradient-magnitude edge map")
    _kernel_args(p)
    _smoothing_args(p)
    p.add_argument("--threshold", type=_intensity, required=True,
                   help="pixels with normalized magnitude >= threshold become edges")
    p.add_argument("input")
    p.add_argument("output")

    p = sub.add_parser("canny", help="Canny edge map")
    _kernel_args(p)
    _smoothing_args(p)
    _canny_args(p)
    p.add_argument("input")
    p.add_argument("output")

    p = sub.add_parser("kernels", help="print a kernel matrix")
    p.add_argument("--family", default="extended", choices=_family_choices())
    p.add_argument("--size", type=_odd_size, default=3)
    p.add_argument("--axis", choices=("x", "y", "both"), default="both")

    p = sub.add_parser("bench", help="precision/recall/F1 of several kernels on image sets")
    p.add_argument("datasets", nargs="+",
                   help="set directories holding images/ and groundtruth/, or parents of such sets")
    p.add_argument("--filters", nargs="+", default=[f"extended{s}" for s in EXTENDED_SIZES],
                   help="kernel selectors: extendedN / sobelN / N, or a 5x5 family name")
    p.add_argument("--mode", choices=MODES, default="threshold")
    p.add_argument("--thresholds", type=parse_thresholds, default=None,
                   help="threshold grid, e.g. 1:255 or 10,20,30 (default: 1:255)")
    p.add_argument("--tolerance", type=_tolerance, default=None,
                   help="match radius in pixels or 'auto' = 0.75%% of the diagonal (default: auto)")
    p.add_argument("--images-list", type=Path, default=None,
                   help="file of image stems to evaluate (one per line)")
    p.add_argument("--jobs", type=int, default=None,
                   help=f"worker threads (default: ${JOBS_ENV} or CPU count)")
    p.add_argument("--out", type=Path, default=Path("reports"), help="output directory (default: reports)")
    _smoothing_args(p)
    _canny_args(p)
    return parser


def _now() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def manifest(command: str, parameters: dict, inputs: dict, jobs: int | None = None) -> dict:
    """Run record; everything outside ``runtime`` is a pure function of the inputs."""
    runtime = {"version": __version__, "timestamp": _now()}
    if jobs is not None:
        runtime["jobs"] = jobs
    return {"command": command, "parameters": parameters, "inputs": inputs, "runtime": runtime}


def _dump_json(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode()


def _write_with_manifest(output: Path, edges, record: dict):
    save_image(output, edges)
    atomic_write_bytes(output.with_name(output.name + ".manifest.json"), _dump_json(record))


def _spec(args) -> KernelSpec:
    try:
        return KernelSpec(args.family, args.size)
    except KernelError as exc:
        raise UsageError(str(exc)) from None


def cmd_detect(args) -> int:
    spec = _spec(args)
    config = PipelineConfig(kernel=spec, sigma=args.sigma, gaussian_ksize=args.ksize,
                            threshold=args.threshold, smooth=args.smooth)
    edges = detect_edges(load_image(args.input), config)
    params = {"kernel": spec.label, "sigma": args.sigma, "ksize": args.ksize,
              "smooth": args.smooth, "threshold": args.threshold}
    _write_with_manifest(Path(args.output), edges, manifest("detect", params, {"image": args.input}))
    return EXIT_OK


def cmd_canny(args) -> int:
    spec = _spec(args)
    config = CannyConfig(kernel=spec, sigma=args.sigma, gaussian_ksize=args.ksize,
                         high_ratio=args.high_ratio, low_ratio=args.low_ratio,
                         threshold_source=args.threshold_source, smooth=args.smooth)
    edges = canny(load_image(args.input), config)
    params = {"kernel": spec.label, "sigma": args.sigma, "ksize": args.ksize, "smooth": args.smooth,
              "high_ratio": args.high_ratio, "low_ratio": args.low_ratio,
              "threshold_source": args.threshold_source}
    _write_with_manifest(Path(args.output), edges, manifest("canny", params, {"image": args.input}))
    return EXIT_OK


def cmd_kernels(args) -> int:
    size = args.size
    if args.family in COMPARISON_FAMILIES and size == 3:
        size = 5
    try:
        spec = KernelSpec(args.family, size)
    except KernelError as exc:
        raise UsageError(str(exc)) from None
    axes = ("x", "y") if args.axis == "both" else (args.axis,)
    sys.stdout.write("\n".join(kernel_dump(spec.kernel(a)) for a in axes))
    return EXIT_OK


def _read_names(path: Path) -> list[str]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ImageReadError(f"{path}: cannot read ({exc.strerror or exc})") from exc
    names = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    # listed as paths or file names: reduce to stems
    return [Path(n).stem for n in names]


def cmd_bench(args) -> int:
    try:
        specs = [KernelSpec.parse(f) for f in args.filters]
    except KernelError as exc:
        raise UsageError(str(exc)) from None
    jobs = args.jobs if args.jobs is not None else default_jobs()
    if jobs < 1:
        raise UsageError(f"--jobs must be >= 1, got {jobs}")
    grid = args.thresholds if args.thresholds is not None else default_thresholds()
    names = _read_names(args.images_list) if args.images_list else None

    if args.mode == "canny":
        params = {"sigma": args.sigma, "gaussian_ksize": args.ksize, "smooth": args.smooth,
                  "high_ratio": args.high_ratio, "low_ratio": args.low_ratio,
                  "threshold_source": args.threshold_source}
    else:
        params = {"sigma": args.sigma, "gaussian_ksize": args.ksize, "smooth": args.smooth}

    sets = [s for root in args.datasets for s in discover_sets(root)]
    args.out.mkdir(parents=True, exist_ok=True)
    failures = 0
    for set_dir in sets:
        dataset = load_dataset(set_dir, names)
        for name, reason in dataset.skipped:
            log.warning("skipped %s/%s: %s", dataset.name, name, reason)
        if not dataset.samples:
            print(f"edgekit: {set_dir}: no usable images", file=sys.stderr)
            failures += 1
            continue
        reports = compare_filters(dataset, specs, mode=args.mode, thresholds=grid,
                                  tolerance=args.tolerance, jobs=jobs, **params)
        parameters = {
            "mode": args.mode,
            "filters": [s.label for s in specs],
            "thresholds": grid,
            "tolerance": "auto" if args.tolerance is None else args.tolerance,
            "matching": "chebyshev-radius, union of annotators",
            **params,
        }
        record = manifest("bench", parameters,
                          {"set": dataset.name, "path": str(set_dir),
                           "images": [s.name for s in sorted(dataset.samples, key=lambda s: s.name)]},
                          jobs=jobs)
        skipped = [{"image": n, "reason": r} for n, r in sorted(dataset.skipped)]
        header = {"set": dataset.name, "mode": args.mode, "images": len(dataset.samples),
                  "skipped": len(skipped), "tolerance": parameters["tolerance"],
                  "smooth": args.smooth}
        stem = args.out / f"{dataset.name}_{args.mode}"
        atomic_write_bytes(stem.with_suffix(".csv"), render_csv(reports, header).encode())
        atomic_write_bytes(stem.with_suffix(".json"), _dump_json({
            "schema": REPORT_SCHEMA,
            "manifest": record,
            "skipped": skipped,
            "reports": [r.to_dict() for r in reports],
        }))
        print(f"{dataset.name} ({args.mode}, {len(dataset.samples)} images, {len(skipped)} skipped)")
        for r in reports:
            print(f"  {r.filter:14s} R={r.overall.recall:.6f} P={r.overall.precision:.6f} "
                  f"F1={r.overall.f1:.6f} t={r.best_threshold:g}")
    return EXIT_DATA if failures else EXIT_OK


COMMANDS = {"detect": cmd_detect, "canny": cmd_canny, "kernels": cmd_kernels, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors, --help and --version: report the code instead of exiting
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"edgekit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ImageReadError, OSError) as exc:
        print(f"edgekit: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ImageError, KernelError, FilterError, EvaluationError) as exc:
        print(f"edgekit: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
