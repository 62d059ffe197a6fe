#!/usr/bin/env python3
"""Kernel-size comparison tables (recall, precision, F1, best threshold) for both modes.

Without a dataset argument the tables are computed on freshly generated
synthetic train/val/test splits. Pass one or more BSDS-style directories to
evaluate real data instead.
"""

import argparse
import time

from edgekit.evaluation import compare_filters, load_dataset
from edgekit.kernels import COMPARISON_FAMILIES, EXTENDED_SIZES, KernelSpec
from edgekit.synth import generate_dataset


def table(title, reports):
    print(f"\n{title}")
    print(f"{'filter':14s} {'recall':>9s} {'precision':>9s} {'f1':>9s} {'t':>5s}")
    for r in reports:
        o = r.overall
        print(f"{r.filter:14s} {o.recall:9.6f} {o.precision:9.6f} {o.f1:9.6f} {r.best_threshold:5g}")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("datasets", nargs="*")
    p.add_argument("--count", type=int, default=10, help="synthetic images per split")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=4)
    p.add_argument("--comparison", action="store_true", help="also run the 5x5 comparison families")
    args = p.parse_args()

    if args.datasets:
        sets = [load_dataset(d) for d in args.datasets]
    else:
        sets = [generate_dataset(args.count, seed=args.seed + k) for k in range(3)]
        for ds, split in zip(sets, ("train", "val", "test")):
            ds.name = f"synthetic-{split}"

    specs = [KernelSpec("extended", n) for n in EXTENDED_SIZES]
    if args.comparison:
        specs += [KernelSpec(f, 5) for f in COMPARISON_FAMILIES]
    for mode in ("threshold", "canny"):
        for ds in sets:
            start = time.perf_counter()
            reports = compare_filters(ds, specs, mode=mode, jobs=args.jobs)
            table(f"{ds.name} / {mode} ({len(ds)} images, {time.perf_counter() - start:.1f}s)", reports)


if __name__ == "__main__":
    main()
