#!/usr/bin/env python3
"""How robust is the kernel-size trend across synthetic seeds?

For each seed, report whether 5..9 beat 3x3 and 15x15 falls below the peak
(threshold mode), and whether 7x7 and 9x9 beat 3x3 (Canny mode).
"""

import argparse

from edgekit.evaluation import compare_filters
from edgekit.kernels import EXTENDED_SIZES, KernelSpec
from edgekit.synth import generate_dataset


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=6)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--jobs", type=int, default=4)
    args = p.parse_args()
    specs = [KernelSpec("extended", n) for n in EXTENDED_SIZES]
    held = {"threshold": 0, "canny": 0}
    for seed in range(args.seeds):
        ds = generate_dataset(args.count, seed=seed)
        for mode in held:
            f1 = {n: r.overall.f1 for n, r in zip(EXTENDED_SIZES, compare_filters(ds, specs, mode=mode, jobs=args.jobs))}
            if mode == "threshold":
                ok = all(f1[n] > f1[3] for n in (5, 7, 9)) and f1[15] < max(f1.values())
            else:
                ok = f1[7] > f1[3] and f1[9] > f1[3]
            held[mode] += ok
            row = " ".join(f"{f1[n]:.3f}" for n in EXTENDED_SIZES)
            print(f"seed {seed} {mode:9s} {row}  {'ok' if ok else 'MISS'}")
    for mode, n in held.items():
        print(f"{mode}: trend held on {n}/{args.seeds} seeds")


if __name__ == "__main__":
    main()
