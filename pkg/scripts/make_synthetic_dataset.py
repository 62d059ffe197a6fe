#!/usr/bin/env python3
"""Write a synthetic BSDS-style image set (images/ + groundtruth/<stem>/) to disk."""

import argparse

from edgekit.synth import SceneParams, write_dataset


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("root", help="output directory")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--height", type=int, default=SceneParams.height)
    p.add_argument("--width", type=int, default=SceneParams.width)
    p.add_argument("--format", choices=("png", "pgm"), default="png")
    args = p.parse_args()
    params = SceneParams(height=args.height, width=args.width)
    root = write_dataset(args.root, args.count, seed=args.seed, params=params, fmt=args.format)
    print(f"wrote {args.count} scenes to {root}")


if __name__ == "__main__":
    main()
