#!/usr/bin/env python3
"""Benchmark the two matchers on the reference workload: a 256x64x64
feature map with a centered 32x32 feature hole, plus a size sweep.

Prints machine specs and wall times; the convolutional matcher must agree
with brute force record-for-record on every workload.
"""

import argparse
import os
import platform
import sys
import time

import numpy as np

from swapfill.matching import match_brute_force, match_convolutional
from swapfill.types import FeatureMap, FeatureMask


def workload(channels, grid, hole, seed=0):
    rng = np.random.default_rng(seed)
    fmap = FeatureMap(data=rng.standard_normal((channels, grid, grid)).astype(np.float32),
                      stride=4)
    data = np.zeros((grid, grid), bool)
    lo = (grid - hole) // 2
    data[lo:lo + hole, lo:lo + hole] = True
    return fmap, FeatureMask(data=data)


def run(channels, grid, hole, k, threads, repeats):
    fmap, fmask = workload(channels, grid, hole)
    conv_s = min(_timed(lambda: match_convolutional(fmap, fmask, k, threads=threads))
                 for _ in range(repeats))
    brute_s = min(_timed(lambda: match_brute_force(fmap, fmask, k))
                  for _ in range(repeats))
    conv = match_convolutional(fmap, fmask, k, threads=threads)
    brute = match_brute_force(fmap, fmask, k)
    agree = [r.source for r in conv.records] == [r.source for r in brute.records]
    print(f"C={channels:3d} grid={grid}  hole={hole}  k={k}: "
          f"conv {conv_s:7.3f}s  brute {brute_s:7.3f}s  "
          f"speedup {brute_s / conv_s:5.1f}x  queries={len(conv.records):5d}  "
          f"agree={agree}")


def _timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    print(f"machine: {platform.system()} {platform.release()} {platform.machine()}, "
          f"{os.cpu_count()} cpus")
    print(f"python {sys.version.split()[0]}, numpy {np.__version__}")
    print()
    run(256, 64, 32, 3, args.threads, args.repeats)   # reference workload
    run(64, 64, 32, 3, args.threads, args.repeats)
    run(256, 64, 32, 5, args.threads, args.repeats)
    run(16, 48, 16, 3, args.threads, args.repeats)


if __name__ == "__main__":
    main()
