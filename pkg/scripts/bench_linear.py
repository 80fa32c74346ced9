"""Signature time against vertex count, per group.

    python scripts/bench_linear.py --sizes 1000 10000 100000
"""

import argparse
import time
from dataclasses import dataclass, field

import numpy as np

from jointsig import GroupId, signature


@dataclass(frozen=True)
class Config:
    sizes: list = field(default_factory=lambda: [1_000, 10_000, 100_000])
    repeats: int = 5
    seed: int = 0


def best_time(group, pts, repeats):
    signature(group, pts)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        signature(group, pts)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=Config().sizes)
    ap.add_argument("--repeats", type=int, default=Config.repeats)
    ap.add_argument("--seed", type=int, default=Config.seed)
    a = ap.parse_args()
    cfg = Config(a.sizes, a.repeats, a.seed)
    rng = np.random.default_rng(cfg.seed)
    print("group  " + "".join(f"{k:>12}" for k in cfg.sizes) + "   ratio(last/first)")
    for group in GroupId:
        times = [best_time(group, rng.uniform(0, 1, size=(k, 2)), cfg.repeats) for k in cfg.sizes]
        cells = "".join(f"{t * 1e3:>10.3f}ms" for t in times)
        print(f"{group.value:<7}{cells}   {times[-1] / times[0]:.1f}")


if __name__ == "__main__":
    main()
