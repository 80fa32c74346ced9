"""Agreement between the signature fast path and brute force, per group and k.

    python scripts/oracle_sweep.py --trials 200 --tol 1e-6
"""

import argparse
import time

import numpy as np

from jointsig import GroupId, HkElement, apply, equivalence_test, hk_apply, random_element
from jointsig.oracle import brute_force_equivalent, random_polygon


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--tol", type=float, default=1e-6)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    for group in GroupId:
        for k in range(max(3, group.window), 11):
            t0 = time.perf_counter()
            bad = 0
            for _ in range(args.trials):
                P = random_polygon(k, int(rng.integers(2**31)), group)
                h = HkElement(int(rng.integers(k)), bool(rng.integers(2)))
                Q = apply(random_element(group, int(rng.integers(2**31))), hk_apply(h, P))
                R = random_polygon(k, int(rng.integers(2**31)), group)
                for other, expect in ((Q, True), (R, False)):
                    fast = equivalence_test(group, P, other, args.tol).matched
                    slow = brute_force_equivalent(group, P, other, args.tol).matched
                    bad += fast != slow or fast != expect
            print(f"{group.value:<5} k={k:<3} disagreements {bad}/{2 * args.trials}  "
                  f"{time.perf_counter() - t0:.2f} s")


if __name__ == "__main__":
    main()
