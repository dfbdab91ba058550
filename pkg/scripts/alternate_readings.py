"""Compare the derivation-consistent associator closed forms with the alternate readings.

The alternate first-order m, mhat take the field factor at the moved point
S_g A; the alternate second-order l flips the signs of the a- and
derivative terms and swaps the r and m expressions. Only the l change is
visible numerically, because r_jk = m_jk for Moufang actions.
"""
import argparse

import numpy as np

from moufang.algebra import OCTONIONS, sample_ball
from moufang.birep import (action_taylor, first_order_associators, regular_birep,
                           second_order_associators)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    act = regular_birep(OCTONIONS)
    fields = action_taylor(act)
    rng = np.random.default_rng(args.seed)
    A = sample_ball(rng, args.samples, 7, 0.3)
    g = sample_ball(rng, args.samples, 7, 0.3)
    worst = {}
    for a, b in zip(A, g):
        fo = first_order_associators(act, a, b, fields)
        so = second_order_associators(act, a, fields)
        for tag, d in (("1", fo.discrepancy()), ("1-alt", fo.alternate_discrepancy()),
                       ("2", so.closed_discrepancy()), ("2-alt", so.alternate_discrepancy())):
            for k, v in d.items():
                worst[(tag, k)] = max(worst.get((tag, k), 0.0), v)
    for (tag, k), v in sorted(worst.items()):
        print(f"order {tag:<6} {k:<5} max |direct - closed| = {v:.3e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
