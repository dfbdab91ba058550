"""Find every pairwise relation x = +-y among the six first-order associators.

Runs on the regular and twisted octonion actions separately and on their
intersection, and compares the result with the closure of the frozen pattern.
"""
import argparse

from moufang.algebra import OCTONIONS
from moufang.birep import regular_birep, twisted_birep
from moufang.mc import FIRST_ORDER_PATTERN, pattern_closure, sign_prepass


def fmt(rels):
    return ", ".join(f"{x}={'' if s > 0 else '-'}{y}" for x, s, y in sorted(rels)) or "(none)"


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    reg, tw = regular_birep(OCTONIONS), twisted_birep(OCTONIONS)
    only_reg = sign_prepass([reg], args.samples, args.seed)
    only_tw = sign_prepass([tw], args.samples, args.seed)
    both = sign_prepass([reg, tw], args.samples, args.seed)
    closure = pattern_closure()
    print(f"regular  ({len(only_reg):2d}): {fmt(only_reg)}")
    print(f"twisted  ({len(only_tw):2d}): {fmt(only_tw)}")
    print(f"both     ({len(both):2d}): {fmt(both)}")
    print(f"frozen pattern: {fmt(FIRST_ORDER_PATTERN)}")
    print(f"closure matches intersection: {both == closure}")
    return 0 if both == closure else 1


if __name__ == "__main__":
    raise SystemExit(main())
