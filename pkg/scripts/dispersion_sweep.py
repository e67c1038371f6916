#!/usr/bin/env python3
"""Dispersion ratios and bad-set cardinalities across a modulus range.

    python3 scripts/dispersion_sweep.py --qlo 100 --qhi 400 --step 7
"""

import argparse
import sys
from fractions import Fraction

from quadpair.modcount import dispersion_report


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--qlo", type=int, default=50)
    ap.add_argument("--qhi", type=int, default=500)
    ap.add_argument("--step", type=int, default=1)
    ap.add_argument("--eta", default="1/200")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    eta = Fraction(args.eta)
    lines = ["q,q1,eta,sum_delta_star_sq,bound,ratio,card_bad_set"]
    empties = 0
    total = 0
    worst = (0.0, None)
    for q in range(args.qlo, args.qhi + 1, args.step):
        rep = dispersion_report(q, eta=eta)
        total += 1
        empties += rep.card_bad_set == 0
        if rep.ratio > worst[0]:
            worst = (rep.ratio, q)
        lines.append(
            f"{q},{rep.q1},{eta},{float(rep.sum_delta_sq):.17g},"
            f"{rep.bound_value:.17g},{rep.ratio:.17g},{rep.card_bad_set}"
        )
        print(f"q={q:<6} q1={rep.q1:<6} ratio={rep.ratio:10.4g}  |B(q)|={rep.card_bad_set}")
    print(f"\nempty bad sets: {empties}/{total}; max ratio {worst[0]:.4g} at q={worst[1]}")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
