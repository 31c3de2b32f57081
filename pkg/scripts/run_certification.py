#!/usr/bin/env python3
"""Certification demo: a bump potential tuned to pass the pointwise condition,
plus the x10 rescaling that breaks it."""

import argparse

from minfol.catalog import certified_bump
from minfol.certify import check_condition_A, check_condition_B
from minfol.potential import scale_potential


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--safety", type=float, default=0.9)
    args = parser.parse_args()

    pot = certified_bump(n=args.n, safety=args.safety)
    for label, p in (("tuned", pot), ("x10", scale_potential(pot, 10.0))):
        cert_a = check_condition_A(p, args.n)
        cert_b = check_condition_B(p, args.n)
        print("%-6s condition A: %-14s margin % .6f" %
              (label, cert_a.verdict, cert_a.margin))
        print("%-6s condition B: %-14s margin % .6f  (norm %.4f vs %.4f)" %
              (label, cert_b.verdict, cert_b.margin,
               cert_b.norm_value, cert_b.threshold))


if __name__ == "__main__":
    main()
