#!/usr/bin/env python3
"""Exhaustive convergence scan for the 3x+1 map over an initial range."""

from __future__ import annotations

import argparse
import json

from collatzlab.rangecheck import verify_range_collatz


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--limit", type=int, default=10**7)
    ap.add_argument("--step-cap", type=int, default=10_000)
    args = ap.parse_args()
    report = verify_range_collatz(args.limit, step_cap=args.step_cap)
    print(json.dumps(report.to_dict(), indent=2))


if __name__ == "__main__":
    main()
