#!/usr/bin/env python3
"""Compare operator-reachable spans with orbit-equivalence classes on a window."""

from __future__ import annotations

import argparse
import json

from collatzlab import BasisWindow, preset_map, span_vs_class


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("preset", nargs="?", default="collatz")
    ap.add_argument("--window", type=int, default=100_000)
    ap.add_argument("--starts", type=int, default=1000)
    ap.add_argument("--fuel", type=int, default=10_000)
    args = ap.parse_args()

    gcmap = preset_map(args.preset)
    rep = span_vs_class(
        gcmap,
        BasisWindow.range(1, args.window),
        args.fuel,
        starts=range(1, args.starts + 1),
    )
    bad = [e.start for e in rep.entries if not (e.span_subset_of_class and e.span_equals_certified)]
    print(
        json.dumps(
            {
                "preset": args.preset,
                "window": args.window,
                "starts": len(rep.entries),
                "ok": rep.ok,
                "failures": bad[:20],
                "largestSpan": max(e.span_size for e in rep.entries),
                "boundaryAffectedStarts": sum(1 for e in rep.entries if e.boundary_members),
            },
            indent=2,
        )
    )


if __name__ == "__main__":
    main()
