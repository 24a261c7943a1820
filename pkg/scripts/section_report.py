#!/usr/bin/env python3
"""Full report for one first-return section preset: set data, the
Cuntz-Krieger verdict, and the operator relation battery."""

from __future__ import annotations

import argparse
import json

from collatzlab import (
    BasisWindow,
    build_section_ops,
    ck_for_section,
    preset_section,
    verify_section_relations,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("preset", help="collatz | qx1:5 | mersenne:<k> | 3xd:<d>")
    ap.add_argument("--window", type=int, default=10_000)
    ap.add_argument("--fuel", type=int, default=100_000)
    args = ap.parse_args()

    sec = preset_section(args.preset)
    ck = ck_for_section(
        sec.map, sec.n1, sec.n2, sec.witnesses, args.window, args.fuel,
        removed=sec.n2_removed,
    )
    win = BasisWindow.section(sec.sigma, args.window)
    ops = build_section_ops(
        sec.map, sec.n1, sec.n2, win, args.fuel, n2_removed=sec.n2_removed
    )
    relations = verify_section_relations(ops)
    print(
        json.dumps(
            {
                "preset": sec.name,
                "n1": {"modulus": sec.n1.modulus, "residues": sorted(sec.n1.residues)},
                "n2": {"modulus": sec.n2.modulus, "residues": sorted(sec.n2.residues)},
                "n2Removed": sorted(sec.n2_removed),
                "witnesses": {str(k): v for k, v in sorted(sec.witnesses.exponents.items())},
                "cuntzKrieger": ck.to_dict(),
                "windowSize": len(win),
                "relations": relations.to_dict(),
            },
            indent=2,
        )
    )


if __name__ == "__main__":
    main()
