"""Command-line front end.

Exit codes: 0 = verified / pass, 1 = violation found, 2 = inconclusive
(fuel or window exhausted before a verdict), 3 = input error.  All reports
are deterministic for a fixed seed and independent of --threads.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import families
from .conditions import (
    NotPeriodic,
    ck_for_section,
    cuntz_krieger_condition,
    separating_condition,
)
from .dynamics import check_reduction_necessary, check_reduction_sufficient, classes
from .gcmap import DomainError, FuelExhausted, GCMap, load_map
from .operators import (
    BasisWindow,
    build_section_ops,
    descent_check,
    norm_bound_check,
    span_vs_class,
    verify_branch_relations,
    verify_section_relations,
)

SCHEMA_VERSION = 1

PASS, VIOLATION, INCONCLUSIVE, INPUT_ERROR = 0, 1, 2, 3


def _resolve_map(ref: str) -> GCMap:
    try:
        return families.preset_map(ref)
    except KeyError:
        pass
    except ValueError as exc:
        raise SystemExit(_fail_input(f"bad preset argument: {exc}"))
    try:
        return load_map(ref)
    except FileNotFoundError:
        raise SystemExit(_fail_input(f"unknown preset and no such file: {ref!r}"))
    except (ValueError, KeyError) as exc:
        raise SystemExit(_fail_input(f"could not parse map file {ref!r}: {exc}"))


def _fail_input(msg: str) -> int:
    print(json.dumps({"schemaVersion": SCHEMA_VERSION, "error": msg}))
    return INPUT_ERROR


def _emit(payload: dict, fmt: str, csv_rows=None, csv_header=None) -> None:
    if fmt == "csv" and csv_rows is not None:
        out = io.StringIO()
        w = csv.writer(out)
        w.writerow(csv_header)
        w.writerows(csv_rows)
        sys.stdout.write(out.getvalue())
    else:
        body = {"schemaVersion": SCHEMA_VERSION}
        body.update(payload)
        print(json.dumps(body))


# --- subcommands -----------------------------------------------------------


def cmd_orbit(args: argparse.Namespace) -> int:
    gcmap = _resolve_map(args.map)
    try:
        rec = gcmap.orbit(args.start, args.fuel)
    except DomainError as exc:
        return _fail_input(str(exc))
    exhausted = isinstance(rec.outcome, FuelExhausted)
    payload = {
        "command": "orbit",
        "map": args.map,
        "start": rec.start,
        "prefix": list(rec.prefix),
        "outcome": "fuelExhausted"
        if exhausted
        else {"entryIndex": rec.outcome.entry_index, "cycle": list(rec.outcome.cycle)},
    }
    rows = [(i, v) for i, v in enumerate(rec.prefix)]
    _emit(payload, args.format, rows, ("index", "value"))
    return INCONCLUSIVE if exhausted else PASS


def cmd_classes(args: argparse.Namespace) -> int:
    gcmap = _resolve_map(args.map)
    rep = classes(gcmap, args.window, args.fuel)
    payload = {
        "command": "classes",
        "map": args.map,
        "window": args.window,
        "numClasses": rep.num_classes,
        "flagged": sorted(rep.flagged),
        "classes": {str(k): v for k, v in sorted(rep.classes().items())},
    }
    rows = [(n, rep.class_of(n)) for n in range(1, args.window + 1)]
    _emit(payload, args.format, rows, ("n", "representative"))
    return INCONCLUSIVE if rep.flagged else PASS


def _suite_bounded(gcmap: GCMap, args) -> tuple[dict, int]:
    rep = gcmap.validate()
    return rep.to_dict(), PASS if rep.ok else VIOLATION


def _suite_separating(gcmap: GCMap, args, x: int) -> tuple[dict, int]:
    res = separating_condition(gcmap, x, args.fuel)
    if isinstance(res, NotPeriodic):
        return {"x": x, "periodic": False, "fuel": args.fuel}, INCONCLUSIVE
    payload = {
        "x": x,
        "periodic": True,
        "period": res.period,
        "word": list(res.word),
        "aperiodic": res.aperiodic,
    }
    return payload, PASS if res.holds else VIOLATION


def _suite_ck(gcmap: GCMap, args) -> tuple[dict, int]:
    try:
        section = families.preset_section(args.map)
    except (KeyError, ValueError):
        ok, detail = cuntz_krieger_condition(gcmap)
        if ok:
            return {"level": "partition", "passed": True, "matrix": detail.as_lists()}, PASS
        return (
            {
                "level": "partition",
                "passed": False,
                "branch": detail.branch,
                "witness": detail.witness,
                "reason": detail.reason,
            },
            VIOLATION,
        )
    rep = ck_for_section(
        section.map,
        section.n1,
        section.n2,
        section.witnesses,
        args.window,
        args.fuel,
        removed=section.n2_removed,
    )
    out = {"level": "section"}
    out.update(rep.to_dict())
    return out, PASS if rep.passed else VIOLATION


def _suite_section(gcmap: GCMap, args) -> tuple[dict, int]:
    try:
        section = families.preset_section(args.map)
    except (KeyError, ValueError) as exc:
        return {"error": str(exc)}, INPUT_ERROR
    suff = check_reduction_sufficient(gcmap, section.sigma, args.window, args.fuel)
    x0 = section.sigma.min_member()
    nec = check_reduction_necessary(gcmap, section.sigma, x0, args.fuel)
    payload = {"sufficient": suff.to_dict(), "necessaryAt": x0, "necessary": nec.to_dict()}
    if suff.passed and nec.passed:
        return payload, PASS
    if suff.inconclusive and not suff.failures and nec.passed:
        return payload, INCONCLUSIVE
    return payload, VIOLATION


def _suite_relations(gcmap: GCMap, args) -> tuple[dict, int]:
    branch = verify_branch_relations(gcmap, BasisWindow.range(1, args.window))
    payload = {"branch": branch.to_dict()}
    code = PASS if branch.ok else VIOLATION
    try:
        section = families.preset_section(args.map)
    except (KeyError, ValueError):
        section = None
    if section is not None:
        win = BasisWindow.section(section.sigma, args.window)
        ops = build_section_ops(
            section.map, section.n1, section.n2, win, args.fuel, n2_removed=section.n2_removed
        )
        rep = verify_section_relations(ops)
        payload["section"] = rep.to_dict()
        payload["inconclusiveColumns"] = sorted(ops.inconclusive_columns)
        if not rep.ok:
            code = VIOLATION
        elif ops.inconclusive_columns and code == PASS:
            code = INCONCLUSIVE
    norm = norm_bound_check(gcmap, BasisWindow.range(1, args.window), trials=200, seed=args.seed)
    payload["normBound"] = {
        "trials": norm.trials,
        "k": norm.k,
        "maxRatio": str(norm.max_ratio),
        "violations": norm.violations,
    }
    if not norm.ok:
        code = VIOLATION
    return payload, code


def _suite_span(gcmap: GCMap, args) -> tuple[dict, int]:
    window = BasisWindow.range(1, args.window)
    starts = range(1, min(1000, args.window) + 1)
    rep = span_vs_class(gcmap, window, args.fuel, depth=args.depth, starts=starts)
    bad = [e.start for e in rep.entries if not (e.span_subset_of_class and e.span_equals_certified)]
    payload = {
        "starts": len(rep.entries),
        "ok": rep.ok,
        "failures": bad[:20],
        "boundaryAffected": sum(1 for e in rep.entries if e.boundary_members),
    }
    return payload, PASS if rep.ok else VIOLATION


def _suite_descent(gcmap: GCMap, args) -> tuple[dict, int]:
    if args.map != "collatz":
        return {"error": "descent suite is specific to the collatz preset"}, INPUT_ERROR
    rep = descent_check(args.window)
    payload = {
        "limit": rep.limit,
        "checked": rep.checked,
        "counterexamples": list(rep.counterexamples),
        "fixedVector": rep.fixed_vector_ok,
    }
    return payload, PASS if rep.ok else VIOLATION


def _suite_modular(gcmap: GCMap, args) -> tuple[dict, int]:
    kind, _, arg = args.map.partition(":")
    if kind == "mersenne" and arg:
        rep = families.verify_mersenne_identities(int(arg))
    elif args.map == "qx1:5":
        rep = families.verify_q5_group()
    else:
        return {"error": "modular suite needs mersenne:<k> or qx1:5"}, INPUT_ERROR
    return rep.to_dict(), PASS if rep.ok else VIOLATION


def cmd_verify(args: argparse.Namespace) -> int:
    gcmap = _resolve_map(args.map)
    suite = args.suite
    if suite == "bounded":
        payload, code = _suite_bounded(gcmap, args)
    elif suite.startswith("separating:"):
        try:
            x = int(suite.split(":", 1)[1])
        except ValueError:
            return _fail_input(f"bad separating point in {suite!r}")
        payload, code = _suite_separating(gcmap, args, x)
    elif suite == "ck":
        payload, code = _suite_ck(gcmap, args)
    elif suite == "section":
        payload, code = _suite_section(gcmap, args)
    elif suite == "relations":
        payload, code = _suite_relations(gcmap, args)
    elif suite == "span":
        payload, code = _suite_span(gcmap, args)
    elif suite == "descent":
        payload, code = _suite_descent(gcmap, args)
    elif suite == "modular":
        payload, code = _suite_modular(gcmap, args)
    else:
        return _fail_input(f"unknown suite {suite!r}")
    body = {"command": "verify", "map": args.map, "suite": suite, "exitCode": code}
    body.update(payload)
    _emit(body, args.format)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="collatzlab",
        description="orbit, class, and operator-relation verification for Collatz-type maps",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--fuel", type=int, default=10_000)
        sp.add_argument("--window", type=int, default=10_000)
        sp.add_argument("--depth", type=int, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument(
            "--threads", type=int, default=1, help="accepted for symmetry; results never depend on it"
        )
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("orbit", help="print the orbit of a start value")
    sp.add_argument("map", help="preset (collatz, qx1:<q>, 3xd:<d>, mersenne:<k>, identity) or a map file")
    sp.add_argument("start", type=int)
    common(sp)
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("map")
    sp.add_argument(
        "--suite",
        required=True,
        help="bounded | separating:<x> | ck | section | relations | span | descent | modular",
    )
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("classes", help="partition a window into orbit-equivalence classes")
    sp.add_argument("map")
    common(sp)
    sp.set_defaults(func=cmd_classes)

    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad usage; report 3 per our contract
        code = exc.code if isinstance(exc.code, int) else INPUT_ERROR
        return PASS if code == 0 else INPUT_ERROR
    if args.fuel < 1 or args.window < 1 or args.threads < 1:
        return _fail_input("fuel, window, and threads must be positive")
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else INPUT_ERROR
    except (DomainError, ValueError) as exc:
        return _fail_input(str(exc))


if __name__ == "__main__":
    sys.exit(main())
