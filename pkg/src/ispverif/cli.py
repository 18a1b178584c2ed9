"""Command-line entry point: ``ispverif run | list-tests | validate``."""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from ispverif.errors import TestbenchFatal
from ispverif.ipxact import XmlConfigError, load_register_map, load_tb_config, parse_register_map, validate_map
from ispverif.isp.faults import shipped_faults
from ispverif.platform.program import ProgramError
from ispverif.tb.catalog import CATALOG, CUSTOM, DESCRIPTIONS, run_catalog_test

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ispverif", description="ISP verification testbench")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one test")
    run.add_argument("--config", required=True, type=Path, help="testbench config XML")
    run.add_argument("--test", choices=CATALOG, help="catalog test (default: run the config as written)")
    run.add_argument("--seed", type=lambda s: int(s, 0), help="override the config seed")
    run.add_argument("--trace", action="store_true", help="write the kernel event trace next to the report")
    run.add_argument("--report", type=Path, help="report path (default: from the config)")
    run.add_argument("--regmap", type=Path, help="register map XML (default: the shipped isp_regs.xml)")
    run.add_argument("--fault", help="shipped fault name for fault_detect or a custom staged run")

    sub.add_parser("list-tests", help="list catalog tests")

    val = sub.add_parser("validate", help="parse and validate a register map")
    val.add_argument("--regmap", required=True, type=Path)
    return p


def _load_map(path: Optional[Path]):
    if path is not None:
        return load_register_map(path)
    return parse_register_map(resources.files("ispverif.fixtures").joinpath("isp_regs.xml").read_text(encoding="utf-8"))


def _run(args: argparse.Namespace) -> int:
    config = load_tb_config(args.config)
    if args.seed is not None:
        if not 0 <= args.seed < 1 << 64:
            raise TestbenchFatal("BAD_SEED", f"seed {args.seed} outside unsigned 64-bit range")
        config = config.with_(seed=args.seed)
    amap = _load_map(args.regmap)
    fault = None
    if args.fault is not None:
        faults = shipped_faults()
        if args.fault not in faults:
            raise TestbenchFatal("UNKNOWN_FAULT", f"{args.fault!r}; shipped faults: {', '.join(faults)}")
        fault = faults[args.fault]
    report_path = args.report or config.report_path

    result = run_catalog_test(args.test or CUSTOM, config, amap, trace=args.trace, fault=fault)
    report_path.parent.mkdir(parents=True, exist_ok=True)
    result.report.write(report_path)
    for kind, sub in result.sub_reports.items():
        sub.write(report_path.with_name(f"{report_path.stem}.{kind.lower()}{report_path.suffix}"))
    if args.trace:
        report_path.with_suffix(".trace").write_text("".join(f"{line}\n" for line in result.trace), encoding="utf-8")

    r = result.report
    summary = f"{r.test}: {r.outcome} ({r.frames_compared} frames compared, {len(r.mismatches)} mismatches)"
    if r.mismatches:
        m = r.mismatches[0]
        where = "dimensions" if m["x"] is None else f"({m['x']},{m['y']})"
        summary += f"; first mismatch frame {m['frame']} at {where}: expected {m['expected']}, actual {m['actual']}"
    print(summary)
    return EXIT_PASS if r.outcome == "PASS" else EXIT_FAIL


def _validate(args: argparse.Namespace) -> int:
    if not args.regmap.is_file():
        print(f"error: {args.regmap}: no such file", file=sys.stderr)
        return EXIT_USAGE
    try:
        amap = load_register_map(args.regmap)
    except XmlConfigError as exc:
        for e in exc.errors:
            print(e, file=sys.stderr)
        return EXIT_FAIL
    problems = validate_map(amap)
    for e in problems:
        print(e, file=sys.stderr)
    if problems:
        return EXIT_FAIL
    mems = len(amap.memories)
    print(f"{args.regmap}: {len(amap.registers)} registers, {mems} memor{'y' if mems == 1 else 'ies'}, valid")
    return EXIT_PASS


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list-tests":
        for name in CATALOG:
            print(f"{name:<18} {DESCRIPTIONS[name]}")
        return EXIT_PASS
    if args.command == "validate":
        return _validate(args)
    try:
        return _run(args)
    except XmlConfigError as exc:
        for e in exc.errors:
            print(f"error: {e}", file=sys.stderr)
    except (TestbenchFatal, ProgramError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
