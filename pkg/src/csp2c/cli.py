"""Command-line entry point.

Subcommands: parse (summarize an XCSP3 file), gen (emit C programs), solve
(brute-force satisfiability), verify (differential check of generated code
against the solver), bench (run external tools over a benchmark matrix),
report (rebuild tables/charts from a raw records CSV).

Exit codes: 0 success/satisfiable/pass; 1 unsatisfiable or verification
fail; 2 parse or usage error; 3 resource limit or partial verification.
The CSP2C_CC environment variable sets the default C compiler template
(default: "cc -O1 -o {out} {src}").
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import charts, harness
from .codegen import (
    Dialect,
    Family,
    output_filename,
    transform,
    version_count,
    version_to_spec,
    CodegenError,
)
from .model import CspInstance, IntensionConstraint, AllDifferent, TableConstraint
from .oracle import Status, solve
from .verify import (
    VerifyStatus,
    default_compile_command,
    differential_check,
    CompileError,
)
from .xcsp import ParseFailure, parse_file

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_LIMIT = 3


def _load_instance(path: str, machine: bool) -> CspInstance | None:
    try:
        return parse_file(path)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None
    except ParseFailure as exc:
        if machine:
            print(
                json.dumps(
                    {
                        "ok": False,
                        "diagnostics": [
                            {
                                "severity": d.severity,
                                "path": d.path,
                                "line": d.line,
                                "message": d.message,
                            }
                            for d in exc.diagnostics
                        ],
                    }
                )
            )
        else:
            for d in exc.diagnostics:
                print(str(d), file=sys.stderr)
        return None


def _plural(n: int, word: str) -> str:
    return f"{n} {word}" + ("" if n == 1 else "s")


def _family_of(csp: CspInstance) -> Family:
    kinds = {type(c) for c in csp.constraints()}
    if kinds <= {TableConstraint}:
        return Family.EXTENSIONAL
    if kinds <= {IntensionConstraint, AllDifferent}:
        return Family.INTENSIONAL
    raise CodegenError(
        "instance mixes table and intensional constraints; no single family applies"
    )


def _parse_versions(value: str, family: Family) -> list[int]:
    if value == "all":
        return list(range(1, version_count(family) + 1))
    try:
        versions = [int(v) for v in value.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad version list {value!r}")
    for v in versions:
        if not 1 <= v <= version_count(family):
            raise argparse.ArgumentTypeError(
                f"{family.value} version must be in 1..{version_count(family)}, got {v}"
            )
    return versions


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_parse(args: argparse.Namespace) -> int:
    csp = _load_instance(args.file, args.machine)
    if csp is None:
        return EXIT_PARSE
    constraints = csp.constraints()
    if args.machine:
        print(
            json.dumps(
                {
                    "ok": True,
                    "instance": csp.name,
                    "variables": len(csp.variables),
                    "domain_sizes": [v.domain.size for v in csp.variables],
                    "groups": len(csp.groups),
                    "constraints": len(constraints),
                    "assignment_space": csp.assignment_space_size,
                }
            )
        )
    else:
        domains = ", ".join(
            f"{v.id}:{v.domain.size}" for v in csp.variables[:8]
        ) + ("..." if len(csp.variables) > 8 else "")
        print(
            f"{csp.name}: {_plural(len(csp.variables), 'var')}, "
            f"{_plural(len(csp.groups), 'group')}, "
            f"{_plural(len(constraints), 'constraint')}"
        )
        print(f"domain sizes: {domains}")
        print(f"assignment space: {csp.assignment_space_size}")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    csp = _load_instance(args.file, args.machine)
    if csp is None:
        return EXIT_PARSE
    family = Family(args.family)
    try:
        versions = _parse_versions(args.versions, family)
    except argparse.ArgumentTypeError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    dialect = Dialect(args.dialect)
    os.makedirs(args.out_dir, exist_ok=True)
    rows = []
    try:
        for v in versions:
            program = transform(csp, version_to_spec(family, v, dialect))
            path = os.path.join(args.out_dir, output_filename(program))
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(program.source_text)
            rows.append(
                {
                    "file": path,
                    "instance": csp.name,
                    "version": program.version_label,
                    "dialect": dialect.value,
                    "statements": program.statement_count,
                    "lines": program.line_count,
                }
            )
    except CodegenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    manifest = os.path.join(args.out_dir, "gen_manifest.csv")
    with open(manifest, "w", encoding="utf-8") as fh:
        fh.write("file,instance,version,dialect,statements,lines\n")
        for row in rows:
            fh.write(
                f"{row['file']},{row['instance']},{row['version']},"
                f"{row['dialect']},{row['statements']},{row['lines']}\n"
            )
    if args.machine:
        for row in rows:
            print(json.dumps(row))
    else:
        for row in rows:
            print(f"wrote {row['file']} ({row['statements']} statements, {row['lines']} lines)")
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    csp = _load_instance(args.file, args.machine)
    if csp is None:
        return EXIT_PARSE
    result = solve(csp, limit=args.limit)
    if args.machine:
        print(
            json.dumps(
                {
                    "status": result.status.value,
                    "witness": result.witness,
                    "explored": result.explored,
                }
            )
        )
    else:
        print(f"{csp.name}: {result.status.value} (explored {result.explored})")
        if result.witness is not None:
            print(" ".join(f"{k}={v}" for k, v in result.witness.items()))
    if result.status is Status.SATISFIABLE:
        return EXIT_OK
    if result.status is Status.UNSATISFIABLE:
        return EXIT_FAIL
    return EXIT_LIMIT


def cmd_verify(args: argparse.Namespace) -> int:
    csp = _load_instance(args.file, args.machine)
    if csp is None:
        return EXIT_PARSE
    try:
        family = _family_of(csp)
        versions = _parse_versions(args.versions, family)
    except (CodegenError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    specs = [version_to_spec(family, v) for v in versions]
    try:
        report = differential_check(
            csp,
            specs,
            args.cc,
            bound=args.bound,
            workers=args.workers,
        )
    except CompileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.machine:
        print(
            json.dumps(
                {
                    "instance": report.instance,
                    "status": report.status.value,
                    "versions": report.versions,
                    "assignments_checked": report.assignments_checked,
                    "mismatches": len(report.mismatches),
                }
            )
        )
    else:
        print(
            f"{report.instance}: {report.status.value} "
            f"({len(report.versions)} versions x {report.assignments_checked} assignments)"
        )
        for m in report.mismatches[:10]:
            a = " ".join(f"{k}={v}" for k, v in m.assignment)
            print(
                f"  mismatch {m.version_label}: [{a}] oracle={m.expected} driver={m.observed}"
            )
    if report.status is VerifyStatus.PASS:
        return EXIT_OK
    if report.status is VerifyStatus.FAIL:
        return EXIT_FAIL
    return EXIT_LIMIT


def cmd_bench(args: argparse.Namespace) -> int:
    tools = harness.load_tool_manifest(args.tools)
    instances = harness.load_instance_manifest(args.instances)
    os.makedirs(args.out_dir, exist_ok=True)
    src_dir = os.path.join(args.out_dir, "src")
    os.makedirs(src_dir, exist_ok=True)

    dialects = sorted(
        {t.dialect for t in tools if t.kind is harness.ToolKind.ANALYSIS}
    )
    labels_by_family: dict[str, list[str]] = {}
    for inst in instances:
        csp = _load_instance(inst.path, machine=False)
        if csp is None:
            return EXIT_PARSE
        family = Family(inst.family)
        versions = _parse_versions(args.versions, family)
        labels = []
        for v in versions:
            for dialect in dialects:
                program = transform(csp, version_to_spec(family, v, Dialect(dialect)))
                path = os.path.join(src_dir, output_filename(program))
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(program.source_text)
            labels.append(version_to_spec(family, v).version_label)
        labels_by_family[inst.family] = labels

    records = harness.run_matrix(
        instances,
        labels_by_family,
        tools,
        src_dir,
        workers=args.workers,
        allow_parallel_timings=args.allow_parallel_timings,
    )
    sizes = {inst.instance_id: inst.size for inst in instances}
    report = harness.build_report(records, sizes)
    written = harness.emit_csv(report, args.out_dir)
    written += charts.emit_svg(report, args.out_dir)
    for path in written:
        print(f"wrote {path}")
    for flag in report.flags:
        print(f"note: {flag}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    records = harness.load_records_csv(args.records)
    sizes = None
    if args.instances:
        sizes = {
            inst.instance_id: inst.size
            for inst in harness.load_instance_manifest(args.instances)
        }
    report = harness.build_report(records, sizes)
    written = harness.emit_csv(report, args.out_dir)
    written += charts.emit_svg(report, args.out_dir)
    for path in written:
        print(f"wrote {path}")
    for flag in report.flags:
        print(f"note: {flag}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csp2c",
        description="Generate, check, and benchmark C programs encoding constraint problems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse an XCSP3 file and print a summary")
    p.add_argument("file")
    p.add_argument("--machine", action="store_true", help="JSON output")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("gen", help="generate C programs for a version range")
    p.add_argument("file")
    p.add_argument("--family", choices=["extensional", "intensional"], required=True)
    p.add_argument("--versions", default="all", help='"all" or comma list, e.g. 1,5,8')
    p.add_argument("--dialect", choices=["klee", "llbmc", "concrete"], default="klee")
    p.add_argument("--out-dir", default="generated")
    p.add_argument("--machine", action="store_true", help="JSON output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="brute-force satisfiability of an instance")
    p.add_argument("file")
    p.add_argument("--limit", type=int, default=10**7, help="max assignments to enumerate")
    p.add_argument("--machine", action="store_true", help="JSON output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="differential-check generated code against the solver")
    p.add_argument("file")
    p.add_argument("--versions", default="all")
    p.add_argument(
        "--cc",
        default=default_compile_command(),
        help="compiler template with {src} and {out} (env CSP2C_CC)",
    )
    p.add_argument("--bound", type=int, default=4096, help="max exhaustive assignments")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--machine", action="store_true", help="JSON output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run external tools over a benchmark matrix")
    p.add_argument("--tools", required=True, help="tool manifest (JSON)")
    p.add_argument("--instances", required=True, help="instance manifest (JSON)")
    p.add_argument("--out-dir", default="bench-out")
    p.add_argument("--versions", default="all")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument(
        "--allow-parallel-timings",
        action="store_true",
        help="permit workers > 1; records are stamped as indicative",
    )
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="rebuild report tables/charts from raw records")
    p.add_argument("records", help="raw.csv from a previous bench run")
    p.add_argument("--instances", help="instance manifest for size ordering")
    p.add_argument("--out-dir", default="bench-out")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
