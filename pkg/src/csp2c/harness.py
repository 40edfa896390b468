"""Run external analysis tools over generated benchmarks and report results.

Tools are described by a manifest (JSON): a run command template, an
optional prepare step (e.g. bitcode compilation), a wall-clock timeout, and
a success pattern that classifies "the distinguished point was reached".
Analysis tools run once per (instance x version); baseline solvers run once
per instance on the original XCSP3 file and anchor time normalization.

Timeout enforcement kills the whole process group, so no child survives
past timeout + grace. Timing runs default to a single worker; parallel
timings must be requested explicitly and get stamped as indicative.
"""

from __future__ import annotations

import json
import os
import re
import shlex
import signal
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

DEFAULT_TIMEOUT_S = 1000.0
KILL_GRACE_S = 5.0


class HarnessError(Exception):
    pass


class ToolKind(Enum):
    ANALYSIS = "analysis"
    BASELINE = "baseline"


class Outcome(Enum):
    REACHED = "reached"
    NOT_REACHED = "not-reached"
    TIMEOUT = "timeout"
    TOOL_ERROR = "tool-error"


@dataclass(frozen=True)
class ToolSpec:
    name: str
    run: str
    prepare: str | None = None
    timeout_s: float = DEFAULT_TIMEOUT_S
    success_pattern: str = ""
    kind: ToolKind = ToolKind.ANALYSIS
    # which generated dialect this tool consumes ("klee" or "llbmc")
    dialect: str = "klee"

    def __post_init__(self) -> None:
        if not self.run:
            raise HarnessError(f"tool {self.name!r} has no run command")
        if self.timeout_s <= 0:
            raise HarnessError(f"tool {self.name!r} has non-positive timeout")


@dataclass(frozen=True)
class BenchInstance:
    path: str
    family: str
    size: int
    expected: str | None = None

    @property
    def instance_id(self) -> str:
        return os.path.splitext(os.path.basename(self.path))[0]


@dataclass
class RunRecord:
    tool: str
    instance: str
    version: str
    outcome: Outcome
    wallclock_s: float
    normalized: float | None = None
    note: str = ""


@dataclass(frozen=True)
class RobustnessRow:
    tool: str
    version: str
    mean_normalized: float | None
    timeouts: int
    n: int


@dataclass(frozen=True)
class ScalabilityRow:
    tool: str
    size_index: int
    timeouts: int


@dataclass
class Report:
    robustness: list[RobustnessRow]
    scalability: list[ScalabilityRow]
    records: list[RunRecord]
    flags: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Manifests
# ---------------------------------------------------------------------------


def load_tool_manifest(path: str) -> list[ToolSpec]:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    tools = []
    for entry in raw:
        tools.append(
            ToolSpec(
                name=entry["name"],
                run=entry["run"],
                prepare=entry.get("prepare"),
                timeout_s=float(entry.get("timeout_s", DEFAULT_TIMEOUT_S)),
                success_pattern=entry.get("success_pattern", ""),
                kind=ToolKind(entry.get("kind", "analysis")),
                dialect=entry.get("dialect", "klee"),
            )
        )
    return tools


def load_instance_manifest(path: str) -> list[BenchInstance]:
    base = os.path.dirname(os.path.abspath(path))
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    instances = []
    for entry in raw:
        p = entry["path"]
        if not os.path.isabs(p):
            p = os.path.join(base, p)
        instances.append(
            BenchInstance(
                path=p,
                family=entry["family"],
                size=int(entry["size"]),
                expected=entry.get("expected"),
            )
        )
    return instances


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------


def _run_with_timeout(command: str, timeout_s: float) -> tuple[int | None, str, float, bool]:
    """Run a shell-split command in its own process group.

    Returns (returncode or None on spawn failure, combined output, wallclock,
    timed_out). On timeout the process group gets SIGTERM, then SIGKILL
    after a short grace.
    """
    argv = shlex.split(command)
    start = time.monotonic()
    try:
        proc = subprocess.Popen(
            argv,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            text=True,
            start_new_session=True,
        )
    except (FileNotFoundError, PermissionError) as exc:
        return None, str(exc), time.monotonic() - start, False
    try:
        output, _ = proc.communicate(timeout=timeout_s)
        return proc.returncode, output or "", time.monotonic() - start, False
    except subprocess.TimeoutExpired:
        _signal_group(proc.pid, signal.SIGTERM)
        try:
            output, _ = proc.communicate(timeout=2.0)
        except subprocess.TimeoutExpired:
            _signal_group(proc.pid, signal.SIGKILL)
            output, _ = proc.communicate()
        return proc.returncode, output or "", time.monotonic() - start, True


def _signal_group(pid: int, sig: signal.Signals) -> None:
    try:
        os.killpg(os.getpgid(pid), sig)
    except ProcessLookupError:
        pass


def _classify(
    returncode: int | None, output: str, timed_out: bool, pattern: str
) -> Outcome:
    # precedence: Timeout > ToolError > Reached > NotReached
    if timed_out:
        return Outcome.TIMEOUT
    if returncode is None or (returncode is not None and returncode < 0):
        return Outcome.TOOL_ERROR
    if pattern and re.search(pattern, output):
        return Outcome.REACHED
    return Outcome.NOT_REACHED


def _execute(tool: ToolSpec, src: str, note: str = "") -> RunRecord:
    """Run one tool invocation; instance/version are filled in by the caller."""
    scratch = src + ".out"
    bitcode = os.path.splitext(src)[0] + ".bc"
    subs = {"src": src, "bitcode": bitcode, "out": scratch}
    if tool.prepare:
        rc, output, wall, timed_out = _run_with_timeout(
            tool.prepare.format(**subs), tool.timeout_s
        )
        if timed_out or rc is None or rc != 0:
            return RunRecord(
                tool=tool.name,
                instance="",
                version="",
                outcome=Outcome.TIMEOUT if timed_out else Outcome.TOOL_ERROR,
                wallclock_s=wall,
                note=note,
            )
    rc, output, wall, timed_out = _run_with_timeout(tool.run.format(**subs), tool.timeout_s)
    return RunRecord(
        tool=tool.name,
        instance="",
        version="",
        outcome=_classify(rc, output, timed_out, tool.success_pattern),
        wallclock_s=wall,
        note=note,
    )


def source_path(source_dir: str, instance_id: str, version_label: str, dialect: str) -> str:
    return os.path.join(source_dir, f"{instance_id}__{version_label}__{dialect}.c")


def run_matrix(
    instances: Sequence[BenchInstance],
    version_labels_by_family: Mapping[str, Sequence[str]],
    tools: Sequence[ToolSpec],
    source_dir: str,
    *,
    workers: int = 1,
    allow_parallel_timings: bool = False,
) -> list[RunRecord]:
    """One record per (analysis tool x instance x version) plus one per
    (baseline tool x instance). Missing tool binaries yield tool-error
    records; the run continues."""
    if workers > 1 and not allow_parallel_timings:
        raise HarnessError(
            "workers > 1 distorts timings; pass allow_parallel_timings=True to accept"
        )
    note = "parallel, timings indicative" if workers > 1 else ""

    jobs: list[tuple[ToolSpec, str, str, str]] = []  # tool, src, instance, version
    for tool in tools:
        if tool.kind is ToolKind.BASELINE:
            for inst in instances:
                jobs.append((tool, inst.path, inst.instance_id, ""))
        else:
            for inst in instances:
                for label in version_labels_by_family.get(inst.family, []):
                    src = source_path(source_dir, inst.instance_id, label, tool.dialect)
                    jobs.append((tool, src, inst.instance_id, label))

    def run_job(job: tuple[ToolSpec, str, str, str]) -> RunRecord:
        tool, src, instance_id, version = job
        if tool.kind is ToolKind.ANALYSIS and not os.path.exists(src):
            record = RunRecord(
                tool=tool.name,
                instance=instance_id,
                version=version,
                outcome=Outcome.TOOL_ERROR,
                wallclock_s=0.0,
                note=f"missing source {src}",
            )
            return record
        record = _execute(tool, src, note)
        record.instance = instance_id
        record.version = version
        return record

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run_job, jobs))
    else:
        records = [run_job(job) for job in jobs]

    normalize_records(records, tools)
    return records


def normalize_records(records: list[RunRecord], tools: Sequence[ToolSpec]) -> None:
    """Fill normalized = wallclock / baseline-wallclock per instance, in place.

    The first baseline tool anchors the ratio; records without a usable
    baseline (missing, zero, or errored) keep normalized=None.
    """
    baseline_names = [t.name for t in tools if t.kind is ToolKind.BASELINE]
    if not baseline_names:
        return
    anchor = baseline_names[0]
    baseline_wall = {
        r.instance: r.wallclock_s
        for r in records
        if r.tool == anchor and r.outcome is not Outcome.TOOL_ERROR
    }
    analysis_names = {t.name for t in tools if t.kind is ToolKind.ANALYSIS}
    for r in records:
        if r.tool not in analysis_names:
            continue
        base = baseline_wall.get(r.instance)
        if base is not None and base > 0:
            r.normalized = r.wallclock_s / base


# ---------------------------------------------------------------------------
# Reporting
# ---------------------------------------------------------------------------


def build_report(
    records: Sequence[RunRecord],
    sizes: Mapping[str, int] | None = None,
) -> Report:
    """Aggregate raw records into robustness and scalability tables.

    Robustness means are taken over non-timeout runs that carry a
    normalized time; without any baseline the means fall back to raw
    seconds and the report is flagged. Scalability needs a size per
    instance (from the instance manifest).
    """
    if not records:
        raise HarnessError("no records to report on")
    flags: list[str] = []
    if any(r.note.startswith("parallel") for r in records):
        flags.append("parallel, timings indicative")

    analysis = [r for r in records if r.version]
    if not analysis:
        flags.append("no analysis tools")
    have_normalized = any(r.normalized is not None for r in analysis)
    if analysis and not have_normalized:
        flags.append("no baseline; robustness shows raw seconds")

    cells: dict[tuple[str, str], list[RunRecord]] = {}
    for r in analysis:
        cells.setdefault((r.tool, r.version), []).append(r)
    robustness = []
    for (tool, version), cell in sorted(cells.items()):
        timeouts = sum(1 for r in cell if r.outcome is Outcome.TIMEOUT)
        if have_normalized:
            values = [
                r.normalized
                for r in cell
                if r.normalized is not None and r.outcome is not Outcome.TIMEOUT
            ]
        else:
            values = [
                r.wallclock_s
                for r in cell
                if r.outcome not in (Outcome.TIMEOUT, Outcome.TOOL_ERROR)
            ]
        mean = sum(values) / len(values) if values else None
        robustness.append(
            RobustnessRow(
                tool=tool,
                version=version,
                mean_normalized=mean,
                timeouts=timeouts,
                n=len(cell),
            )
        )

    scalability: list[ScalabilityRow] = []
    if sizes:
        ordered = sorted(sizes.items(), key=lambda kv: (kv[1], kv[0]))
        index_of = {inst: i + 1 for i, (inst, _) in enumerate(ordered)}
        counts: dict[tuple[str, int], int] = {}
        for r in analysis:
            idx = index_of.get(r.instance)
            if idx is None:
                continue
            key = (r.tool, idx)
            counts.setdefault(key, 0)
            if r.outcome is Outcome.TIMEOUT:
                counts[key] += 1
        scalability = [
            ScalabilityRow(tool=tool, size_index=idx, timeouts=n)
            for (tool, idx), n in sorted(counts.items())
        ]
    elif analysis:
        flags.append("no instance sizes; scalability table empty")

    return Report(
        robustness=robustness,
        scalability=scalability,
        records=list(records),
        flags=flags,
    )


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

RAW_CSV_HEADER = "tool,instance,version,outcome,wallclock_s,normalized"
ROBUSTNESS_CSV_HEADER = "tool,version,mean_normalized,timeouts,n"
SCALABILITY_CSV_HEADER = "tool,size_index,timeouts"


def emit_csv(report: Report, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []

    raw_path = os.path.join(out_dir, "raw.csv")
    with open(raw_path, "w", encoding="utf-8") as fh:
        fh.write(RAW_CSV_HEADER + "\n")
        for r in report.records:
            normalized = "" if r.normalized is None else f"{r.normalized:.6f}"
            fh.write(
                f"{r.tool},{r.instance},{r.version},{r.outcome.value},"
                f"{r.wallclock_s:.6f},{normalized}\n"
            )
    written.append(raw_path)

    rob_path = os.path.join(out_dir, "robustness.csv")
    with open(rob_path, "w", encoding="utf-8") as fh:
        fh.write(ROBUSTNESS_CSV_HEADER + "\n")
        for row in report.robustness:
            mean = "" if row.mean_normalized is None else f"{row.mean_normalized:.6f}"
            fh.write(f"{row.tool},{row.version},{mean},{row.timeouts},{row.n}\n")
    written.append(rob_path)

    scal_path = os.path.join(out_dir, "scalability.csv")
    with open(scal_path, "w", encoding="utf-8") as fh:
        fh.write(SCALABILITY_CSV_HEADER + "\n")
        for row in report.scalability:
            fh.write(f"{row.tool},{row.size_index},{row.timeouts}\n")
    written.append(scal_path)
    return written


def load_records_csv(path: str) -> list[RunRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != RAW_CSV_HEADER:
            raise HarnessError(f"unexpected raw CSV header: {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            tool, instance, version, outcome, wall, normalized = line.split(",")
            records.append(
                RunRecord(
                    tool=tool,
                    instance=instance,
                    version=version,
                    outcome=Outcome(outcome),
                    wallclock_s=float(wall),
                    normalized=float(normalized) if normalized else None,
                )
            )
    return records
