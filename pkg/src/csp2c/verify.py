"""Differential testing of generated programs against the brute-force oracle.

Programs are checked the hard way: emit the concrete dialect, compile it
with an external C compiler, and run the executable on assignments, so the
verification path shares no evaluation code with the oracle. For every
assignment the driver must print the success marker exactly when the oracle
says all constraints hold.
"""

from __future__ import annotations

import os
import random
import shlex
import shutil
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

from .codegen import (
    GeneratedProgram,
    SAT_MARKER,
    TransformSpec,
    emit_concrete_driver,
    output_filename,
)
from .model import CspInstance
from .oracle import Assignment, all_assignments, constraint_satisfied, solve

DEFAULT_EXHAUSTIVE_BOUND = 4096
DEFAULT_SAMPLE_COUNT = 256
DEFAULT_CC = "cc -O1 -o {out} {src}"


class VerifyError(Exception):
    pass


class CompileError(VerifyError):
    def __init__(self, command: str, output: str):
        self.command = command
        self.output = output
        super().__init__(f"compile failed: {command}\n{output}")


class VerifyStatus(Enum):
    PASS = "pass"
    FAIL = "fail"
    SAMPLED = "sampled"
    SKIPPED_TOO_LARGE = "skipped-too-large"


@dataclass(frozen=True)
class Mismatch:
    version_label: str
    assignment: tuple[tuple[str, int], ...]
    expected: bool
    observed: bool


@dataclass
class VerificationReport:
    instance: str
    versions: list[str]
    assignments_checked: int
    mismatches: list[Mismatch] = field(default_factory=list)
    status: VerifyStatus = VerifyStatus.PASS

    @property
    def passed(self) -> bool:
        return self.status is VerifyStatus.PASS


def default_compile_command() -> str:
    return os.environ.get("CSP2C_CC", DEFAULT_CC)


def compile_program(program: GeneratedProgram, compile_cmd: str, workdir: str) -> str:
    """Write the source, run the compiler template, return the executable path."""
    os.makedirs(workdir, exist_ok=True)
    src = os.path.join(workdir, output_filename(program))
    exe = src[:-2]
    with open(src, "w", encoding="utf-8") as fh:
        fh.write(program.source_text)
    command = compile_cmd.format(src=src, out=exe)
    proc = subprocess.run(
        shlex.split(command), capture_output=True, text=True, timeout=120
    )
    if proc.returncode != 0 or not os.path.exists(exe):
        raise CompileError(command, proc.stdout + proc.stderr)
    return exe


def _driver_accepts(exe: str, order: Sequence[str], assignment: Assignment) -> bool:
    args = [exe] + [str(assignment[v]) for v in order]
    proc = subprocess.run(args, capture_output=True, text=True, timeout=60)
    return proc.returncode == 0 and SAT_MARKER in proc.stdout


def _run_all(
    exe: str,
    order: Sequence[str],
    assignments: Sequence[Assignment],
    workers: int,
) -> list[bool]:
    if workers <= 1:
        return [_driver_accepts(exe, order, a) for a in assignments]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda a: _driver_accepts(exe, order, a), assignments))


def _assignment_plan(
    csp: CspInstance, bound: int, sample_count: int, rng_seed: int
) -> tuple[list[Assignment], bool]:
    """Exhaustive product when it fits the bound, otherwise a seeded sample
    that always includes the oracle witness when one exists."""
    if csp.assignment_space_size <= bound:
        return list(all_assignments(csp)), True
    rng = random.Random(rng_seed)
    plan: list[Assignment] = []
    result = solve(csp, limit=min(csp.assignment_space_size, 10**6))
    if result.witness is not None:
        plan.append(result.witness)
    order = [v.id for v in csp.variables]
    pools = [v.domain.values() for v in csp.variables]
    while len(plan) < sample_count:
        plan.append({v: rng.choice(pool) for v, pool in zip(order, pools)})
    return plan, False


def differential_check(
    csp: CspInstance,
    versions: Sequence[TransformSpec],
    compile_cmd: str | None = None,
    *,
    bound: int = DEFAULT_EXHAUSTIVE_BOUND,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    workers: int = 1,
    workdir: str | None = None,
    emitter: Callable[[CspInstance, TransformSpec], GeneratedProgram] = emit_concrete_driver,
    rng_seed: int = 0,
) -> VerificationReport:
    """Compare every version's concrete driver against the oracle.

    Exhaustive when the assignment space fits `bound`; sampled (status
    SAMPLED) when it does not and `sample_count` > 0; SKIPPED_TOO_LARGE
    otherwise. Compile failures raise CompileError with compiler output.
    """
    compile_cmd = compile_cmd or default_compile_command()
    labels = [spec.version_label for spec in versions]
    if csp.assignment_space_size > bound and sample_count <= 0:
        return VerificationReport(
            instance=csp.name,
            versions=labels,
            assignments_checked=0,
            status=VerifyStatus.SKIPPED_TOO_LARGE,
        )

    assignments, exhaustive = _assignment_plan(csp, bound, sample_count, rng_seed)
    constraints = csp.constraints()
    expected = [
        all(constraint_satisfied(c, a) for c in constraints) for a in assignments
    ]
    order = [v.id for v in csp.variables]

    mismatches: list[Mismatch] = []
    own_tmp = workdir is None
    tmp = workdir or tempfile.mkdtemp(prefix="csp2c-verify-")
    try:
        for spec in versions:
            program = emitter(csp, spec)
            exe = compile_program(program, compile_cmd, tmp)
            observed = _run_all(exe, order, assignments, workers)
            for a, want, got in zip(assignments, expected, observed):
                if want != got:
                    mismatches.append(
                        Mismatch(
                            version_label=spec.version_label,
                            assignment=tuple(sorted(a.items())),
                            expected=want,
                            observed=got,
                        )
                    )
    finally:
        if own_tmp:
            _cleanup(tmp)

    mismatches.sort(key=lambda m: (m.version_label, m.assignment))
    if mismatches:
        status = VerifyStatus.FAIL
    elif exhaustive:
        status = VerifyStatus.PASS
    else:
        status = VerifyStatus.SAMPLED
    return VerificationReport(
        instance=csp.name,
        versions=labels,
        assignments_checked=len(assignments),
        mismatches=mismatches,
        status=status,
    )


def cross_version_equivalence(
    csp: CspInstance,
    versions: Sequence[TransformSpec],
    compile_cmd: str | None = None,
    *,
    bound: int = DEFAULT_EXHAUSTIVE_BOUND,
    workers: int = 1,
    workdir: str | None = None,
    emitter: Callable[[CspInstance, TransformSpec], GeneratedProgram] = emit_concrete_driver,
) -> bool:
    """True iff all versions accept exactly the same assignments."""
    compile_cmd = compile_cmd or default_compile_command()
    if csp.assignment_space_size > bound:
        raise VerifyError(
            f"assignment space {csp.assignment_space_size} exceeds bound {bound}"
        )
    assignments = list(all_assignments(csp))
    order = [v.id for v in csp.variables]
    own_tmp = workdir is None
    tmp = workdir or tempfile.mkdtemp(prefix="csp2c-verify-")
    try:
        accepting: list[frozenset] = []
        for spec in versions:
            program = emitter(csp, spec)
            exe = compile_program(program, compile_cmd, tmp)
            observed = _run_all(exe, order, assignments, workers)
            accepting.append(
                frozenset(
                    tuple(sorted(a.items()))
                    for a, ok in zip(assignments, observed)
                    if ok
                )
            )
    finally:
        if own_tmp:
            _cleanup(tmp)
    return all(s == accepting[0] for s in accepting[1:])


def _cleanup(path: str) -> None:
    shutil.rmtree(path, ignore_errors=True)
