"""Emit C programs that encode a constraint instance.

One instance expands into a family of semantically equivalent programs, one
per row of the version matrix below. Reaching the distinguished `assert(0)`
at the end of a program is possible exactly when the instance is
satisfiable, which is what makes the programs usable as analysis-tool
benchmarks.

Version matrix (construct x operator x grouping):

  extensional  1..6  = if     x (logical | bitwise) x (no | yes | all)
               7..12 = assume x (logical | bitwise) x (no | yes | all)
  intensional  1, 6  = (if | assume) x NOP x no   (one statement per atom)
               2..5  = if     x (logical | bitwise) x (yes | all)
               7..10 = assume x (logical | bitwise) x (yes | all)

Three output dialects share the constraint encoding byte for byte: `klee`
(klee_make_symbolic / klee_assume), `llbmc` (nondet init / __llbmc_assume),
and `concrete`, a plain executable that reads one integer per variable from
argv and prints SAT-REACHED when the encoded constraints accept them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping, Sequence

from .model import (
    AllDifferent,
    Binary,
    Const,
    Constraint,
    CspInstance,
    Expr,
    INT32_MAX,
    INT32_MIN,
    IntensionConstraint,
    Placeholder,
    Polarity,
    TableConstraint,
    Unary,
    Var,
    instantiate_group,
)

SAT_MARKER = "SAT-REACHED"
WRAP_COLUMN = 100
_DIST_MACRO = "#define dist(a,b) ((a)>(b)?(a)-(b):(b)-(a))"


class CodegenError(Exception):
    pass


class Family(Enum):
    EXTENSIONAL = "extensional"
    INTENSIONAL = "intensional"


class Construct(Enum):
    IF = "if"
    ASSUME = "assume"


class Operator(Enum):
    LOGICAL = "logical"
    BITWISE = "bitwise"
    NOP = "nop"


class Grouping(Enum):
    NONE = "no"
    PER_GROUP = "yes"
    WHOLE = "all"


class Dialect(Enum):
    KLEE = "klee"
    LLBMC = "llbmc"
    CONCRETE = "concrete"


_EXT_ROWS: tuple[tuple[Construct, Operator, Grouping], ...] = (
    (Construct.IF, Operator.LOGICAL, Grouping.NONE),
    (Construct.IF, Operator.LOGICAL, Grouping.PER_GROUP),
    (Construct.IF, Operator.LOGICAL, Grouping.WHOLE),
    (Construct.IF, Operator.BITWISE, Grouping.NONE),
    (Construct.IF, Operator.BITWISE, Grouping.PER_GROUP),
    (Construct.IF, Operator.BITWISE, Grouping.WHOLE),
    (Construct.ASSUME, Operator.LOGICAL, Grouping.NONE),
    (Construct.ASSUME, Operator.LOGICAL, Grouping.PER_GROUP),
    (Construct.ASSUME, Operator.LOGICAL, Grouping.WHOLE),
    (Construct.ASSUME, Operator.BITWISE, Grouping.NONE),
    (Construct.ASSUME, Operator.BITWISE, Grouping.PER_GROUP),
    (Construct.ASSUME, Operator.BITWISE, Grouping.WHOLE),
)

_INT_ROWS: tuple[tuple[Construct, Operator, Grouping], ...] = (
    (Construct.IF, Operator.NOP, Grouping.NONE),
    (Construct.IF, Operator.LOGICAL, Grouping.PER_GROUP),
    (Construct.IF, Operator.LOGICAL, Grouping.WHOLE),
    (Construct.IF, Operator.BITWISE, Grouping.PER_GROUP),
    (Construct.IF, Operator.BITWISE, Grouping.WHOLE),
    (Construct.ASSUME, Operator.NOP, Grouping.NONE),
    (Construct.ASSUME, Operator.LOGICAL, Grouping.PER_GROUP),
    (Construct.ASSUME, Operator.LOGICAL, Grouping.WHOLE),
    (Construct.ASSUME, Operator.BITWISE, Grouping.PER_GROUP),
    (Construct.ASSUME, Operator.BITWISE, Grouping.WHOLE),
)

_ROWS = {Family.EXTENSIONAL: _EXT_ROWS, Family.INTENSIONAL: _INT_ROWS}


def version_count(family: Family) -> int:
    return len(_ROWS[family])


@dataclass(frozen=True)
class TransformSpec:
    family: Family
    construct: Construct
    operator: Operator
    grouping: Grouping
    dialect: Dialect = Dialect.KLEE

    @property
    def features(self) -> tuple[Construct, Operator, Grouping]:
        return (self.construct, self.operator, self.grouping)

    @property
    def version(self) -> int:
        try:
            return _ROWS[self.family].index(self.features) + 1
        except ValueError:
            raise CodegenError(
                f"{self.family.value} has no version with features "
                f"({self.construct.value}, {self.operator.value}, {self.grouping.value})"
            ) from None

    @property
    def version_label(self) -> str:
        return f"{self.family.value}{self.version}"


def version_to_spec(family: Family, version: int, dialect: Dialect = Dialect.KLEE) -> TransformSpec:
    rows = _ROWS[family]
    if not 1 <= version <= len(rows):
        raise CodegenError(
            f"{family.value} version must be in 1..{len(rows)}, got {version}"
        )
    construct, operator, grouping = rows[version - 1]
    return TransformSpec(family, construct, operator, grouping, dialect)


@dataclass(frozen=True)
class GeneratedProgram:
    source_text: str
    version_label: str
    statement_count: int
    var_map: Mapping[str, str]
    line_count: int
    instance_name: str
    dialect: Dialect
    # the rendered constraint-encoding statements, for structural checks
    constraint_lines: tuple[str, ...]


def output_filename(program: GeneratedProgram) -> str:
    return f"{program.instance_name}__{program.version_label}__{program.dialect.value}.c"


# ---------------------------------------------------------------------------
# C expression rendering (precedence-aware, canonical spacing)
# ---------------------------------------------------------------------------

_PREC = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "&": 4,
    "==": 5,
    "!=": 5,
    "<": 6,
    "<=": 6,
    ">": 6,
    ">=": 6,
    "+": 7,
    "-": 7,
    "*": 8,
}
_UNARY_PREC = 9
_PRIMARY_PREC = 10
# regrouping is harmless for these, so equal-precedence right operands skip parens
_ASSOCIATIVE = {"+", "*", "&&", "||", "&", "|"}

_C_OP = {
    "add": "+",
    "sub": "-",
    "mul": "*",
    "eq": "==",
    "ne": "!=",
    "lt": "<",
    "le": "<=",
    "gt": ">",
    "ge": ">=",
}


def _spaced(op: str) -> str:
    return f" {op} " if op in ("&&", "||", "&", "|") else op


def _render_expr(expr: Expr, operator: Operator, c_names: Mapping[str, str]) -> tuple[str, int]:
    """Render to C text; returns (text, precedence of its top operator)."""
    if isinstance(expr, Const):
        # parenthesized when negative: a bare minus next to `-`/`--` tokenizes wrong
        if expr.value < 0:
            return f"({expr.value})", _PRIMARY_PREC
        return str(expr.value), _PRIMARY_PREC
    if isinstance(expr, Var):
        return c_names[expr.name], _PRIMARY_PREC
    if isinstance(expr, Placeholder):
        raise CodegenError(f"uninstantiated placeholder %{expr.index}")
    if isinstance(expr, Unary):
        text, prec = _render_expr(expr.operand, operator, c_names)
        if expr.op == "abs":
            return f"abs({text})", _PRIMARY_PREC
        if prec < _UNARY_PREC:
            text = f"({text})"
        if expr.op == "neg":
            return f"(-{text})", _PRIMARY_PREC
        return f"!{text}", _UNARY_PREC

    assert isinstance(expr, Binary)
    if expr.op == "dist":
        left, _ = _render_expr(expr.left, operator, c_names)
        right, _ = _render_expr(expr.right, operator, c_names)
        return f"dist({left},{right})", _PRIMARY_PREC
    if expr.op in ("and", "or"):
        bitwise = operator is Operator.BITWISE
        c_op = ("&" if bitwise else "&&") if expr.op == "and" else ("|" if bitwise else "||")
        prec = _PREC[c_op]
        left = _render_truth(expr.left, operator, c_names, coerce=bitwise)
        right = _render_truth(expr.right, operator, c_names, coerce=bitwise)
        if left[1] < prec:
            left = (f"({left[0]})", prec)
        if right[1] < prec:
            right = (f"({right[0]})", prec)
        return f"{left[0]}{_spaced(c_op)}{right[0]}", prec
    c_op = _C_OP[expr.op]
    prec = _PREC[c_op]
    left, lp = _render_expr(expr.left, operator, c_names)
    right, rp = _render_expr(expr.right, operator, c_names)
    if lp < prec:
        left = f"({left})"
    if rp < prec or (rp == prec and c_op not in _ASSOCIATIVE):
        right = f"({right})"
    return f"{left}{_spaced(c_op)}{right}", prec


def _is_boolean_valued(expr: Expr) -> bool:
    if isinstance(expr, Binary):
        return expr.op in ("eq", "ne", "lt", "le", "gt", "ge", "and", "or")
    return isinstance(expr, Unary) and expr.op == "not"


def _render_truth(
    expr: Expr, operator: Operator, c_names: Mapping[str, str], *, coerce: bool
) -> tuple[str, int]:
    """Render an and/or operand; bitwise joins need 0/1 values, so non-boolean
    operands get an explicit !=0 (C's && and || already truth-test)."""
    text, prec = _render_expr(expr, operator, c_names)
    if coerce and not _is_boolean_valued(expr):
        if prec < _PREC["!="]:
            text = f"({text})"
        return f"{text}!=0", _PREC["!="]
    return text, prec


def _as_piece(expr: Expr, operator: Operator, c_names: Mapping[str, str], joiner_prec: int) -> str:
    text, prec = _render_expr(expr, operator, c_names)
    return f"({text})" if prec < joiner_prec else text


def _conjuncts(expr: Expr) -> list[Expr]:
    if isinstance(expr, Binary) and expr.op == "and":
        return _conjuncts(expr.left) + _conjuncts(expr.right)
    return [expr]


# ---------------------------------------------------------------------------
# Encoding units and statement layout
# ---------------------------------------------------------------------------

# VIOLATION: the pieces form a disjunction that is true when some constraint
# is broken (negative tables). SATISFACTION: the pieces form the condition
# under which the encoded constraints hold.
_VIOLATION = "violation"
_SATISFACTION = "satisfaction"


@dataclass(frozen=True)
class _Unit:
    mode: str
    pieces: tuple[str, ...]
    joiner: str


def _join_ops(operator: Operator) -> tuple[str, str]:
    if operator is Operator.BITWISE:
        return " & ", " | "
    return " && ", " || "


def _tuple_conjunctions(
    constraint: TableConstraint, operator: Operator, c_names: Mapping[str, str]
) -> list[str]:
    and_op, _ = _join_ops(operator)
    out = []
    for row in constraint.tuples:
        atoms = [f"{c_names[v]}=={value}" for v, value in zip(constraint.scope, row)]
        out.append("(" + and_op.join(atoms) + ")")
    return out


def _condition_pieces(
    constraint: Constraint, operator: Operator, c_names: Mapping[str, str]
) -> list[str]:
    """Conjunct pieces whose AND is the constraint's satisfaction condition."""
    and_op, or_op = _join_ops(operator)
    and_prec = _PREC[and_op.strip()]
    if isinstance(constraint, AllDifferent):
        scope = constraint.scope
        return [
            f"{c_names[a]}!={c_names[b]}"
            for i, a in enumerate(scope)
            for b in scope[i + 1 :]
        ]
    if isinstance(constraint, TableConstraint):
        disjunction = or_op.join(_tuple_conjunctions(constraint, operator, c_names))
        if constraint.polarity is Polarity.SUPPORTS:
            return [f"({disjunction})"]
        return [f"!({disjunction})"]
    return [
        _as_piece(conjunct, operator, c_names, and_prec)
        for conjunct in _conjuncts(constraint.expr)
    ]


def _extensional_units(
    grouped: list[list[TableConstraint]], operator: Operator, c_names: Mapping[str, str]
) -> list[_Unit]:
    and_op, or_op = _join_ops(operator)

    def violation(constraints: Sequence[TableConstraint]) -> _Unit:
        pieces: list[str] = []
        for c in constraints:
            pieces.extend(_tuple_conjunctions(c, operator, c_names))
        return _Unit(_VIOLATION, tuple(pieces), or_op)

    def satisfaction(constraints: Sequence[TableConstraint]) -> _Unit:
        pieces: list[str] = []
        for c in constraints:
            pieces.extend(_condition_pieces(c, operator, c_names))
        return _Unit(_SATISFACTION, tuple(pieces), and_op)

    units = []
    for bucket in grouped:
        if all(c.polarity is Polarity.CONFLICTS for c in bucket):
            units.append(violation(bucket))
        else:
            units.append(satisfaction(bucket))
    return units


def _intensional_units(
    grouped: list[list[Constraint]], operator: Operator, c_names: Mapping[str, str]
) -> list[_Unit]:
    and_op, _ = _join_ops(operator)
    units: list[_Unit] = []
    if operator is Operator.NOP:
        # one statement per atomic condition
        for bucket in grouped:
            for constraint in bucket:
                for piece in _condition_pieces(constraint, operator, c_names):
                    units.append(_Unit(_SATISFACTION, (piece,), and_op))
        return units
    for bucket in grouped:
        pieces: list[str] = []
        for constraint in bucket:
            pieces.extend(_condition_pieces(constraint, operator, c_names))
        units.append(_Unit(_SATISFACTION, tuple(pieces), and_op))
    return units


def _wrap(head: str, pieces: Sequence[str], joiner: str, tail: str) -> list[str]:
    one_line = head + joiner.join(pieces) + tail
    if len(one_line) <= WRAP_COLUMN or len(pieces) == 1:
        return [one_line]
    indent = " " * len(head)
    trailing_op = joiner.rstrip()
    lines = [head + pieces[0] + trailing_op]
    for piece in pieces[1:-1]:
        lines.append(indent + piece + trailing_op)
    lines.append(indent + pieces[-1] + tail)
    return lines


# ---------------------------------------------------------------------------
# Program assembly
# ---------------------------------------------------------------------------


def _c_names(csp: CspInstance) -> dict[str, str]:
    keywords = {
        "auto", "break", "case", "char", "const", "continue", "default", "do",
        "double", "else", "enum", "extern", "float", "for", "goto", "if", "int",
        "long", "register", "return", "short", "signed", "sizeof", "static",
        "struct", "switch", "typedef", "union", "unsigned", "void", "volatile",
        "while", "main", "abs", "dist", "exit", "printf", "atoi", "assert",
    }
    used: set[str] = set()
    mapping: dict[str, str] = {}
    for var in csp.variables:
        base = re.sub(r"[^A-Za-z0-9_]", "_", var.id)
        if not base or base[0].isdigit():
            base = "v_" + base
        if base in keywords:
            base = base + "_v"
        candidate = base
        k = 1
        while candidate in used:
            candidate = f"{base}_{k}"
            k += 1
        used.add(candidate)
        mapping[var.id] = candidate
    return mapping


def _uses_dist(constraints: Sequence[Constraint]) -> bool:
    def in_expr(expr: Expr) -> bool:
        if isinstance(expr, Binary):
            return expr.op == "dist" or in_expr(expr.left) or in_expr(expr.right)
        if isinstance(expr, Unary):
            return in_expr(expr.operand)
        return False

    return any(
        isinstance(c, IntensionConstraint) and in_expr(c.expr) for c in constraints
    )


def _check_value_ranges(csp: CspInstance, constraints: Sequence[Constraint]) -> None:
    for var in csp.variables:
        for lo, hi in var.domain.ranges:
            if lo < INT32_MIN or hi > INT32_MAX:
                raise CodegenError(f"domain of {var.id} exceeds 32-bit signed range")
    for c in constraints:
        if isinstance(c, TableConstraint):
            for row in c.tuples:
                for value in row:
                    if value < INT32_MIN or value > INT32_MAX:
                        raise CodegenError(
                            f"tuple value {value} exceeds 32-bit signed range"
                        )


def _grouped_constraints(csp: CspInstance, grouping: Grouping) -> list[list[Constraint]]:
    per_group = [instantiate_group(g) for g in csp.groups]
    if grouping is Grouping.NONE:
        return [[c] for bucket in per_group for c in bucket]
    if grouping is Grouping.PER_GROUP:
        return per_group
    merged = [c for bucket in per_group for c in bucket]
    return [merged] if merged else []


def _domain_condition(var_id: str, csp: CspInstance, spec: TransformSpec, c_names: Mapping[str, str]) -> tuple[list[str], str]:
    """Pieces and joiner for one variable's domain membership condition."""
    domain = csp.domain_of(var_id)
    name = c_names[var_id]
    if domain.is_contiguous:
        # common preamble shape, identical across versions
        return [f"{name}>={domain.lo} && {name}<={domain.hi}"], " && "
    _, or_op = _join_ops(spec.operator if spec.operator is not Operator.NOP else Operator.LOGICAL)
    return [f"{name}=={value}" for value in domain.values()], or_op


def transform(csp: CspInstance, spec: TransformSpec) -> GeneratedProgram:
    """Emit the C program for one cell of the version matrix."""
    spec.version  # validates the feature triple
    if not csp.variables:
        raise CodegenError("instance has no variables")
    constraints = csp.constraints()
    if spec.family is Family.EXTENSIONAL:
        bad = [c for c in constraints if not isinstance(c, TableConstraint)]
        if bad:
            raise CodegenError(
                "extensional transform requires table constraints only; "
                f"found {type(bad[0]).__name__}"
            )
    else:
        bad = [c for c in constraints if isinstance(c, TableConstraint)]
        if bad:
            raise CodegenError(
                "intensional transform cannot encode table constraints"
            )
    for c in constraints:
        if isinstance(c, TableConstraint) and not c.tuples:
            raise CodegenError("cannot encode a table constraint with no tuples")
    _check_value_ranges(csp, constraints)

    c_names = _c_names(csp)
    grouped = _grouped_constraints(csp, spec.grouping)
    if spec.family is Family.EXTENSIONAL:
        units = _extensional_units(grouped, spec.operator, c_names)  # type: ignore[arg-type]
    else:
        units = _intensional_units(grouped, spec.operator, c_names)
    guarded = (
        spec.family is Family.INTENSIONAL
        and spec.construct is Construct.IF
        and spec.grouping is Grouping.WHOLE
        and bool(units)
    )

    concrete = spec.dialect is Dialect.CONCRETE
    assume_fn = "__llbmc_assume" if spec.dialect is Dialect.LLBMC else "klee_assume"
    fail_exit = "exit(1);" if concrete else "exit(0);"
    indent = "    "

    body: list[str] = []
    order = [v.id for v in csp.variables]

    # declarations
    decl = indent + "int " + ", ".join(c_names[v] for v in order) + ";"
    if len(decl) <= WRAP_COLUMN:
        body.append(decl)
    else:
        body.extend(_wrap(indent + "int ", [c_names[v] for v in order], ", ", ";"))

    # symbolic marking / argv reading
    if concrete:
        body.append(indent + f"if (argc != {len(order) + 1}) return 2;")
        body.append(indent + "/* read the candidate assignment from argv */")
        for i, v in enumerate(order, start=1):
            body.append(indent + f"{c_names[v]} = atoi(argv[{i}]);")
    elif spec.dialect is Dialect.KLEE:
        body.append(indent + "/* declare variables symbolic */")
        for v in order:
            name = c_names[v]
            body.append(indent + f'klee_make_symbolic(&{name},sizeof({name}),"{name}");')
    else:
        body.append(indent + "/* declare variables nondeterministic */")
        for v in order:
            body.append(indent + f"{c_names[v]} = __llbmc_nondef_int();")

    # domains
    body.append(indent + "/* enforce variable domains */")
    for v in order:
        pieces, joiner = _domain_condition(v, csp, spec, c_names)
        if concrete:
            body.extend(_wrap(indent + "if (!(", pieces, joiner, f")) {fail_exit}"))
        else:
            body.extend(_wrap(indent + f"{assume_fn}(", pieces, joiner, ");"))

    # constraints
    constraint_lines: list[str] = []
    if units and not guarded:
        body.append(indent + "/* constraints */")
        for unit in units:
            if unit.mode is _VIOLATION:
                if spec.construct is Construct.IF or concrete:
                    lines = _wrap(indent + "if (", unit.pieces, unit.joiner, f") {fail_exit}")
                else:
                    lines = _wrap(indent + f"{assume_fn}(!(", unit.pieces, unit.joiner, "));")
            elif spec.construct is Construct.IF:
                lines = _wrap(indent + "if (", unit.pieces, unit.joiner, f"); else {fail_exit}")
            elif concrete:
                lines = _wrap(indent + "if (!(", unit.pieces, unit.joiner, f")) {fail_exit}")
            else:
                lines = _wrap(indent + f"{assume_fn}(", unit.pieces, unit.joiner, ");")
            constraint_lines.extend(lines)
            body.extend(lines)

    # distinguished point
    body.append(indent + "/* CSP is satisfiable */")
    if guarded:
        (unit,) = units
        if concrete:
            tail = f') {{ printf("{SAT_MARKER}\\n"); return 0; }}'
        else:
            tail = ") assert(0);"
        lines = _wrap(indent + "if (", unit.pieces, unit.joiner, tail)
        constraint_lines.extend(lines)
        body.extend(lines)
        body.append(indent + ("return 1;" if concrete else "return 0;"))
    elif concrete:
        body.append(indent + f'printf("{SAT_MARKER}\\n");')
        body.append(indent + "return 0;")
    else:
        body.append(indent + "assert(0);")
        body.append(indent + "return 0;")

    header = _file_header(csp, spec, constraints)
    main_sig = "int main(int argc, char **argv) {" if concrete else "int main(void) {"
    source = "\n".join(header + [main_sig] + body + ["}"]) + "\n"

    return GeneratedProgram(
        source_text=source,
        version_label=spec.version_label,
        statement_count=len(units),
        var_map=c_names,
        line_count=source.count("\n"),
        instance_name=csp.name,
        dialect=spec.dialect,
        constraint_lines=tuple(constraint_lines),
    )


def _file_header(csp: CspInstance, spec: TransformSpec, constraints: Sequence[Constraint]) -> list[str]:
    lines = [
        f"/* {csp.name}: {spec.family.value} version {spec.version} "
        f"({spec.construct.value}, {spec.operator.value}, grouping={spec.grouping.value}) */"
    ]
    if spec.dialect is Dialect.CONCRETE:
        lines += ["#include <stdio.h>", "#include <stdlib.h>"]
    elif spec.dialect is Dialect.KLEE:
        lines += ["#include <assert.h>", "#include <stdlib.h>", "#include <klee/klee.h>"]
    else:
        lines += [
            "#include <assert.h>",
            "#include <stdlib.h>",
            "",
            "void __llbmc_assume(int condition);",
            "int __llbmc_nondef_int(void);",
        ]
    if _uses_dist(constraints):
        lines += ["", _DIST_MACRO]
    lines.append("")
    return lines


def emit_concrete_driver(csp: CspInstance, spec: TransformSpec) -> GeneratedProgram:
    """Same encoding as transform(), as a runnable argv-driven checker."""
    return transform(csp, replace(spec, dialect=Dialect.CONCRETE))
