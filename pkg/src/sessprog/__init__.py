"""Workbench for a binary-session pi-calculus with priority-annotated
session types: parsing, reduction semantics, type checking with a
priority-constraint solver, a termination measure, and static plus
dynamic progress verification."""

from .measure import emeasure, vcount
from .progress import ProgressVerdict, normal_form_shape, oracle_dynamic, verify_static
from .semantics import (
    CanonState,
    approximant,
    approx_leq,
    canonicalize,
    is_normal_form,
    reachable,
    state_to_process,
    step,
)
from .sestypes import dual_full, dual_strict, obligation, syntactic_dual, unfold, well_formed
from .syntax import (
    INF,
    ParseError,
    parse_process,
    parse_program,
    parse_type,
    pretty_proc,
    pretty_type,
)
from .typecheck import Assignment, CycleWitness, check, check_closed, solve

__all__ = [
    "INF",
    "Assignment",
    "CanonState",
    "CycleWitness",
    "ParseError",
    "ProgressVerdict",
    "approximant",
    "approx_leq",
    "canonicalize",
    "check",
    "check_closed",
    "dual_full",
    "dual_strict",
    "emeasure",
    "is_normal_form",
    "normal_form_shape",
    "obligation",
    "oracle_dynamic",
    "parse_process",
    "parse_program",
    "parse_type",
    "pretty_proc",
    "pretty_type",
    "reachable",
    "solve",
    "state_to_process",
    "step",
    "syntactic_dual",
    "unfold",
    "vcount",
    "verify_static",
    "well_formed",
]
