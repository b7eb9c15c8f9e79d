"""Command-line front end.

Subcommands: check, run, explore, progress, oracle, measure, approx,
dual.  Exit codes: 0 accept/verified/holds, 1 reject/violated, 2 parse
error, 3 internal limit hit (state bound or pair budget).
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .measure import InfiniteIndex, emeasure, vcount
from .progress import NotClosed, Truncated, oracle_dynamic, verify_static
from .semantics import (
    NotUserProcess,
    approximant,
    canonicalize,
    is_normal_form,
    is_user_process,
    reachable,
    state_to_process,
    step,
)
from .sestypes import DepthExceeded, dual_full, dual_strict, dual_strict_path
from .syntax import (
    INF,
    ParseError,
    Process,
    Rec,
    parse_process,
    parse_program,
    parse_type,
    pretty_proc,
    pretty_type,
)
from .typecheck import Assignment, check_closed

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_PARSE = 2
EXIT_LIMIT = 3


def _index_arg(s: str):
    if s == "inf":
        return INF
    n = int(s)
    if n < 0:
        raise argparse.ArgumentTypeError("index must be a natural or inf")
    return n


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(text)


def _load(path: str) -> Process:
    with open(path) as f:
        return parse_program(f.read()).process


def _cmd_check(args) -> int:
    p = _load(args.file)
    iota = args.judgment_index if args.judgment_index is not None else INF
    v = check_closed(p, iota)
    if v.ok:
        values = v.assignment.values if v.assignment else {}
        _emit(
            args,
            {
                "status": "accept",
                "assignment": values,
                "constraints": [str(c) for c in v.constraints],
            },
            "accept\nassignment: "
            + (", ".join(f"{k}={n}" for k, n in sorted(values.items())) or "(empty)"),
        )
        return EXIT_OK
    _emit(
        args,
        {"status": "reject", "diagnostics": [d.to_json() for d in v.diagnostics]},
        "reject\n" + "\n".join(str(d) for d in v.diagnostics),
    )
    return EXIT_REJECT


def _cmd_run(args) -> int:
    p = _load(args.file)
    rng = random.Random(args.seed)
    s = canonicalize(p)
    lines = []
    for _ in range(args.max_steps):
        succs = step(s)
        if not succs:
            break
        label, s = rng.choice(succs)
        lines.append(label.describe())
        if not args.json:
            print(f"{label.describe():30s} {pretty_proc(state_to_process(s))}")
    stuck = is_normal_form(s)
    _emit(
        args,
        {"trace": lines, "final": pretty_proc(state_to_process(s)), "normalForm": stuck},
        f"{'normal form' if stuck else 'step bound reached'} after {len(lines)} steps",
    )
    return EXIT_OK


def _finite_view(p: Process, approx: int) -> Process:
    return approximant(p, approx) if is_user_process(p) else p


def _cmd_explore(args) -> int:
    p = _finite_view(_load(args.file), args.approx)
    r = reachable(canonicalize(p), max_states=args.max_states)
    nfs = [st for st in r.states.values() if is_normal_form(st)]
    payload = {
        "states": len(r.states),
        "edges": len(r.edges),
        "normalForms": len(nfs),
        "truncated": r.truncated,
    }
    _emit(
        args,
        payload,
        f"states: {len(r.states)}  edges: {len(r.edges)}  "
        f"normal forms: {len(nfs)}  truncated: {r.truncated}",
    )
    return EXIT_LIMIT if r.truncated else EXIT_OK


def _cmd_progress(args) -> int:
    v = verify_static(_load(args.file))
    _emit(args, v.to_json(), f"{v.status}\n{json.dumps(v.evidence, sort_keys=True)}")
    return EXIT_OK if v.status == "verified-static" else EXIT_REJECT


def _cmd_oracle(args) -> int:
    v = oracle_dynamic(_load(args.file), iota=args.approx, max_states=args.max_states)
    _emit(args, v.to_json(), f"{v.status}\n{json.dumps(v.evidence, sort_keys=True)}")
    return EXIT_OK if v.status == "holds-dynamic-at-bound" else EXIT_REJECT


def _collect_recs(p: Process, acc: list) -> None:
    from .syntax import Idle, Input, New, Output, Par, ProcVar

    if isinstance(p, (Idle, ProcVar)):
        return
    if isinstance(p, (Input, Output, New)):
        _collect_recs(p.body, acc)
        return
    if isinstance(p, Par):
        _collect_recs(p.left, acc)
        _collect_recs(p.right, acc)
        return
    if isinstance(p, Rec):
        acc.append(p)
        _collect_recs(p.body, acc)
        return
    raise TypeError(p)


def _cmd_measure(args) -> int:
    p = _load(args.file)
    try:
        e = emeasure(p)
        recs: list = []
        _collect_recs(p, recs)
        table = [
            {"var": r.var, "index": str(r.index), "v": vcount(r.body, r.var)} for r in recs
        ]
    except InfiniteIndex as ex:
        print(f"error: measure undefined, infinite index at {ex}", file=sys.stderr)
        return EXIT_REJECT
    text = [f"E = {e}"] + [f"V_{row['var']}(body) = {row['v']}" for row in table]
    _emit(args, {"e": e, "recs": table}, "\n".join(text))
    return EXIT_OK


def _cmd_approx(args) -> int:
    p = _load(args.file)
    try:
        q = approximant(p, args.index)
    except NotUserProcess as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_REJECT
    _emit(args, {"process": pretty_proc(q)}, pretty_proc(q))
    return EXIT_OK


def _cmd_dual(args) -> int:
    t = parse_type(args.type1)
    s = parse_type(args.type2)
    strict, path = dual_strict_path(t, s)
    full = dual_full(t, s)
    _emit(
        args,
        {"dualStrict": strict, "dualFull": full, "mismatchPath": list(path)},
        f"dual_strict: {strict}" + ("" if strict else f" (mismatch at {list(path)})")
        + f"\ndual_full: {full}",
    )
    return EXIT_OK if full else EXIT_REJECT


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sessprog", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, file=True):
        if file:
            sp.add_argument("file")
        sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("check", help="type-check a closed program")
    common(sp)
    sp.add_argument("--judgment-index", type=_index_arg, default=None)

    sp = sub.add_parser("run", help="one seeded pseudo-random trace")
    common(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-steps", type=int, default=1000)

    sp = sub.add_parser("explore", help="reachable-set statistics")
    common(sp)
    sp.add_argument("--approx", type=int, default=2)
    sp.add_argument("--max-states", type=int, default=100_000)

    sp = sub.add_parser("progress", help="static progress verification")
    common(sp)
    sp.add_argument("--judgment-index", type=_index_arg, default=0)

    sp = sub.add_parser("oracle", help="dynamic progress oracle on a finite approximant")
    common(sp)
    sp.add_argument("--approx", type=int, default=2)
    sp.add_argument("--max-states", type=int, default=100_000)

    sp = sub.add_parser("measure", help="termination measure E and V table")
    common(sp)

    sp = sub.add_parser("approx", help="print the finite approximant")
    common(sp)
    sp.add_argument("index", type=int)

    sp = sub.add_parser("dual", help="duality verdicts for two types")
    sp.add_argument("type1")
    sp.add_argument("type2")
    sp.add_argument("--json", action="store_true")

    return ap


_DISPATCH = {
    "check": _cmd_check,
    "run": _cmd_run,
    "explore": _cmd_explore,
    "progress": _cmd_progress,
    "oracle": _cmd_oracle,
    "measure": _cmd_measure,
    "approx": _cmd_approx,
    "dual": _cmd_dual,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (Truncated, DepthExceeded) as e:
        print(f"limit: {e}", file=sys.stderr)
        return EXIT_LIMIT
    except (NotClosed, NotUserProcess) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_REJECT


if __name__ == "__main__":
    sys.exit(main())
