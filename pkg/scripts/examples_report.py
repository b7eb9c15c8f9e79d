#!/usr/bin/env python3
"""Run the shipped example corpus through the checker, the static
progress verifier, and the dynamic oracle, and print a verdict table."""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from sessprog.progress import Truncated, oracle_dynamic, verify_static
from sessprog.semantics import approximant, is_user_process
from sessprog.syntax import INF, parse_program
from sessprog.typecheck import check_closed

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "corpus"


def main() -> int:
    rows = []
    for path in sorted(CORPUS.glob("*.ssp")):
        p = parse_program(path.read_text()).process
        q = approximant(p, 0) if is_user_process(p) else p
        chk = check_closed(q, 0)
        stat = verify_static(p) if is_user_process(p) else None
        try:
            orc = oracle_dynamic(p, 2).status
        except Truncated:
            orc = "truncated"
        rows.append(
            (
                path.name,
                "accept" if chk.ok else "reject",
                stat.status if stat else "n/a",
                orc,
            )
        )
    w = max(len(r[0]) for r in rows)
    print(f"{'file':<{w}}  {'check@0':<8}  {'static':<16}  dynamic")
    for name, chk, stat, orc in rows:
        print(f"{name:<{w}}  {chk:<8}  {stat:<16}  {orc}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
