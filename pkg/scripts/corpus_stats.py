#!/usr/bin/env python3
"""Generate a random corpus and summarize state-space sizes, measure
values, and checker/oracle agreement.

Usage: corpus_stats.py [count] [seed]
"""

import pathlib
import random
import statistics
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from sessprog.gen import gen_finite, gen_well_typed_user
from sessprog.measure import emeasure
from sessprog.progress import oracle_dynamic, verify_static
from sessprog.semantics import canonicalize, reachable


def main() -> int:
    count = int(sys.argv[1]) if len(sys.argv) > 1 else 200
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    rng = random.Random(seed)

    sizes, measures = [], []
    for _ in range(count):
        p = gen_finite(rng, depth=6, max_index=3)
        r = reachable(canonicalize(p), max_states=2000)
        if not r.truncated:
            sizes.append(len(r.states))
        measures.append(emeasure(p))
    print(f"random finite corpus ({count} processes, seed {seed})")
    print(f"  reachable states: median {statistics.median(sizes)}, max {max(sizes)}")
    print(f"  measure E: median {statistics.median(measures)}, max {max(measures)}")

    verified = held = 0
    n = max(count // 10, 10)
    for _ in range(n):
        p = gen_well_typed_user(rng, cells=1)
        if verify_static(p).status == "verified-static":
            verified += 1
            if oracle_dynamic(p, 2, 20_000).status == "holds-dynamic-at-bound":
                held += 1
    print(f"well-typed user corpus ({n} processes)")
    print(f"  verified statically: {verified}, confirmed by the oracle: {held}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
