"""Regenerate the recorded wrapped-circle bar ranks (run by hand; the output is checked in).

    python3 tests/oracles/freeze_circle_wrapped.py > src/sheafmorse/data/circle_wrapped.json
"""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from oracles.bar_bruteforce import bar_ranks, from_twisted  # noqa: E402

from sheafmorse.acceptance import wrapped_circle_contexts  # noqa: E402

LEVELS = (1, 2, 3)


def main():
    out = {"levels": list(LEVELS), "contexts": {}}
    for name, (ctx, edge, key) in wrapped_circle_contexts().items():
        chars = [from_twisted(X) for X in ctx.objects]
        e = from_twisted(edge)
        rec = {"edge": key, "characters": len(chars), "ranks": {}, "words": {}}
        for N in LEVELS:
            ranks, nwords = bar_ranks(chars, e, e, N)
            rec["ranks"][str(N)] = {str(d): r for d, r in sorted(ranks.items())}
            rec["words"][str(N)] = nwords
        out["contexts"][name] = rec
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
