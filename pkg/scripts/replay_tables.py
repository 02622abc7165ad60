"""Recompute the overall score (mean of the five metrics) for each published
metric row and compare it with the reported overall value.

    python scripts/replay_tables.py [rows.json]

Exits 1 if any row falls outside the tolerance stored with the rows.
"""

from __future__ import annotations

import sys

from fuserag.evaluation import replay_tables
from fuserag.evaluation.runner import replay_text


def main() -> int:
    rows = replay_tables(sys.argv[1] if len(sys.argv) > 1 else None)
    print(replay_text(rows), end="")
    bad = [r for r in rows if not r["within_tolerance"]]
    print(f"\n{len(rows) - len(bad)}/{len(rows)} rows within tolerance")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
