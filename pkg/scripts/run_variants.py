"""Build artifacts from the shipped fixtures and compare every retriever variant.

    python scripts/run_variants.py [--artifacts DIR] [--out DIR]

Prints one row per variant (overall score, hallucination rate, gold-claim
recall) and writes the full reports to --out.
"""

from __future__ import annotations

import argparse
import tempfile
from pathlib import Path

from fuserag.config import load_config
from fuserag.evaluation import read_evalset, run_eval
from fuserag.pipeline import VARIANTS, Pipeline, build_kg, ingest


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--artifacts", type=Path, help="artifact directory (default: a temporary one)")
    ap.add_argument("--out", type=Path, help="report directory (default: <artifacts>/reports)")
    args = ap.parse_args()

    root = args.artifacts or Path(tempfile.mkdtemp(prefix="fuserag-"))
    config = load_config(env={"FUSERAG_PATHS_ARTIFACTS": str(root.resolve())})
    ingest(config)
    build_kg(config)
    pipeline = Pipeline.load(config)
    cases = read_evalset(config.paths.evalset, pipeline.graph)
    out = args.out or root / "reports"

    print(f"{'variant':<14} {'overall':>8} {'halluc.':>8} {'claims':>7} {'recall':>7}")
    for variant in VARIANTS:
        report = run_eval(pipeline, cases, variant)
        report.write(out)
        h = report.hallucination
        print(
            f"{variant:<14} {report.aggregate.overall:>8.3f} {h.hallucination_rate:>8.3f} "
            f"{h.total_claims:>7d} {report.gold_recall:>7.2f}"
        )
    print(f"\nreports in {out}")


if __name__ == "__main__":
    main()
