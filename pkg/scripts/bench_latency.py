"""Time the retrieval and fusion stages over a synthetic index.

    python scripts/bench_latency.py [--chunks 10000] [--dim 384] [--repeat 5]

Builds an index of random sentences over the fixture vocabulary, then runs the
eval-set questions through the pipeline with the template generator and
reports per-stage medians in milliseconds.
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from fuserag.config import data_dir, load_config
from fuserag.embedding import EmbedderSpec
from fuserag.evaluation import read_evalset
from fuserag.kg import load_graph, load_schema
from fuserag.pipeline import Pipeline
from fuserag.vector_store import Chunk, build_index

RETRIEVAL_STAGES = ("process", "embed", "vector_search", "graph_query", "fusion")


def synthetic_chunks(n: int, vocab: list[str], seed: int = 3) -> dict[str, Chunk]:
    rnd = random.Random(seed)
    chunks = {}
    for i in range(n):
        text = " ".join(rnd.choice(vocab) for _ in range(rnd.randint(20, 60))) + "."
        cid = f"doc{i:06d}#0"
        chunks[cid] = Chunk(cid, cid[:-2], text, (0, len(text)))
    return chunks


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--chunks", type=int, default=10_000)
    ap.add_argument("--dim", type=int, default=384)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    config = load_config(env={"FUSERAG_EMBEDDER_DIM": str(args.dim)})
    graph = load_graph(data_dir() / "graph.jsonl", load_schema())
    vocab = sorted({w for e in graph.entities.values() for w in e.label.lower().split()})
    vocab += "mood sleep therapy dose symptoms patients weeks daily risk support".split()

    t0 = time.perf_counter()
    chunks = synthetic_chunks(args.chunks, vocab)
    index = build_index(list(chunks.values()), EmbedderSpec(dim=args.dim))
    print(f"built {len(index)}-entry index (dim {args.dim}) in {time.perf_counter() - t0:.1f} s")

    pipeline = Pipeline(config, index, chunks, graph)
    questions = [c.query_text for c in read_evalset(config.paths.evalset)]
    pipeline.run(questions[0])
    per_stage: dict[str, list[float]] = {}
    retrieval = []
    for _ in range(args.repeat):
        for q in questions:
            timing = pipeline.run(q).timing
            for stage, ms in timing.items():
                per_stage.setdefault(stage, []).append(ms)
            retrieval.append(sum(timing.get(s, 0.0) for s in RETRIEVAL_STAGES))

    for stage, values in per_stage.items():
        print(f"{stage:<14} median {statistics.median(values):8.3f} ms")
    print(f"{'retrieval+fusion':<14} median {statistics.median(retrieval):8.3f} ms, max {max(retrieval):.3f} ms")


if __name__ == "__main__":
    main()
