"""Command-line entry point: fuserag ingest|build-kg|query|eval|serve."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .config import PipelineConfig, load_config
from .errors import ConfigError, FuseragError
from .pipeline import VARIANTS, Pipeline, build_kg, ingest, variant_settings

log = logging.getLogger("fuserag")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_TRANSPORT = 0, 1, 2, 3

# CLI flag -> (config section, key); values are routed through the same
# FUSERAG_<SECTION>_<KEY> override layer as the environment.
_OVERRIDES = {
    "artifacts": ("paths", "artifacts"),
    "index": ("paths", "index"),
    "kg": ("paths", "kg"),
    "dim": ("embedder", "dim"),
    "embedder_endpoint": ("embedder", "endpoint"),
    "preset": ("fusion", "preset"),
    "w1": ("fusion", "w1"),
    "w2": ("fusion", "w2"),
    "w3": ("fusion", "w3"),
    "tau_vector": ("fusion", "tau_vector"),
    "tau_graph": ("fusion", "tau_graph"),
    "k_final": ("fusion", "k_final"),
    "k_vector": ("retrieval", "k_vector"),
    "k_graph": ("retrieval", "k_graph"),
    "generator": ("generator", "kind"),
    "generator_endpoint": ("generator", "endpoint"),
    "log_level": ("logging", "level"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration overrides")
    g.add_argument("--config", type=Path, help="config file (sectioned key = value, '#' comments)")
    g.add_argument("--artifacts", help="artifact directory")
    g.add_argument("--index", help="vector index file")
    g.add_argument("--kg", help="canonical graph file")
    g.add_argument("--dim", help="embedding dimension")
    g.add_argument("--embedder-endpoint", help="external embedding service URL")
    g.add_argument("--preset", choices=["default", "vector-heavy", "graph-heavy", "vector-only", "graph-only"])
    for w in ("w1", "w2", "w3"):
        g.add_argument(f"--{w}", help=f"fusion weight {w}")
    g.add_argument("--tau-vector", help="vector score threshold")
    g.add_argument("--tau-graph", help="graph score threshold")
    g.add_argument("--k-final", help="fused context size")
    g.add_argument("--k-vector", help="vector retrieval depth")
    g.add_argument("--k-graph", help="graph retrieval depth")
    g.add_argument("--generator", choices=["template", "http"], help="answer generator")
    g.add_argument("--generator-endpoint", help="generation service URL")
    g.add_argument("--log-level")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fuserag", description="Hybrid vector + knowledge-graph retrieval with fused evidence.")
    parser.add_argument("--version", action="version", version=f"fuserag {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="chunk, embed and index the corpus")
    p.add_argument("--corpus", type=Path, help="JSONL corpus (default: config paths.corpus)")
    _add_config_flags(p)

    p = sub.add_parser("build-kg", help="build the canonical graph and its quality report")
    p.add_argument("--graph", type=Path, help="JSONL node/edge records")
    p.add_argument("--schema", type=Path, help="schema JSON")
    p.add_argument(
        "--extract-from",
        type=Path,
        nargs="?",
        const=True,
        metavar="CORPUS",
        help="also add relations mined from a corpus (default: config paths.corpus)",
    )
    _add_config_flags(p)

    p = sub.add_parser("query", help="answer one question")
    p.add_argument("question")
    p.add_argument("--no-graph", action="store_true", help="disable graph retrieval")
    p.add_argument("--no-vector", action="store_true", help="disable vector retrieval")
    p.add_argument("--variant", choices=sorted(VARIANTS), help="named retriever/weight variant")
    p.add_argument("--json", action="store_true", help="print the result as JSON")
    p.add_argument("--audit", action="store_true", help="write the fusion audit under the artifact directory")
    _add_config_flags(p)

    p = sub.add_parser("eval", help="score variants over an eval set")
    p.add_argument("--evalset", type=Path)
    p.add_argument(
        "--variant",
        action="append",
        choices=sorted(VARIANTS) + ["all"],
        help="variant to run; repeatable (default: ensemble)",
    )
    p.add_argument("--out", type=Path, help="report directory (default: artifacts/reports)")
    p.add_argument("--workers", type=int, default=4)
    p.add_argument(
        "--replay-tables",
        type=Path,
        nargs="?",
        const=True,
        metavar="JSON",
        help="recompute overall scores for published metric rows instead of running the pipeline",
    )
    _add_config_flags(p)

    p = sub.add_parser("serve", help="run the HTTP query service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    _add_config_flags(p)
    return parser


def config_from_args(args: argparse.Namespace, environ=None) -> PipelineConfig:
    env = dict(os.environ if environ is None else environ)
    for attr, (section, key) in _OVERRIDES.items():
        value = getattr(args, attr, None)
        if value is None:
            continue
        if section == "paths":
            # flags are relative to the working directory, not the config file
            value = Path(value).expanduser().resolve()
        env[f"FUSERAG_{section.upper()}_{key.upper()}"] = str(value)
    if getattr(args, "embedder_endpoint", None):
        env["FUSERAG_EMBEDDER_KIND"] = "external"
    return load_config(args.config, env)


def _cmd_ingest(args, config: PipelineConfig) -> int:
    res = ingest(config, args.corpus)
    print(f"indexed {res.chunk_count} chunks -> {res.index_path}")
    print(f"fingerprint {res.fingerprint}")
    return EXIT_OK


def _cmd_build_kg(args, config: PipelineConfig) -> int:
    corpus = None
    if args.extract_from is True:
        corpus = config.paths.corpus
    elif args.extract_from is not None:
        corpus = args.extract_from
    res = build_kg(config, args.graph, args.schema, corpus)
    q = res.graph.quality
    print(f"graph: {len(res.graph.entities)} entities, {len(res.graph.relations)} edges -> {res.graph_path}")
    print(f"fingerprint {res.graph.fingerprint()}")
    if corpus is not None:
        print(f"corpus extraction added {res.extracted_edges} edges; {len(q.extraction_conflicts)} conflicts dropped")
    print(f"quality: {q.error_count} issues (dangling edges: {len(q.dangling_edges)}) -> {res.report_path}")
    return EXIT_OK


def _cmd_query(args, config: PipelineConfig) -> int:
    if args.variant and (args.no_graph or args.no_vector):
        raise ConfigError("--variant cannot be combined with --no-graph/--no-vector")
    if args.no_graph and args.no_vector:
        raise ConfigError("--no-graph and --no-vector together leave no retriever")
    if args.variant:
        use_vector, use_graph, fusion = variant_settings(args.variant, config.fusion)
    else:
        use_vector, use_graph, fusion = not args.no_vector, not args.no_graph, config.fusion
    pipeline = Pipeline.load(config, audit=args.audit)
    result = pipeline.run(args.question, use_vector=use_vector, use_graph=use_graph, fusion=fusion)
    if args.json:
        print(json.dumps(result.to_dict(include_timing=False), indent=2, sort_keys=True, ensure_ascii=False))
    else:
        print(result.response.text)
        print()
        print("provenance:")
        for pid in result.provenance:
            print(f"  {pid}")
    timing = " ".join(f"{k}={v:.2f}ms" for k, v in result.timing.items())
    print(f"[{result.query_id}] {timing}", file=sys.stderr)
    return EXIT_OK


def _cmd_eval(args, config: PipelineConfig) -> int:
    from .evaluation import read_evalset, replay_tables, run_eval
    from .evaluation.runner import replay_text

    out_dir = args.out or config.paths.artifacts / "reports"
    if args.replay_tables is not None:
        rows = replay_tables(None if args.replay_tables is True else args.replay_tables)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.replay.json").write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n", "utf-8")
        text = replay_text(rows)
        (out_dir / "report.replay.txt").write_text(text, "utf-8")
        print(text, end="")
        return EXIT_OK if all(r["within_tolerance"] for r in rows) else EXIT_DATA

    variants = args.variant or ["ensemble"]
    if "all" in variants:
        variants = list(VARIANTS)
    pipeline = Pipeline.load(config)
    cases = read_evalset(args.evalset or config.paths.evalset, pipeline.graph)
    status = EXIT_OK
    for variant in dict.fromkeys(variants):
        report = run_eval(pipeline, cases, variant, workers=args.workers)
        jpath, _ = report.write(out_dir)
        print(report.to_text(), end="")
        print(f"{len(cases) - report.failed}/{len(cases)} cases ok -> {jpath}\n")
        if not report.ok:
            log.error("%s: %d of %d cases failed", variant, report.failed, len(cases))
            status = EXIT_DATA
    return status


def _cmd_serve(args, config: PipelineConfig) -> int:
    from .service import QueryService, make_server

    service = QueryService()
    server = make_server(service, args.host, args.port)
    print(f"listening on http://{args.host}:{server.server_address[1]}", file=sys.stderr)
    service.attach(Pipeline.load(config))
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


_COMMANDS = {
    "ingest": _cmd_ingest,
    "build-kg": _cmd_build_kg,
    "query": _cmd_query,
    "eval": _cmd_eval,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        logging.basicConfig(level=config.log_level, format="%(levelname)s %(name)s: %(message)s")
        return _COMMANDS[args.command](args, config)
    except FuseragError as exc:
        print(f"fuserag: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"fuserag: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
