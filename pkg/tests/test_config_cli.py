from __future__ import annotations

import json
from pathlib import Path

import pytest
from conftest import write_jsonl

from fuserag.cli import build_parser, config_from_args, main
from fuserag.config import data_dir, load_config
from fuserag.errors import ConfigError, DataError
from fuserag.fusion import WEIGHT_PRESETS
from fuserag.pipeline import artifact_lock

BIPOLAR_Q = "What genetic factors are linked to bipolar disorder?"


# ---------------------------------------------------------------- config


def test_defaults(tmp_path):
    cfg = load_config(env={})
    assert (cfg.fusion.w1, cfg.fusion.w2, cfg.fusion.w3) == (0.4, 0.4, 0.2)
    assert (cfg.k_vector, cfg.k_graph, cfg.embedder.dim) == (5, 5, 384)
    assert cfg.paths.corpus == data_dir() / "corpus.jsonl"
    assert cfg.generator.kind == "template" and cfg.generator.evidence_budget == 4000


def test_file_env_and_relative_paths(tmp_path):
    conf = tmp_path / "conf" / "f.ini"
    conf.parent.mkdir()
    conf.write_text(
        "# comment\n[fusion]\nw1 = 0.5  # inline\nw2 = 0.3\nw3 = 0.2\n[paths]\nartifacts = out\n", "utf-8"
    )
    cfg = load_config(conf, env={})
    assert cfg.fusion.w1 == 0.5 and cfg.paths.artifacts == conf.parent.resolve() / "out"
    assert cfg.paths.index == cfg.paths.artifacts / "index.frvi"
    cfg = load_config(conf, env={"FUSERAG_FUSION_W1": "0.6", "FUSERAG_FUSION_W2": "0.2", "OTHER": "x"})
    assert (cfg.fusion.w1, cfg.fusion.w2) == (0.6, 0.2)


@pytest.mark.parametrize(
    "text,env",
    [
        ("[nope]\nx = 1\n", {}),
        ("[fusion]\nomega = 1\n", {}),
        ("", {"FUSERAG_FUSION_W1": "heavy"}),
        ("", {"FUSERAG_FUSION_W1": "0.9"}),
        ("", {"FUSERAG_FUSION_PRESET": "balanced"}),
        ("", {"FUSERAG_LOGGING_LEVEL": "chatty"}),
        ("", {"FUSERAG_RETRIEVAL_K_VECTOR": "0"}),
    ],
)
def test_bad_config(tmp_path, text, env):
    conf = tmp_path / "c.ini"
    conf.write_text(text, "utf-8")
    with pytest.raises(ConfigError):
        load_config(conf, env=env)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.ini", env={})


def test_cli_flags_beat_env(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    args = build_parser().parse_args(["query", "q", "--preset", "vector-heavy", "--artifacts", "arts", "--k-final", "3"])
    cfg = config_from_args(args, environ={"FUSERAG_FUSION_PRESET": "graph-heavy", "FUSERAG_FUSION_K_FINAL": "9"})
    assert (cfg.fusion.w1, cfg.fusion.w2, cfg.fusion.w3) == WEIGHT_PRESETS["vector-heavy"]
    assert cfg.fusion.k_final == 3
    assert cfg.paths.artifacts == tmp_path / "arts"


def test_shipped_config_file_loads():
    cfg = load_config(Path(__file__).resolve().parents[1] / "fuserag.ini", env={})
    assert cfg.fusion.w1 == 0.4


# ---------------------------------------------------------------- commands


@pytest.fixture(scope="module")
def arts(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert main(["ingest", "--artifacts", str(root)]) == 0
    assert main(["build-kg", "--artifacts", str(root)]) == 0
    return root


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["query"])
    assert exc.value.code == 1
    code, _, err = run(capsys, ["query", "q", "--no-graph", "--no-vector"])
    assert code == 1 and "no retriever" in err


def test_ingest_counts_and_data_errors(tmp_path, capsys):
    corpus = write_jsonl(tmp_path / "c.jsonl", [
        {"doc_id": "a", "text": "Short note on sleep."},
        {"doc_id": "b", "text": "Lithium treats bipolar disorder. " * 40},
        {"doc_id": "c", "text": "x" * 2500},
    ])
    code, out, _ = run(capsys, ["ingest", "--corpus", str(corpus), "--artifacts", str(tmp_path / "a")])
    # same three documents as the chunker hand count: 1 + 2 + 3
    assert code == 0 and out.startswith("indexed 6 chunks")
    empty = tmp_path / "empty.jsonl"
    empty.write_text("", "utf-8")
    code, _, err = run(capsys, ["ingest", "--corpus", str(empty), "--artifacts", str(tmp_path / "a")])
    assert code == 2 and "empty" in err
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"doc_id": "a", "text": "ok"}\n{"doc_id": \n', "utf-8")
    code, _, err = run(capsys, ["ingest", "--corpus", str(bad), "--artifacts", str(tmp_path / "a")])
    assert code == 2 and "line 2" in err
    code, _, _ = run(capsys, ["ingest", "--corpus", str(tmp_path / "nope.jsonl"), "--artifacts", str(tmp_path / "a")])
    assert code == 2


def test_build_kg_fixture_report_is_clean(arts):
    report = json.loads((arts / "graph.quality.json").read_text())
    assert report["errors"] == 0 and report["edge_count"] == 106 and report["entity_count"] == 68


def test_dangling_edge_reported_with_success(tmp_path, capsys):
    records = [json.loads(x) for x in (data_dir() / "graph.jsonl").read_text().splitlines() if x.strip()]
    records.append({"type": "edge", "src": "lithium", "rel": "TREATS", "dst": "nowhere", "confidence": 0.5})
    graph = write_jsonl(tmp_path / "g.jsonl", records)
    code, out, _ = run(capsys, ["build-kg", "--graph", str(graph), "--artifacts", str(tmp_path / "a")])
    assert code == 0 and "dangling edges: 1" in out
    report = json.loads((tmp_path / "a" / "graph.quality.json").read_text())
    assert len(report["dangling_edges"]) == 1


def test_corpus_extraction_grows_edges_by_hand_count(tmp_path, capsys):
    corpus = write_jsonl(tmp_path / "c.jsonl", [
        # new: lithium TREATS ptsd; already held: lithium TREATS bipolar_disorder
        {"doc_id": "d1", "text": "Lithium treats PTSD. Lithium treats bipolar disorder."},
        # contradicts a CONTRAINDICATED_WITH edge, so it is dropped
        {"doc_id": "d2", "text": "Bupropion treats bulimia nervosa."},
        # new: fatigue ASSOCIATED_WITH anhedonia (no trigger)
        {"doc_id": "d3", "text": "Fatigue and anhedonia often appear together. Sleep matters."},
    ])
    code, out, _ = run(capsys, ["build-kg", "--extract-from", str(corpus), "--artifacts", str(tmp_path / "a")])
    assert code == 0 and "added 2 edges; 1 conflicts dropped" in out
    report = json.loads((tmp_path / "a" / "graph.quality.json").read_text())
    assert report["edge_count"] == 108 and report["extracted_edges_added"] == 2
    assert report["extraction_conflicts"] == [["bupropion", "TREATS", "bulimia_nervosa"]]


def test_query_is_byte_identical_and_finds_markers(arts, capsys):
    argv = ["query", BIPOLAR_Q, "--artifacts", str(arts)]
    code1, out1, err1 = run(capsys, argv)
    code2, out2, _ = run(capsys, argv)
    assert code1 == code2 == 0 and out1 == out2
    prov = out1.split("provenance:\n", 1)[1].split()
    assert {"cacna1c", "ank3", "bdnf"} <= set(prov)
    assert "fusion=" in err1 and "generate=" in err1


def test_no_graph_gives_vector_ids_only(arts, capsys):
    code, out, _ = run(capsys, ["query", BIPOLAR_Q, "--no-graph", "--w1", "1", "--w2", "0", "--w3", "0",
                                "--json", "--artifacts", str(arts)])
    assert code == 0
    res = json.loads(out)
    assert res["provenance"] and all("#" in p for p in res["provenance"])
    assert res["provenance_summary"]["sources"] == {"vector": len(res["provenance"]), "graph": 0}


def test_query_variants_and_audit(arts, capsys):
    code, out, _ = run(capsys, ["query", BIPOLAR_Q, "--variant", "graph-only", "--json", "--audit",
                                "--artifacts", str(arts)])
    res = json.loads(out)
    assert code == 0 and all("#" not in p for p in res["provenance"])
    audit = Path(res["audit_ref"])
    assert audit.is_file() and audit.parent == arts / "audit"
    assert all(json.loads(line)["source"] == "graph" for line in audit.read_text().splitlines())


def test_query_missing_artifacts_exits_two(tmp_path, capsys):
    code, _, err = run(capsys, ["query", "anything", "--artifacts", str(tmp_path / "none")])
    assert code == 2 and "ingest" in err


def test_query_transport_failure_exits_three(arts, capsys):
    code, _, _ = run(capsys, ["query", BIPOLAR_Q, "--generator", "http", "--generator-endpoint",
                              "http://127.0.0.1:9/gen", "--artifacts", str(arts)])
    assert code == 3


def test_eval_writes_reports(arts, tmp_path, capsys):
    out_dir = tmp_path / "reports"
    code, out, _ = run(capsys, ["eval", "--variant", "ensemble", "--variant", "vector-only", "--out", str(out_dir),
                                "--artifacts", str(arts)])
    assert code == 0 and "Overall Score" in out
    assert sorted(p.name for p in out_dir.iterdir()) == [
        "report.ensemble.json", "report.ensemble.txt", "report.vector-only.json", "report.vector-only.txt",
    ]
    ens = json.loads((out_dir / "report.ensemble.json").read_text())
    assert ens["variant"] == "ensemble" and len(ens["cases"]) == 18


def test_eval_fails_when_most_cases_fail(arts, tmp_path, capsys):
    code, _, _ = run(capsys, ["eval", "--out", str(tmp_path), "--generator", "http", "--generator-endpoint",
                              "http://127.0.0.1:9/gen", "--artifacts", str(arts)])
    assert code == 2


def test_eval_replay_reports_mismatch(tmp_path, capsys):
    code, out, _ = run(capsys, ["eval", "--replay-tables", "--out", str(tmp_path)])
    assert out.count("ok") == 11 and out.count("MISMATCH") == 1
    assert code == 2
    assert json.loads((tmp_path / "report.replay.json").read_text())[8]["computed_overall"] == pytest.approx(0.354)


def test_variant_flags_never_touch_artifacts(arts, capsys):
    before = {p.name: p.read_bytes() for p in arts.iterdir() if p.is_file()}
    for variant in ["ensemble", "vector-only", "graph-only", "vector-heavy", "graph-heavy"]:
        assert main(["query", BIPOLAR_Q, "--variant", variant, "--artifacts", str(arts)]) == 0
    capsys.readouterr()
    assert {p.name: p.read_bytes() for p in arts.iterdir() if p.is_file()} == before


def test_ingestion_lock_is_exclusive(tmp_path):
    cfg = load_config(env={"FUSERAG_PATHS_ARTIFACTS": str(tmp_path)})
    with artifact_lock(cfg):
        with pytest.raises(DataError):
            with artifact_lock(cfg, timeout=0.05):
                pass
    with artifact_lock(cfg, timeout=0.05):
        pass


def test_embedder_endpoint_flag_selects_external_embedder():
    args = build_parser().parse_args(["ingest", "--embedder-endpoint", "http://emb.test/embed"])
    cfg = config_from_args(args, environ={})
    assert cfg.embedder.kind == "external" and cfg.embedder.endpoint == "http://emb.test/embed"


def test_unreachable_embedder_exits_three(tmp_path, capsys):
    code, _, _ = run(capsys, ["ingest", "--embedder-endpoint", "http://127.0.0.1:9/embed",
                              "--artifacts", str(tmp_path)])
    assert code == 3
