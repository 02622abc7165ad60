"""Pipeline configuration: sectioned key-value file plus FUSERAG_* environment overrides.

Environment variables take the form FUSERAG_<SECTION>_<KEY>, e.g.
FUSERAG_FUSION_W1=0.6 or FUSERAG_PATHS_INDEX=/tmp/index.frvi.
"""

from __future__ import annotations

import configparser
import logging
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from .embedding import EmbedderSpec
from .errors import ConfigError
from .fusion import WEIGHT_PRESETS, FusionConfig
from .generation import DEFAULT_EVIDENCE_BUDGET, DEFAULT_MAX_RESPONSE_CHARS

ENV_PREFIX = "FUSERAG_"


def data_dir() -> Path:
    return Path(str(resources.files("fuserag").joinpath("data")))


DEFAULTS: dict[str, dict[str, str]] = {
    "embedder": {
        "kind": "builtin-hash",
        "dim": "384",
        "endpoint": "",
        "model_name": "",
        "timeout": "30",
        "batch_size": "64",
        "max_parallel": "4",
        "max_retries": "3",
    },
    "fusion": {
        "preset": "",
        "w1": "0.4",
        "w2": "0.4",
        "w3": "0.2",
        "tau_vector": "0.25",
        "tau_graph": "0.30",
        "k_final": "6",
    },
    "retrieval": {
        "k_vector": "5",
        "k_graph": "5",
        "max_chunk_chars": "1000",
        "overlap_chars": "100",
    },
    "paths": {
        "corpus": "",
        "graph": "",
        "schema": "",
        "evalset": "",
        "artifacts": "fuserag-artifacts",
        "index": "",
        "kg": "",
    },
    "generator": {
        "kind": "template",
        "endpoint": "",
        "model_name": "",
        "timeout": "60",
        "max_parallel": "4",
        "evidence_budget": str(DEFAULT_EVIDENCE_BUDGET),
        "max_response_chars": str(DEFAULT_MAX_RESPONSE_CHARS),
    },
    "logging": {"level": "WARNING"},
}


@dataclass(frozen=True)
class Paths:
    corpus: Path
    graph: Path
    schema: Path
    evalset: Path
    artifacts: Path
    index: Path
    kg: Path

    @property
    def chunks(self) -> Path:
        return self.index.with_suffix(".chunks.jsonl")

    @property
    def manifest(self) -> Path:
        return self.artifacts / "manifest.json"

    @property
    def quality_report(self) -> Path:
        return self.kg.with_suffix(".quality.json")

    @property
    def audit_dir(self) -> Path:
        return self.artifacts / "audit"

    @property
    def lock(self) -> Path:
        return self.artifacts / ".lock"


@dataclass(frozen=True)
class GeneratorConfig:
    kind: str = "template"
    endpoint: str | None = None
    model_name: str = ""
    timeout: float = 60.0
    max_parallel: int = 4
    evidence_budget: int = DEFAULT_EVIDENCE_BUDGET
    max_response_chars: int = DEFAULT_MAX_RESPONSE_CHARS

    def __post_init__(self):
        if self.kind not in ("template", "http"):
            raise ConfigError(f"generator kind must be template|http, got {self.kind!r}")
        if self.kind == "http" and not self.endpoint:
            raise ConfigError("http generator needs an endpoint")


@dataclass(frozen=True)
class PipelineConfig:
    embedder: EmbedderSpec
    fusion: FusionConfig
    paths: Paths
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    k_vector: int = 5
    k_graph: int = 5
    max_chunk_chars: int = 1000
    overlap_chars: int = 100
    log_level: str = "WARNING"

    def __post_init__(self):
        if self.k_vector < 1 or self.k_graph < 1:
            raise ConfigError("k_vector and k_graph must be >= 1")
        if not 0 <= self.overlap_chars < self.max_chunk_chars:
            raise ConfigError("need 0 <= overlap_chars < max_chunk_chars")


def _read_sections(path: Path | None) -> dict[str, dict[str, str]]:
    merged = {sec: dict(vals) for sec, vals in DEFAULTS.items()}
    if path is None:
        return merged
    parser = configparser.ConfigParser(comment_prefixes=("#",), inline_comment_prefixes=("#",), interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for sec in parser.sections():
        if sec not in merged:
            raise ConfigError(f"{path}: unknown section [{sec}]")
        for key, val in parser.items(sec):
            if key not in merged[sec]:
                raise ConfigError(f"{path}: unknown key {key!r} in [{sec}]")
            merged[sec][key] = val.strip()
    return merged


def _apply_env(sections: dict[str, dict[str, str]], env: Mapping[str, str]) -> None:
    for name, val in env.items():
        if not name.startswith(ENV_PREFIX):
            continue
        rest = name[len(ENV_PREFIX) :].lower()
        for sec in sections:
            if rest.startswith(sec + "_") and rest[len(sec) + 1 :] in sections[sec]:
                sections[sec][rest[len(sec) + 1 :]] = val
                break


def _num(sections, sec, key, cast):
    raw = sections[sec][key]
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(f"[{sec}] {key} = {raw!r} is not a valid {cast.__name__}") from None


def load_config(path: str | Path | None = None, env: Mapping[str, str] | None = None) -> PipelineConfig:
    """Build a PipelineConfig from defaults, an optional file and the environment.

    Relative paths resolve against the config file's directory; input paths
    left empty fall back to the fixture data shipped with the package.
    """
    path = Path(path) if path is not None else None
    sections = _read_sections(path)
    _apply_env(sections, os.environ if env is None else env)
    base = path.parent.resolve() if path is not None else Path.cwd()

    emb = sections["embedder"]
    embedder = EmbedderSpec(
        kind=emb["kind"],
        dim=_num(sections, "embedder", "dim", int),
        endpoint=emb["endpoint"] or None,
        model_name=emb["model_name"] or None,
        timeout=_num(sections, "embedder", "timeout", float),
        batch_size=_num(sections, "embedder", "batch_size", int),
        max_parallel=_num(sections, "embedder", "max_parallel", int),
        max_retries=_num(sections, "embedder", "max_retries", int),
    )

    fus = sections["fusion"]
    if fus["preset"]:
        if fus["preset"] not in WEIGHT_PRESETS:
            raise ConfigError(f"unknown fusion preset {fus['preset']!r}; choose from {sorted(WEIGHT_PRESETS)}")
        w1, w2, w3 = WEIGHT_PRESETS[fus["preset"]]
    else:
        w1, w2, w3 = (_num(sections, "fusion", k, float) for k in ("w1", "w2", "w3"))
    fusion = FusionConfig(
        w1,
        w2,
        w3,
        _num(sections, "fusion", "tau_vector", float),
        _num(sections, "fusion", "tau_graph", float),
        _num(sections, "fusion", "k_final", int),
    )

    p = sections["paths"]

    def resolve(value: str, fallback: Path) -> Path:
        if not value:
            return fallback
        q = Path(value).expanduser()
        return q if q.is_absolute() else base / q

    data = data_dir()
    artifacts = resolve(p["artifacts"], base / "fuserag-artifacts")
    paths = Paths(
        corpus=resolve(p["corpus"], data / "corpus.jsonl"),
        graph=resolve(p["graph"], data / "graph.jsonl"),
        schema=resolve(p["schema"], data / "schema.json"),
        evalset=resolve(p["evalset"], data / "evalset.jsonl"),
        artifacts=artifacts,
        index=resolve(p["index"], artifacts / "index.frvi"),
        kg=resolve(p["kg"], artifacts / "graph.jsonl"),
    )

    g = sections["generator"]
    generator = GeneratorConfig(
        kind=g["kind"],
        endpoint=g["endpoint"] or None,
        model_name=g["model_name"],
        timeout=_num(sections, "generator", "timeout", float),
        max_parallel=_num(sections, "generator", "max_parallel", int),
        evidence_budget=_num(sections, "generator", "evidence_budget", int),
        max_response_chars=_num(sections, "generator", "max_response_chars", int),
    )

    level = sections["logging"]["level"].upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ConfigError(f"unknown log level {level!r}")
    return PipelineConfig(
        embedder=embedder,
        fusion=fusion,
        paths=paths,
        generator=generator,
        k_vector=_num(sections, "retrieval", "k_vector", int),
        k_graph=_num(sections, "retrieval", "k_graph", int),
        max_chunk_chars=_num(sections, "retrieval", "max_chunk_chars", int),
        overlap_chars=_num(sections, "retrieval", "overlap_chars", int),
        log_level=level,
    )
