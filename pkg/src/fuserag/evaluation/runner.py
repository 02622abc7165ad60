"""Batch evaluation of a pipeline variant over an eval set, plus report files."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from ..errors import FuseragError
from ..generation import GeneratorAdapter, answer_body
from ..kg import Claim
from .hallucination import EvalCase, HallucinationReport, extract_claims, verify_claims
from .metrics import METRIC_LABELS, MetricRow, overall, score_pair

log = logging.getLogger(__name__)

MAX_FAILURE_FRACTION = 0.10


@dataclass(frozen=True)
class CaseResult:
    query_id: str
    answer: str = ""
    provenance: tuple[str, ...] = ()
    metrics: MetricRow | None = None
    claims: tuple[Claim, ...] = ()
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def to_dict(self) -> dict:
        out: dict = {"query_id": self.query_id, "failed": self.failed}
        if self.failed:
            out["error"] = self.error
            return out
        out["answer"] = self.answer
        out["provenance"] = list(self.provenance)
        out["metrics"] = self.metrics.to_dict()
        out["claims"] = [[c.src, c.rel.value, c.dst] for c in self.claims]
        return out


@dataclass
class EvalReport:
    variant: str
    cases: list[CaseResult]
    aggregate: MetricRow
    hallucination: HallucinationReport | None
    gold_recall: float | None
    fingerprints: dict[str, str] = field(default_factory=dict)

    @property
    def failed(self) -> int:
        return sum(c.failed for c in self.cases)

    @property
    def failure_fraction(self) -> float:
        return self.failed / max(len(self.cases), 1)

    @property
    def ok(self) -> bool:
        return self.failure_fraction <= MAX_FAILURE_FRACTION

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "case_count": len(self.cases),
            "failed_cases": self.failed,
            "aggregate": self.aggregate.to_dict(),
            "hallucination": self.hallucination.to_dict() if self.hallucination else None,
            "gold_claim_recall": self.gold_recall,
            "fingerprints": self.fingerprints,
            "cases": [c.to_dict() for c in self.cases],
        }

    def to_json(self) -> str:
        # no timings or wall-clock fields: equal inputs give byte-identical reports
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        return metric_table(self.aggregate, title=f"variant: {self.variant}", hallucination=self.hallucination)

    def write(self, out_dir: str | Path) -> tuple[Path, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        jpath = out_dir / f"report.{self.variant}.json"
        tpath = out_dir / f"report.{self.variant}.txt"
        jpath.write_text(self.to_json(), "utf-8")
        tpath.write_text(self.to_text(), "utf-8")
        return jpath, tpath


def metric_table(row: MetricRow, title: str = "", hallucination: HallucinationReport | None = None) -> str:
    """Two-column plain-text table: metric name, value (two decimals)."""
    values = row.to_dict()
    width = max(len(label) for _, label in METRIC_LABELS)
    lines = [title] if title else []
    rule = "-" * (width + 10)
    lines.append(rule)
    for key, label in METRIC_LABELS:
        lines.append(f"{label:<{width}}  {values[key]:.2f}")
    lines.append(rule)
    if hallucination is not None:
        lines.append(f"{'Hallucination rate':<{width}}  {hallucination.hallucination_rate:.2f}")
        lines.append(f"{'Claims checked':<{width}}  {hallucination.total_claims}")
    return "\n".join(lines) + "\n"


def _run_case(pipeline, case: EvalCase, variant: str, adapter: GeneratorAdapter | None) -> CaseResult:
    try:
        result = pipeline.run_variant(case.query_text, variant, adapter)
    except FuseragError as exc:
        log.warning("case %s failed: %s", case.query_id, exc)
        return CaseResult(case.query_id, error=f"{type(exc).__name__}: {exc}")
    body = answer_body(result.response.text)
    graph = pipeline.graph
    claims = tuple(extract_claims(body, graph.gazetteer, schema=graph.schema))
    return CaseResult(
        case.query_id,
        result.response.text,
        result.provenance,
        score_pair(body, case.reference_answer),
        claims,
    )


def run_eval(
    pipeline,
    cases: Sequence[EvalCase],
    variant: str = "ensemble",
    adapter: GeneratorAdapter | None = None,
    workers: int = 4,
) -> EvalReport:
    """Run every case under ``variant``; failed cases are recorded, not raised."""
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(lambda c: _run_case(pipeline, c, variant, adapter), cases))
    done = [r for r in results if not r.failed]
    aggregate = MetricRow.mean(r.metrics for r in done)

    hallucination = None
    gold_recall = None
    with_gold = [(c, r) for c, r in zip(cases, results) if c.gold_claims is not None and not r.failed]
    if with_gold:
        hallucination = HallucinationReport()
        found = total = 0
        for case, res in with_gold:
            verify_claims(res.claims, pipeline.graph, hallucination)
            extracted = {_undirected(c) for c in res.claims}
            total += len(case.gold_claims)
            found += sum(_undirected(g) in extracted for g in case.gold_claims)
        gold_recall = found / total if total else None
    return EvalReport(variant, results, aggregate, hallucination, gold_recall, pipeline.fingerprints())


def _undirected(c: Claim) -> tuple:
    return (c.rel.value, *sorted((c.src, c.dst)))


def replay_tables(path: str | Path | None = None) -> list[dict]:
    """Recompute the overall score for each published five-metric row."""
    if path is None:
        from ..config import data_dir

        path = data_dir() / "reference_tables.json"
    data = json.loads(Path(path).read_text("utf-8"))
    tol = data.get("tolerance", 0.005)
    out = []
    for row in data["rows"]:
        value = overall(row["values"])
        diff = abs(value - row["reported_overall"])
        out.append({**row, "computed_overall": value, "abs_diff": diff, "within_tolerance": diff <= tol + 1e-12})
    return out


def replay_text(rows: Sequence[dict]) -> str:
    lines = [f"{'model':<16} {'setting':<17} {'computed':>8} {'reported':>8}  status"]
    for r in rows:
        status = "ok" if r["within_tolerance"] else f"MISMATCH ({r['abs_diff']:.3f})"
        lines.append(
            f"{r['model']:<16} {r['setting']:<17} {r['computed_overall']:>8.3f} {r['reported_overall']:>8.2f}  {status}"
        )
    return "\n".join(lines) + "\n"
