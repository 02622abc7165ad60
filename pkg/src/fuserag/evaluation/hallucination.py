"""Claim-level hallucination accounting against the knowledge graph."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import DataError, RecordError
from ..kg import Claim, Graph, Verdict, verify_claim
from ..kg import extract_claims as _extract_claims
from ..query import Gazetteer
from ..vocab import DEFAULT_TRIGGERS, RelKind


@dataclass(frozen=True)
class EvalCase:
    query_id: str
    query_text: str
    reference_answer: str
    gold_claims: tuple[Claim, ...] | None = None

    def __post_init__(self):
        if not self.reference_answer.strip():
            raise DataError(f"case {self.query_id!r}: empty reference answer")


def read_evalset(path: str | Path, graph: Graph | None = None) -> list[EvalCase]:
    """Parse JSONL eval cases; with a graph, gold-claim entities must resolve."""
    cases = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                gold = rec.get("gold_claims")
                claims = None
                if gold is not None:
                    claims = tuple(Claim(str(s), RelKind(r), str(d)) for s, r, d in gold)
                case = EvalCase(str(rec["query_id"]), str(rec["query_text"]), str(rec["reference_answer"]), claims)
            except (ValueError, KeyError, TypeError, DataError) as exc:
                raise RecordError(path, line_no, f"malformed eval record ({exc})") from None
            if graph is not None and case.gold_claims:
                for c in case.gold_claims:
                    for eid in (c.src, c.dst):
                        if eid not in graph:
                            raise RecordError(path, line_no, f"gold claim entity {eid!r} is not in the graph")
            cases.append(case)
    if not cases:
        raise DataError(f"{path}: empty eval set")
    return cases


def extract_claims(
    response_text: str,
    gazetteer: Gazetteer,
    trigger_table=DEFAULT_TRIGGERS,
    schema=None,
) -> list[Claim]:
    return _extract_claims(response_text, gazetteer, trigger_table, schema)


@dataclass
class HallucinationReport:
    total_claims: int = 0
    supported: int = 0
    contradicted: int = 0
    unknown: int = 0
    contradicted_claims: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def hallucination_rate(self) -> float:
        return (self.contradicted + self.unknown) / max(self.total_claims, 1)

    def add(self, claim: Claim, verdict: Verdict) -> None:
        self.total_claims += 1
        if verdict is Verdict.SUPPORTED:
            self.supported += 1
        elif verdict is Verdict.CONTRADICTED:
            self.contradicted += 1
            self.contradicted_claims.append((claim.src, claim.rel.value, claim.dst))
        else:
            self.unknown += 1

    def to_dict(self) -> dict:
        return {
            "total_claims": self.total_claims,
            "supported": self.supported,
            "contradicted": self.contradicted,
            "unknown": self.unknown,
            "hallucination_rate": self.hallucination_rate,
            "contradicted_claims": [list(c) for c in self.contradicted_claims],
        }


def verify_claims(claims: Iterable[Claim], graph: Graph, report: HallucinationReport | None = None) -> HallucinationReport:
    report = report or HallucinationReport()
    for claim in claims:
        report.add(claim, verify_claim(graph, claim))
    return report


def hallucination_rate(responses: Sequence[str], graph: Graph) -> HallucinationReport:
    """Extract claims from each response and check every one against the graph."""
    report = HallucinationReport()
    for text in responses:
        verify_claims(extract_claims(text, graph.gazetteer, schema=graph.schema), graph, report)
    return report
