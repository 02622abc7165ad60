"""Evaluation: text metrics, hallucination rate, eval-set I/O and reports."""

from .hallucination import (
    EvalCase,
    HallucinationReport,
    extract_claims,
    hallucination_rate,
    read_evalset,
)
from .metrics import MetricRow, bleu, meteor, overall, rouge_l, rouge_n, score_pair
from .runner import CaseResult, EvalReport, metric_table, replay_tables, run_eval

__all__ = [
    "CaseResult",
    "EvalCase",
    "EvalReport",
    "HallucinationReport",
    "MetricRow",
    "bleu",
    "extract_claims",
    "hallucination_rate",
    "meteor",
    "metric_table",
    "overall",
    "read_evalset",
    "replay_tables",
    "rouge_l",
    "rouge_n",
    "run_eval",
    "score_pair",
]
