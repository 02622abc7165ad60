"""Text-generation metrics with every parameter pinned.

Tokenization: lowercase, split on non-alphanumerics, unstemmed (METEOR's
second alignment stage compares stems).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass

from ..query import stem, tokenize

BLEU_MAX_N = 4
METEOR_ALPHA = 0.9  # F_mean = PR / (alpha P + (1 - alpha) R) = 10PR / (R + 9P)
METEOR_GAMMA = 0.5
METEOR_BETA = 3


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _overlap(cand: Counter, ref: Counter) -> int:
    return sum(min(c, ref[g]) for g, c in cand.items())


def bleu(candidate: str, reference: str) -> float:
    """Sentence BLEU: n = 1..4, uniform weights, brevity penalty.

    When any order has zero matches, orders 2..4 get add-one smoothing on
    both numerator and denominator. No unigram match gives 0.
    """
    c, r = tokenize(candidate), tokenize(reference)
    if not c or not r:
        return 0.0
    matches, totals = [], []
    for n in range(1, BLEU_MAX_N + 1):
        cg = _ngrams(c, n)
        matches.append(_overlap(cg, _ngrams(r, n)))
        totals.append(max(len(c) - n + 1, 0))
    if matches[0] == 0:
        return 0.0
    smooth = any(m == 0 for m in matches)
    log_p = 0.0
    for n in range(BLEU_MAX_N):
        m, t = matches[n], totals[n]
        if smooth and n > 0:
            m, t = m + 1, t + 1
        log_p += math.log(m / t)
    bp = 1.0 if len(c) > len(r) else math.exp(1.0 - len(r) / len(c))
    return bp * math.exp(log_p / BLEU_MAX_N)


def _f1(hits: int, n_cand: int, n_ref: int) -> float:
    if hits == 0:
        return 0.0
    p, r = hits / n_cand, hits / n_ref
    return 2 * p * r / (p + r)


def rouge_n(candidate: str, reference: str, n: int = 1) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    c, r = tokenize(candidate), tokenize(reference)
    cg, rg = _ngrams(c, n), _ngrams(r, n)
    if not cg or not rg:
        return 0.0
    return _f1(_overlap(cg, rg), sum(cg.values()), sum(rg.values()))


def lcs_length(a: list[str], b: list[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: str, reference: str) -> float:
    c, r = tokenize(candidate), tokenize(reference)
    if not c or not r:
        return 0.0
    return _f1(lcs_length(c, r), len(c), len(r))


def _align(c: list[str], r: list[str]) -> list[tuple[int, int]]:
    """Exact-match stage then stem stage; each candidate word takes the first free reference slot."""
    free = list(range(len(r)))
    pairs: dict[int, int] = {}
    for key in (lambda w: w, stem):
        r_keys = [key(w) for w in r]
        for i, w in enumerate(c):
            if i in pairs:
                continue
            kw = key(w)
            for pos, j in enumerate(free):
                if r_keys[j] == kw:
                    pairs[i] = j
                    del free[pos]
                    break
    return sorted(pairs.items())


def meteor(candidate: str, reference: str) -> float:
    """Simplified METEOR without synonym tables."""
    c, r = tokenize(candidate), tokenize(reference)
    if not c or not r:
        return 0.0
    alignment = _align(c, r)
    m = len(alignment)
    if m == 0:
        return 0.0
    chunks = 1 + sum(
        1 for (i0, j0), (i1, j1) in zip(alignment, alignment[1:]) if (i1, j1) != (i0 + 1, j0 + 1)
    )
    p, rec = m / len(c), m / len(r)
    fmean = p * rec / (METEOR_ALPHA * p + (1 - METEOR_ALPHA) * rec)
    penalty = METEOR_GAMMA * (chunks / m) ** METEOR_BETA
    return fmean * (1.0 - penalty)


def overall(values) -> float:
    """Arithmetic mean of (bleu, rouge1, rouge2, rougeL, meteor)."""
    values = list(values)
    if len(values) != 5:
        raise ValueError(f"overall() takes five metric values, got {len(values)}")
    return sum(values) / 5.0


@dataclass(frozen=True)
class MetricRow:
    bleu: float
    rouge1: float
    rouge2: float
    rougeL: float
    meteor: float

    @property
    def overall(self) -> float:
        return overall(self.five)

    @property
    def five(self) -> tuple[float, float, float, float, float]:
        return (self.bleu, self.rouge1, self.rouge2, self.rougeL, self.meteor)

    def to_dict(self) -> dict:
        return {**asdict(self), "overall": self.overall}

    @classmethod
    def mean(cls, rows) -> "MetricRow":
        rows = list(rows)
        if not rows:
            return cls(0.0, 0.0, 0.0, 0.0, 0.0)
        cols = zip(*(r.five for r in rows))
        return cls(*(math.fsum(col) / len(rows) for col in cols))


def score_pair(candidate: str, reference: str) -> MetricRow:
    return MetricRow(
        bleu(candidate, reference),
        rouge_n(candidate, reference, 1),
        rouge_n(candidate, reference, 2),
        rouge_l(candidate, reference),
        meteor(candidate, reference),
    )


# Metric name column used in text reports, in table order.
METRIC_LABELS = (
    ("bleu", "BLEU Score"),
    ("rouge1", "ROUGE-1 Score"),
    ("rouge2", "ROUGE-2 Score"),
    ("rougeL", "ROUGE-L Score"),
    ("meteor", "METEOR Score"),
    ("overall", "Overall Score"),
)
