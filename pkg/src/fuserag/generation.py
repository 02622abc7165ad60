"""Prompt assembly and pluggable answer generators."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Protocol

import httpx

from .errors import ResponseSchemaError, ResponseTooLargeError, TransportError
from .fusion import FusedContext

DEFAULT_PREAMBLE = (
    "You are a careful mental-health information assistant. Answer only from the "
    "evidence blocks below and cite the ids you rely on. If the evidence does not "
    "answer the question, say so."
)
REFUSAL_TEXT = (
    "I could not find sufficient evidence to answer this question reliably. "
    "Please consult a qualified mental-health professional."
)
DEFAULT_EVIDENCE_BUDGET = 4000
DEFAULT_MAX_RESPONSE_CHARS = 20000


@dataclass(frozen=True)
class EvidenceBlock:
    tag: str
    text: str
    id: str
    linked: tuple[str, ...] = ()

    def render(self) -> str:
        head = f"[source:{self.tag} id={self.id}"
        if self.linked:
            head += " linked=" + ",".join(self.linked)
        return f"{head}] {self.text}"

    @property
    def provenance(self) -> tuple[str, ...]:
        return (self.id,) + self.linked


@dataclass(frozen=True)
class Prompt:
    system_preamble: str
    evidence_blocks: tuple[EvidenceBlock, ...]
    question: str

    @property
    def provenance_ids(self) -> tuple[str, ...]:
        return tuple(i for b in self.evidence_blocks for i in b.provenance)

    def render(self) -> str:
        parts = [self.system_preamble, ""]
        parts.extend(b.render() for b in self.evidence_blocks)
        parts.extend(["", f"Question: {self.question}"])
        return "\n".join(parts)


@dataclass(frozen=True)
class GeneratedResponse:
    text: str
    cited_provenance: tuple[str, ...]
    generator_id: str
    degraded: bool = False

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "cited_provenance": list(self.cited_provenance),
            "generator_id": self.generator_id,
            "degraded": self.degraded,
        }


def assemble_prompt(
    ctx: FusedContext,
    question: str | None = None,
    budget: int = DEFAULT_EVIDENCE_BUDGET,
    preamble: str = DEFAULT_PREAMBLE,
) -> Prompt:
    """Render evidence in rank order, dropping whole blocks from the bottom once
    the rendered length would exceed ``budget`` characters."""
    if question is None:
        question = ctx.query.original.text if ctx.query is not None else ""
    blocks: list[EvidenceBlock] = []
    used = 0
    for c in ctx.candidates:
        block = EvidenceBlock(c.source, c.text, c.id, c.linked)
        size = len(block.render())
        if used + size > budget:
            break
        blocks.append(block)
        used += size
    return Prompt(preamble, tuple(blocks), question)


class GeneratorAdapter(Protocol):
    generator_id: str
    # False means callers must serialize calls to this adapter
    concurrency_safe: bool
    max_parallel: int

    def complete(self, prompt: Prompt) -> GeneratedResponse: ...


@dataclass
class TemplateGenerator:
    """Deterministic stand-in for a language model: quotes the top evidence block."""

    generator_id: str = "template/1"
    concurrency_safe: bool = True
    max_parallel: int = 64

    def complete(self, prompt: Prompt) -> GeneratedResponse:
        top = prompt.evidence_blocks[0]
        ids = prompt.provenance_ids
        text = f"{top.text}\n[sources: {', '.join(ids)}]"
        return GeneratedResponse(text, ids, self.generator_id)


@dataclass
class HttpGenerator:
    """Client for the HTTP generation protocol.

    POST {"system", "evidence": [{"tag","id","text"}], "question"} -> {"text"}.
    """

    endpoint: str
    timeout: float = 60.0
    max_response_chars: int = DEFAULT_MAX_RESPONSE_CHARS
    model_name: str = ""
    max_parallel: int = 4
    concurrency_safe: bool = True
    client: httpx.Client | None = None
    generator_id: str = field(default="")

    def __post_init__(self):
        if not self.generator_id:
            self.generator_id = f"http/{self.model_name or self.endpoint}"
        if self.client is None:
            self.client = httpx.Client(timeout=self.timeout)

    def complete(self, prompt: Prompt) -> GeneratedResponse:
        payload = {
            "system": prompt.system_preamble,
            "evidence": [{"tag": b.tag, "id": b.id, "text": b.text} for b in prompt.evidence_blocks],
            "question": prompt.question,
        }
        try:
            resp = self.client.post(self.endpoint, json=payload)
        except httpx.HTTPError as exc:
            raise TransportError(f"generation request failed: {exc}") from exc
        if not 200 <= resp.status_code < 300:
            raise TransportError(f"generation service returned {resp.status_code}")
        if len(resp.content) > 4 * self.max_response_chars + 1024:
            raise ResponseTooLargeError(f"generation response of {len(resp.content)} bytes exceeds the cap")
        try:
            text = resp.json()["text"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ResponseSchemaError(f"malformed generation response: {exc}") from None
        if not isinstance(text, str):
            raise ResponseSchemaError("generation response field 'text' is not a string")
        if len(text) > self.max_response_chars:
            raise ResponseTooLargeError(f"generated text of {len(text)} chars exceeds {self.max_response_chars}")
        cited = tuple(i for i in prompt.provenance_ids if i in text)
        return GeneratedResponse(text, cited, self.generator_id)


_CITATION_LINE = re.compile(r"\n\[sources: [^\]\n]*\]\s*$")


def answer_body(text: str) -> str:
    """Response text without a trailing ``[sources: ...]`` citation line."""
    return _CITATION_LINE.sub("", text)


def generate(prompt: Prompt, adapter: GeneratorAdapter) -> GeneratedResponse:
    """Run the adapter; with no evidence, refuse without calling it."""
    if not prompt.evidence_blocks:
        return GeneratedResponse(REFUSAL_TEXT, (), getattr(adapter, "generator_id", "unknown"), degraded=True)
    resp = adapter.complete(prompt)
    allowed = set(prompt.provenance_ids)
    stray = [i for i in resp.cited_provenance if i not in allowed]
    if stray:
        raise ResponseSchemaError(f"adapter cited ids not present in the prompt: {stray}")
    return resp
