"""WER scoring and language-match rates for model-generated transcriptions.

Hypotheses arrive as files; this module only scores. WER is unit-cost
minimum edit distance over tokens divided by reference length, so rates
above 100% are possible.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass

from .errors import EmptyInput, EmptyReference, MissingFile
from .providers import Provider

# languages written without word separators default to character tokens
CHAR_SCHEME_LANGUAGES = {"zh", "th", "ja"}


@dataclass(frozen=True)
class HypothesisSet:
    model_id: str
    language: str
    hypotheses: dict[str, str]      # utterance_id -> hypothesis text


@dataclass(frozen=True)
class WerResult:
    wer: float                      # fraction; multiply by 100 for Table-style %
    substitutions: int
    deletions: int
    insertions: int
    reference_length: int


def edit_distance(reference, hypothesis) -> tuple[int, int, int]:
    """(substitutions, deletions, insertions) of a minimum-cost alignment."""
    n, m = len(reference), len(hypothesis)
    # cost plus op-count backtrace-free tracking: store (cost, subs, dels, ins)
    prev = [(j, 0, 0, j) for j in range(m + 1)]
    for i in range(1, n + 1):
        cur = [(i, 0, i, 0)] + [None] * m
        for j in range(1, m + 1):
            if reference[i - 1] == hypothesis[j - 1]:
                sub_cost = 0
            else:
                sub_cost = 1
            c_sub, s, d, ins = prev[j - 1]
            candidates = [
                (c_sub + sub_cost, s + sub_cost, d, ins),
                (prev[j][0] + 1, prev[j][1], prev[j][2] + 1, prev[j][3]),
                (cur[j - 1][0] + 1, cur[j - 1][1], cur[j - 1][2], cur[j - 1][3] + 1),
            ]
            cur[j] = min(candidates, key=lambda c: c[0])
        prev = cur
    _, s, d, ins = prev[m]
    return s, d, ins


def wer(reference_tokens, hypothesis_tokens) -> float:
    result = wer_detail(reference_tokens, hypothesis_tokens)
    return result.wer


def wer_detail(reference_tokens, hypothesis_tokens) -> WerResult:
    reference_tokens = list(reference_tokens)
    hypothesis_tokens = list(hypothesis_tokens)
    if not reference_tokens:
        raise EmptyReference("reference token list is empty")
    s, d, ins = edit_distance(reference_tokens, hypothesis_tokens)
    return WerResult(
        wer=(s + d + ins) / len(reference_tokens),
        substitutions=s, deletions=d, insertions=ins,
        reference_length=len(reference_tokens),
    )


def tokenize_for_wer(text: str, language: str = "", scheme: str | None = None) -> list[str]:
    """Whitespace tokens with edge punctuation trimmed, or per-character
    tokens (combining marks attach to their base) for unsegmented scripts."""
    if scheme is None:
        scheme = "Char" if language in CHAR_SCHEME_LANGUAGES else "Whitespace"
    text = text.casefold()
    if scheme == "Whitespace":
        tokens = []
        for raw in text.split():
            token = _trim_edge_punctuation(raw)
            if token:
                tokens.append(token)
        return tokens
    if scheme == "Char":
        clusters: list[str] = []
        for ch in text:
            if ch.isspace():
                continue
            if clusters and unicodedata.category(ch) in ("Mn", "Mc", "Me"):
                clusters[-1] += ch
            else:
                clusters.append(ch)
        return clusters
    raise ValueError(f"unknown tokenization scheme {scheme!r}")


def _trim_edge_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def corpus_wer(references: dict[str, str], hypotheses: HypothesisSet,
               scheme: str | None = None) -> float:
    """Pooled WER over a corpus: total edits / total reference tokens."""
    total_edits = 0
    total_ref = 0
    for utterance_id, ref_text in references.items():
        ref = tokenize_for_wer(ref_text, hypotheses.language, scheme)
        hyp = tokenize_for_wer(hypotheses.hypotheses.get(utterance_id, ""),
                               hypotheses.language, scheme)
        if not ref:
            continue
        s, d, ins = edit_distance(ref, hyp)
        total_edits += s + d + ins
        total_ref += len(ref)
    if total_ref == 0:
        raise EmptyReference("no non-empty references in corpus")
    return total_edits / total_ref


def lang_match_rate(hypotheses: HypothesisSet, expected: str,
                    provider: Provider) -> float:
    """Percentage of hypotheses identified as the expected language;
    empty hypotheses count as mismatches."""
    if not hypotheses.hypotheses:
        raise EmptyReference("hypothesis set is empty")
    matches = 0
    for text in hypotheses.hypotheses.values():
        if not text.strip():
            continue
        try:
            code = provider.identify_language(text)
        except EmptyInput:
            continue
        if code == expected:
            matches += 1
    return 100.0 * matches / len(hypotheses.hypotheses)


def load_hypotheses(path, model_id: str = "", language: str = "") -> HypothesisSet:
    """Hypothesis file: JSON object mapping utterance_id -> hypothesis, or
    an envelope {"model_id", "language", "hypotheses": {...}}."""
    from pathlib import Path

    path = Path(path)
    if not path.exists():
        raise MissingFile(f"hypothesis file not found: {path}")
    doc = json.loads(path.read_text(encoding="utf-8"))
    if "hypotheses" in doc:
        return HypothesisSet(
            model_id=doc.get("model_id", model_id),
            language=doc.get("language", language),
            hypotheses=dict(doc["hypotheses"]),
        )
    return HypothesisSet(model_id=model_id, language=language, hypotheses=dict(doc))
