"""Corpus-level analysis pipeline: neighbors -> token language ID ->
top-language translation/alignment -> per-word verdict ladder."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass

from .errors import EmptyInput, NoIdentifiedTokens, UnsupportedLanguagePair
from .interchange import Corpus, Translation, UtteranceRecord
from .neighbor import NeighborAssignment, assign_neighbors
from .providers import Provider
from .temporal import assign_words
from .verdict import (
    MultilingualEmbeddingSpace,
    TokenObservation,
    VerdictConfig,
    WordVerdict,
    classify_word,
    top_languages,
)

log = logging.getLogger(__name__)


@dataclass
class VerdictRun:
    top_languages: list[str]
    # utterance_id -> per-frame assignments (languages resolved)
    assignments: dict[str, list[NeighborAssignment]]
    # utterance_id -> per-word verdicts
    verdicts: dict[str, list[WordVerdict]]


def compute_assignments(corpus: Corpus, stage: str,
                        provider: Provider | None = None
                        ) -> dict[str, list[NeighborAssignment]]:
    """Nearest-token assignment for every utterance; languages resolved
    per distinct token when a provider is given."""
    matrix = corpus.embedding_matrix()
    language_memo: dict[str, str] = {}
    out: dict[str, list[NeighborAssignment]] = {}
    for i in range(len(corpus)):
        record = corpus.record(i)
        seq = corpus.sequences(i).get(stage)
        if seq is None:
            log.warning("utterance %s has no %s sequence; skipped",
                        record.utterance_id, stage)
            continue
        assignments = assign_neighbors(seq, matrix)
        if provider is not None:
            assignments = [
                a if a.is_no_neighbor
                else a.with_language(_token_language(a.token, provider, language_memo))
                for a in assignments
            ]
        out[record.utterance_id] = assignments
    return out


def _token_language(token: str, provider: Provider,
                    memo: dict[str, str]) -> str | None:
    if token not in memo:
        try:
            memo[token] = provider.identify_language(token)
        except EmptyInput:
            memo[token] = "und"
    return memo[token]


def ensure_translations(record: UtteranceRecord, languages: list[str],
                        provider: Provider) -> UtteranceRecord:
    """Fills in missing per-language translations and word alignments for
    the given target languages (the analyzed language itself is skipped)."""
    translations = dict(record.translations)
    source_sentence = " ".join(w.surface for w in record.words)
    for lang in languages:
        if lang == record.language or lang in translations:
            continue
        try:
            sentence = provider.translate(source_sentence, record.language, lang)
        except UnsupportedLanguagePair:
            log.warning("no %s->%s translation for %s; step 3b/3c will skip it",
                        record.language, lang, record.utterance_id)
            continue
        alignment = provider.align_words(source_sentence, sentence)
        translations[lang] = Translation(sentence=sentence, alignment=tuple(alignment))
    if translations == record.translations:
        return record
    return dataclasses.replace(record, translations=translations)


def run_verdicts(corpus: Corpus, provider: Provider, config: VerdictConfig,
                 space: MultilingualEmbeddingSpace | None = None,
                 stage: str = "AdapterOutput", min_overlap_ms: int = 0) -> VerdictRun:
    assignments = compute_assignments(corpus, stage, provider)
    try:
        langs = top_languages(
            (a.language for utt in assignments.values() for a in utt),
            k=config.top_k_languages,
        )
    except NoIdentifiedTokens:
        langs = []
    verdicts: dict[str, list[WordVerdict]] = {}
    for i in range(len(corpus)):
        record = corpus.record(i)
        utt_assignments = assignments.get(record.utterance_id)
        if utt_assignments is None:
            continue
        seq = corpus.sequences(i)[stage]
        record = ensure_translations(record, langs, provider)
        word_spans = assign_words(record, seq, min_overlap_ms)
        utt_verdicts = []
        for span in word_spans:
            tokens = [
                TokenObservation(text=utt_assignments[f].token,
                                 language=utt_assignments[f].language)
                for f in span.frame_indices
                if not utt_assignments[f].is_no_neighbor
            ]
            utt_verdicts.append(classify_word(
                span.word_index, record, tokens, config, space, provider, langs,
            ))
        verdicts[record.utterance_id] = utt_verdicts
    return VerdictRun(top_languages=langs, assignments=assignments, verdicts=verdicts)
