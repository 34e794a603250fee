"""Word-verdict ladder: classifies each ground-truth word as Transcribed,
Translated, Semantic, Transliterated, or Unclear from its aligned
nearest-neighbour tokens.

The steps run strictly in order and the first hit wins:
  3a  token string equals the word,
  3b  token equals an aligned translation word in one of the corpus's top
      token languages,
  3c  cross-lingual embedding cosine between word and token reaches the
      semantic threshold (default 0.54), with an English pivot when the
      analyzed language is outside the embedding space,
  3d  ordered phone containment: enough of the word's phones appear in
      order across the phonetized token sequence.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    EmptyWordPhones,
    InsufficientPairs,
    NoIdentifiedTokens,
    UnsupportedLanguage,
)
from .interchange import UtteranceRecord
from .providers import Provider, strip_token_markers

SEMANTIC_THRESHOLD_DEFAULT = 0.54
PHONE_MATCH_RATIO_DEFAULT = 0.5
TOP_K_LANGUAGES_DEFAULT = 3
SIMLEX_HIGH_CUTOFF_DEFAULT = 7.0

ALL_STEPS = frozenset({"3a", "3b", "3c", "3d"})


class Verdict(Enum):
    TRANSCRIBED = "Transcribed"
    TRANSLATED = "Translated"
    SEMANTIC = "Semantic"
    TRANSLITERATED = "Transliterated"
    UNCLEAR = "Unclear"


class Normalization(Enum):
    EXACT = "Exact"
    CASEFOLD = "Casefold"
    CASEFOLD_STRIP_MARKS = "CasefoldStripMarks"


def normalize(text: str, mode: Normalization) -> str:
    text = strip_token_markers(text)
    if mode is Normalization.EXACT:
        return text
    text = text.casefold()
    if mode is Normalization.CASEFOLD_STRIP_MARKS:
        decomposed = unicodedata.normalize("NFD", text)
        text = "".join(c for c in decomposed if unicodedata.category(c) != "Mn")
    return text


@dataclass(frozen=True)
class VerdictConfig:
    semantic_threshold: float = SEMANTIC_THRESHOLD_DEFAULT
    phone_match_ratio: float = PHONE_MATCH_RATIO_DEFAULT
    # the figure's worked example accepts exactly half; the strict reading
    # ("more than half") is available here
    phone_ratio_strict: bool = False
    normalization: Normalization = Normalization.EXACT
    enable_steps: frozenset[str] = ALL_STEPS
    top_k_languages: int = TOP_K_LANGUAGES_DEFAULT

    def __post_init__(self):
        if not 0.0 <= self.semantic_threshold <= 1.0:
            raise ValueError(f"semantic_threshold {self.semantic_threshold} outside [0, 1]")
        if not 0.0 < self.phone_match_ratio <= 1.0:
            raise ValueError(f"phone_match_ratio {self.phone_match_ratio} outside (0, 1]")
        unknown = set(self.enable_steps) - ALL_STEPS
        if unknown:
            raise ValueError(f"unknown ladder steps: {sorted(unknown)}")


@dataclass(frozen=True)
class TokenObservation:
    """One top-1 nearest token aligned to a word, in frame order."""

    text: str
    language: str | None = None


@dataclass(frozen=True)
class WordVerdict:
    word_index: int
    surface: str
    verdict: Verdict
    evidence: str | None = None
    similarities: tuple[float, ...] = ()


class MultilingualEmbeddingSpace:
    """Per-language word -> vector maps sharing one space.

    Lookups try the stored key first and fall back to the casefolded key
    (the embedding vocabularies are lowercase-dominant).
    """

    def __init__(self, vectors: dict[str, dict[str, np.ndarray]]):
        self.vectors = vectors
        dims = {v.shape[0] for lang in vectors.values() for v in lang.values()}
        if len(dims) > 1:
            raise ValueError(f"mixed vector dimensions in shared space: {sorted(dims)}")
        self._casefolded = {
            lang: {w.casefold(): v for w, v in words.items()}
            for lang, words in vectors.items()
        }

    @property
    def covered_languages(self) -> set[str]:
        return set(self.vectors)

    def lookup(self, word: str, language: str) -> np.ndarray | None:
        words = self.vectors.get(language)
        if words is None:
            return None
        hit = words.get(word)
        if hit is None:
            hit = self._casefolded[language].get(word.casefold())
        return hit

    @classmethod
    def from_text_files(cls, paths_by_language: dict[str, str]) -> "MultilingualEmbeddingSpace":
        """Loads word2vec-style text files ('word v1 v2 ...' lines; an
        optional 'count dim' header line is skipped)."""
        vectors: dict[str, dict[str, np.ndarray]] = {}
        for lang, path in paths_by_language.items():
            words: dict[str, np.ndarray] = {}
            with open(path, encoding="utf-8") as f:
                for line_no, line in enumerate(f):
                    parts = line.rstrip("\n").split(" ")
                    if line_no == 0 and len(parts) == 2:
                        continue
                    if len(parts) < 2:
                        continue
                    words[parts[0]] = np.asarray([float(x) for x in parts[1:]], dtype=np.float64)
            vectors[lang] = words
        return cls(vectors)


def _cosine(a: np.ndarray, b: np.ndarray) -> float | None:
    a = a.astype(np.float64)
    b = b.astype(np.float64)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return None
    return float(a @ b / (na * nb))


# --- ladder steps --------------------------------------------------------

def top_languages(languages, k: int = TOP_K_LANGUAGES_DEFAULT) -> list[str]:
    """Top-k token languages by count (desc), ties by code; 'und' excluded.

    Accepts an iterable of language codes (one per assignment; None allowed).
    """
    counts: dict[str, int] = {}
    for code in languages:
        if code and code != "und":
            counts[code] = counts.get(code, 0) + 1
    if not counts:
        raise NoIdentifiedTokens("no assignment has a resolved language")
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [code for code, _ in ranked[:k]]


def is_transcription(word: str, tokens, normalization: Normalization) -> str | None:
    target = normalize(word, normalization)
    for token in tokens:
        if normalize(token, normalization) == target:
            return token
    return None


def is_translation(word_index: int, aligned_by_language, tokens,
                   normalization: Normalization) -> tuple[str, str] | None:
    """aligned_by_language: (language, aligned target words) pairs, already
    in top-language order."""
    for language, aligned_words in aligned_by_language:
        targets = {normalize(w, normalization) for w in aligned_words}
        if not targets:
            continue
        for token in tokens:
            if normalize(token, normalization) in targets:
                return token, language
    return None


def semantic_similarity(word: str, word_lang: str, token: str, token_lang: str | None,
                        space: MultilingualEmbeddingSpace,
                        english_pivot: str | None = None) -> float | None:
    if token_lang is None or token_lang == "und":
        return None
    token_vec = space.lookup(strip_token_markers(token), token_lang)
    if token_vec is None:
        return None
    if word_lang in space.covered_languages:
        word_vec = space.lookup(word, word_lang)
    elif english_pivot is not None:
        word_vec = space.lookup(english_pivot, "en")
    else:
        word_vec = None
    if word_vec is None:
        return None
    return _cosine(word_vec, token_vec)


def transliteration_match(word_phones, token_sequence_phones, ratio: float,
                          strict: bool = False) -> tuple[int, bool]:
    """Longest ordered containment of word_phones in the concatenated token
    phone sequence (dynamic programming over phone-string equality)."""
    word_phones = list(word_phones)
    seq = list(token_sequence_phones)
    if not word_phones:
        raise EmptyWordPhones("cannot match an empty word phone list")
    n, m = len(word_phones), len(seq)
    prev = [0] * (m + 1)
    for i in range(1, n + 1):
        cur = [0] * (m + 1)
        for j in range(1, m + 1):
            if word_phones[i - 1] == seq[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    matched = prev[m]
    fraction = matched / n
    is_match = fraction > ratio if strict else fraction >= ratio
    return matched, is_match


# --- the ladder ----------------------------------------------------------

def classify_word(word_index: int, record: UtteranceRecord,
                  tokens_for_word: list[TokenObservation], config: VerdictConfig,
                  space: MultilingualEmbeddingSpace | None,
                  provider: Provider | None,
                  top_langs: list[str]) -> WordVerdict:
    word = record.words[word_index]
    token_texts = [t.text for t in tokens_for_word]

    if "3a" in config.enable_steps and token_texts:
        hit = is_transcription(word.surface, token_texts, config.normalization)
        if hit is not None:
            return WordVerdict(word_index, word.surface, Verdict.TRANSCRIBED, evidence=hit)

    aligned_by_language = [
        (lang, record.aligned_translation_words(word_index, lang))
        for lang in top_langs
        if lang in record.translations
    ]

    if "3b" in config.enable_steps and token_texts:
        hit = is_translation(word_index, aligned_by_language, token_texts,
                             config.normalization)
        if hit is not None:
            token, language = hit
            return WordVerdict(word_index, word.surface, Verdict.TRANSLATED,
                               evidence=f"{token} ({language})")

    similarities: list[float] = []
    if "3c" in config.enable_steps and space is not None and token_texts:
        english_pivot = None
        for lang, aligned in aligned_by_language:
            if lang == "en" and aligned:
                english_pivot = aligned[0]
                break
        best: tuple[float, str] | None = None
        for obs in tokens_for_word:
            sim = semantic_similarity(word.surface, record.language, obs.text,
                                      obs.language, space, english_pivot)
            if sim is None:
                continue
            similarities.append(sim)
            if best is None or sim > best[0]:
                best = (sim, obs.text)
        if best is not None and best[0] >= config.semantic_threshold:
            return WordVerdict(word_index, word.surface, Verdict.SEMANTIC,
                               evidence=f"{best[1]} (cos {best[0]:.2f})",
                               similarities=tuple(similarities))

    if "3d" in config.enable_steps and provider is not None and token_texts:
        word_phones = provider.phonetize(word.surface, record.language)
        if word_phones:
            token_seq_phones: list[str] = []
            for obs in tokens_for_word:
                token_seq_phones.extend(
                    _phonetize_token(provider, obs, record.language)
                )
            if token_seq_phones:
                matched, hit = transliteration_match(
                    word_phones, token_seq_phones, config.phone_match_ratio,
                    strict=config.phone_ratio_strict,
                )
                if hit:
                    return WordVerdict(
                        word_index, word.surface, Verdict.TRANSLITERATED,
                        evidence=f"{matched}/{len(word_phones)} phones in order",
                        similarities=tuple(similarities),
                    )

    return WordVerdict(word_index, word.surface, Verdict.UNCLEAR,
                       similarities=tuple(similarities))


def _phonetize_token(provider: Provider, obs: TokenObservation,
                     analyzed_language: str) -> list[str]:
    # prefer the token's own language; fall back to the analyzed language;
    # a token phonetizable in neither contributes nothing
    languages = []
    if obs.language and obs.language != "und":
        languages.append(obs.language)
    if analyzed_language not in languages:
        languages.append(analyzed_language)
    for lang in languages:
        try:
            return provider.phonetize(obs.text, lang)
        except UnsupportedLanguage:
            continue
    return []


# --- threshold calibration ----------------------------------------------

def calibrate_threshold(simlex_pairs, space: MultilingualEmbeddingSpace,
                        high_cutoff: float = SIMLEX_HIGH_CUTOFF_DEFAULT,
                        min_pairs: int = 100) -> float:
    """Chooses the cosine threshold maximizing F1 agreement between
    {cosine >= t} and {human score >= high_cutoff} over English pairs."""
    cosines: list[float] = []
    positives: list[bool] = []
    for word1, word2, score in simlex_pairs:
        v1 = space.lookup(word1, "en")
        v2 = space.lookup(word2, "en")
        if v1 is None or v2 is None:
            continue
        cos = _cosine(v1, v2)
        if cos is None:
            continue
        cosines.append(cos)
        positives.append(score >= high_cutoff)
    if len(cosines) < min_pairs:
        raise InsufficientPairs(
            f"only {len(cosines)} resolvable pairs, need at least {min_pairs}"
        )
    if not any(positives) or all(positives):
        raise InsufficientPairs("degenerate positive class at this cutoff")
    best_t, best_f1 = None, -1.0
    for t in sorted(set(cosines)):
        tp = sum(1 for c, p in zip(cosines, positives) if c >= t and p)
        fp = sum(1 for c, p in zip(cosines, positives) if c >= t and not p)
        fn = sum(1 for c, p in zip(cosines, positives) if c < t and p)
        denom = 2 * tp + fp + fn
        f1 = 2 * tp / denom if denom else 0.0
        if f1 > best_f1:
            best_t, best_f1 = t, f1
    return best_t


# --- serialization -------------------------------------------------------

def save_verdicts(path, utterance_verdicts) -> None:
    """utterance_verdicts: iterable of (utterance_id, list[WordVerdict])."""
    with open(path, "w", encoding="utf-8") as f:
        for utterance_id, verdicts in utterance_verdicts:
            for v in verdicts:
                f.write(json.dumps({
                    "utterance_id": utterance_id,
                    "word_index": v.word_index,
                    "surface": v.surface,
                    "verdict": v.verdict.value,
                    "evidence": v.evidence,
                    "similarities": list(v.similarities),
                }, ensure_ascii=False) + "\n")


def load_verdicts(path) -> list[tuple[str, WordVerdict]]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        out.append((doc["utterance_id"], WordVerdict(
            word_index=doc["word_index"],
            surface=doc["surface"],
            verdict=Verdict(doc["verdict"]),
            evidence=doc.get("evidence"),
            similarities=tuple(doc.get("similarities", ())),
        )))
    return out
