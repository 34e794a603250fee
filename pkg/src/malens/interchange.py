"""Bit-exact tensor interchange format, utterance records, and corpus manifests.

This is the only boundary between the analysis toolkit and whatever
ecosystem hosts the models: embedding matrices and representation
sequences travel as little-endian binary files with an 8-byte magic,
vocabularies ride in a JSON sidecar, and utterance metadata is plain JSON
with integer-millisecond times.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    BadMagic,
    InvariantViolation,
    LanguageMismatch,
    MissingFile,
    NonFinite,
    ShapeMismatch,
    VocabMismatch,
    ZeroFrameDuration,
)

MAGIC = b"MALENS01"
KIND_MATRIX = 1
KIND_SEQUENCE = 2

_MATRIX_HEADER = struct.Struct("<QQ")          # vocab_size, dim
_SEQUENCE_HEADER = struct.Struct("<QQIB")      # num_frames, dim, frame_ms, stage

PHONE_SPAN_TOLERANCE_MS = 1


class Stage(Enum):
    ENCODER_OUTPUT = 1
    ADAPTER_OUTPUT = 2

    @classmethod
    def from_name(cls, name: str) -> "Stage":
        return {"EncoderOutput": cls.ENCODER_OUTPUT, "AdapterOutput": cls.ADAPTER_OUTPUT}[name]

    @property
    def wire_name(self) -> str:
        return {Stage.ENCODER_OUTPUT: "EncoderOutput", Stage.ADAPTER_OUTPUT: "AdapterOutput"}[self]


@dataclass(frozen=True)
class EmbeddingMatrix:
    rows: np.ndarray          # vocab_size x dim, float32
    tokens: tuple[str, ...]

    @property
    def vocab_size(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]

    def __post_init__(self):
        if self.rows.ndim != 2:
            raise ShapeMismatch(f"embedding matrix must be 2-D, got shape {self.rows.shape}")
        if self.rows.shape[0] < 2:
            raise ShapeMismatch("vocab_size must be >= 2 (mean-centring is degenerate otherwise)")
        if len(self.tokens) != self.rows.shape[0]:
            raise VocabMismatch(
                f"vocabulary has {len(self.tokens)} tokens but matrix has {self.rows.shape[0]} rows"
            )
        if not np.isfinite(self.rows).all():
            raise NonFinite("embedding matrix contains NaN/Inf")


@dataclass(frozen=True)
class RepresentationSequence:
    utterance_id: str
    stage: Stage
    frame_ms: int
    frames: np.ndarray        # num_frames x dim, float32

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]

    def __post_init__(self):
        if self.frame_ms <= 0:
            raise ZeroFrameDuration(f"frame_ms must be positive, got {self.frame_ms}")
        if self.frames.ndim != 2 or self.frames.shape[0] < 1:
            raise ShapeMismatch(f"sequence must be non-empty 2-D, got shape {self.frames.shape}")
        if not np.isfinite(self.frames).all():
            raise NonFinite(f"sequence {self.utterance_id!r} contains NaN/Inf")


@dataclass(frozen=True)
class Word:
    surface: str
    start_ms: int
    end_ms: int


@dataclass(frozen=True)
class Phone:
    phone: str
    start_ms: int
    end_ms: int
    parent_word_index: int


@dataclass(frozen=True)
class Translation:
    sentence: str
    # (source_word_index, target_word_index) over whitespace tokens
    alignment: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class UtteranceRecord:
    utterance_id: str
    language: str
    words: tuple[Word, ...]
    phones: tuple[Phone, ...] = ()
    translations: dict[str, Translation] = field(default_factory=dict)

    def validate(self) -> None:
        prev_start = None
        prev_end = None
        for i, w in enumerate(self.words):
            if w.end_ms <= w.start_ms:
                raise InvariantViolation(
                    f"word {i} ({w.surface!r}) has inverted span [{w.start_ms}, {w.end_ms})",
                    utterance_id=self.utterance_id,
                )
            if prev_start is not None and w.start_ms <= prev_start:
                raise InvariantViolation(
                    f"word {i} start {w.start_ms} does not increase past {prev_start}",
                    utterance_id=self.utterance_id,
                )
            if prev_end is not None and w.start_ms < prev_end:
                raise InvariantViolation(
                    f"word {i} overlaps previous word ({w.start_ms} < {prev_end})",
                    utterance_id=self.utterance_id,
                )
            prev_start, prev_end = w.start_ms, w.end_ms
        for j, p in enumerate(self.phones):
            if not 0 <= p.parent_word_index < len(self.words):
                raise InvariantViolation(
                    f"phone {j} ({p.phone!r}) has parent_word_index {p.parent_word_index} "
                    f"outside 0..{len(self.words) - 1}",
                    utterance_id=self.utterance_id,
                )
            w = self.words[p.parent_word_index]
            if (p.start_ms < w.start_ms - PHONE_SPAN_TOLERANCE_MS
                    or p.end_ms > w.end_ms + PHONE_SPAN_TOLERANCE_MS):
                raise InvariantViolation(
                    f"phone {j} ({p.phone!r}) span [{p.start_ms}, {p.end_ms}) exceeds its word "
                    f"span [{w.start_ms}, {w.end_ms}) beyond the {PHONE_SPAN_TOLERANCE_MS} ms tolerance",
                    utterance_id=self.utterance_id,
                )
        for lang, tr in self.translations.items():
            n_target = len(tr.sentence.split())
            for src, tgt in tr.alignment:
                if not 0 <= src < len(self.words):
                    raise InvariantViolation(
                        f"{lang} alignment source index {src} out of range",
                        utterance_id=self.utterance_id,
                    )
                if not 0 <= tgt < n_target:
                    raise InvariantViolation(
                        f"{lang} alignment target index {tgt} out of range",
                        utterance_id=self.utterance_id,
                    )

    def aligned_translation_words(self, word_index: int, language: str) -> list[str]:
        """Target-language words aligned to one transcript word ([] if none)."""
        tr = self.translations.get(language)
        if tr is None:
            return []
        target = tr.sentence.split()
        return [target[tgt] for src, tgt in tr.alignment if src == word_index]


@dataclass(frozen=True)
class ManifestEntry:
    record_path: Path
    sequence_paths: dict[str, Path]   # stage wire name -> path


@dataclass(frozen=True)
class CorpusManifest:
    corpus_id: str
    model_id: str
    language: str
    embedding_matrix_path: Path
    entries: tuple[ManifestEntry, ...]


# --- binary tensor files -------------------------------------------------

def _check_payload(raw: bytes, expected_values: int, path) -> np.ndarray:
    if len(raw) != expected_values * 4:
        raise ShapeMismatch(
            f"{path}: payload is {len(raw)} bytes, expected {expected_values * 4} "
            f"({expected_values} float32 values)"
        )
    return np.frombuffer(raw, dtype="<f4")


def _read_header(f, path, expected_kind: int) -> None:
    magic = f.read(len(MAGIC))
    if magic != MAGIC:
        raise BadMagic(f"{path}: not a malens interchange file (magic {magic!r})")
    kind = f.read(1)
    if len(kind) != 1 or kind[0] != expected_kind:
        raise BadMagic(f"{path}: wrong kind byte {kind!r}, expected {expected_kind}")


def write_embedding_matrix(path, matrix: EmbeddingMatrix) -> None:
    path = Path(path)
    rows = np.ascontiguousarray(matrix.rows, dtype="<f4")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(bytes([KIND_MATRIX]))
        f.write(_MATRIX_HEADER.pack(matrix.vocab_size, matrix.dim))
        f.write(rows.tobytes())
    vocab_sidecar(path).write_text(
        json.dumps(list(matrix.tokens), ensure_ascii=False), encoding="utf-8"
    )


def vocab_sidecar(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".vocab.json")


def load_embedding_matrix(path) -> EmbeddingMatrix:
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"embedding matrix file not found: {path}")
    with open(path, "rb") as f:
        _read_header(f, path, KIND_MATRIX)
        header = f.read(_MATRIX_HEADER.size)
        if len(header) != _MATRIX_HEADER.size:
            raise ShapeMismatch(f"{path}: truncated header")
        vocab_size, dim = _MATRIX_HEADER.unpack(header)
        payload = _check_payload(f.read(), vocab_size * dim, path)
    sidecar = vocab_sidecar(path)
    if not sidecar.exists():
        raise MissingFile(f"vocabulary sidecar not found: {sidecar}")
    tokens = json.loads(sidecar.read_text(encoding="utf-8"))
    if not isinstance(tokens, list) or len(tokens) != vocab_size:
        raise VocabMismatch(
            f"{sidecar}: {len(tokens) if isinstance(tokens, list) else '?'} tokens "
            f"for vocab_size {vocab_size}"
        )
    rows = payload.reshape(vocab_size, dim)
    if not np.isfinite(rows).all():
        raise NonFinite(f"{path}: payload contains NaN/Inf")
    return EmbeddingMatrix(rows=rows, tokens=tuple(tokens))


def write_representation_sequence(path, seq: RepresentationSequence) -> None:
    frames = np.ascontiguousarray(seq.frames, dtype="<f4")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(bytes([KIND_SEQUENCE]))
        f.write(_SEQUENCE_HEADER.pack(seq.num_frames, seq.dim, seq.frame_ms, seq.stage.value))
        f.write(frames.tobytes())


def load_representation_sequence(path, utterance_id: str | None = None) -> RepresentationSequence:
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"sequence file not found: {path}")
    with open(path, "rb") as f:
        _read_header(f, path, KIND_SEQUENCE)
        header = f.read(_SEQUENCE_HEADER.size)
        if len(header) != _SEQUENCE_HEADER.size:
            raise ShapeMismatch(f"{path}: truncated header")
        num_frames, dim, frame_ms, stage = _SEQUENCE_HEADER.unpack(header)
        if frame_ms == 0:
            raise ZeroFrameDuration(f"{path}: frame_ms is 0")
        payload = _check_payload(f.read(), num_frames * dim, path)
    frames = payload.reshape(num_frames, dim)
    if not np.isfinite(frames).all():
        raise NonFinite(f"{path}: payload contains NaN/Inf")
    try:
        stage_enum = Stage(stage)
    except ValueError:
        raise BadMagic(f"{path}: unknown stage byte {stage}")
    if utterance_id is None:
        utterance_id = path.stem
    return RepresentationSequence(
        utterance_id=utterance_id, stage=stage_enum, frame_ms=frame_ms, frames=frames
    )


# --- JSON records --------------------------------------------------------

def save_utterance_record(path, record: UtteranceRecord) -> None:
    doc = {
        "utterance_id": record.utterance_id,
        "language": record.language,
        "transcript_words": [
            {"surface": w.surface, "start_ms": w.start_ms, "end_ms": w.end_ms}
            for w in record.words
        ],
        "transcript_phones": [
            {
                "phone": p.phone,
                "start_ms": p.start_ms,
                "end_ms": p.end_ms,
                "parent_word_index": p.parent_word_index,
            }
            for p in record.phones
        ],
        "translations": {
            lang: {"sentence": tr.sentence, "alignment": [list(pair) for pair in tr.alignment]}
            for lang, tr in record.translations.items()
        },
    }
    Path(path).write_text(json.dumps(doc, ensure_ascii=False, indent=2), encoding="utf-8")


def load_utterance_record(path) -> UtteranceRecord:
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"utterance record not found: {path}")
    doc = json.loads(path.read_text(encoding="utf-8"))
    record = UtteranceRecord(
        utterance_id=doc["utterance_id"],
        language=doc["language"],
        words=tuple(
            Word(w["surface"], int(w["start_ms"]), int(w["end_ms"]))
            for w in doc["transcript_words"]
        ),
        phones=tuple(
            Phone(p["phone"], int(p["start_ms"]), int(p["end_ms"]), int(p["parent_word_index"]))
            for p in doc.get("transcript_phones", [])
        ),
        translations={
            lang: Translation(tr["sentence"], tuple((int(a), int(b)) for a, b in tr["alignment"]))
            for lang, tr in doc.get("translations", {}).items()
        },
    )
    return record


def save_manifest(path, manifest: CorpusManifest) -> None:
    base = Path(path).parent
    doc = {
        "corpus_id": manifest.corpus_id,
        "model_id": manifest.model_id,
        "language": manifest.language,
        "embedding_matrix_path": str(_relativize(manifest.embedding_matrix_path, base)),
        "utterances": [
            {
                "record": str(_relativize(e.record_path, base)),
                "sequences": {
                    stage: str(_relativize(p, base)) for stage, p in e.sequence_paths.items()
                },
            }
            for e in manifest.entries
        ],
    }
    Path(path).write_text(json.dumps(doc, ensure_ascii=False, indent=2), encoding="utf-8")


def _relativize(p: Path, base: Path) -> Path:
    try:
        return Path(p).relative_to(base)
    except ValueError:
        return Path(p)


def load_manifest(path) -> CorpusManifest:
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"manifest not found: {path}")
    doc = json.loads(path.read_text(encoding="utf-8"))
    base = path.parent
    entries = tuple(
        ManifestEntry(
            record_path=base / e["record"],
            sequence_paths={stage: base / p for stage, p in e["sequences"].items()},
        )
        for e in doc["utterances"]
    )
    return CorpusManifest(
        corpus_id=doc["corpus_id"],
        model_id=doc["model_id"],
        language=doc["language"],
        embedding_matrix_path=base / doc["embedding_matrix_path"],
        entries=entries,
    )


class Corpus:
    """A loaded manifest with lazily resolved records and sequences.

    Record/sequence invariants are checked on first access of each entry;
    loaded values are immutable and safe to share across threads.
    """

    def __init__(self, manifest: CorpusManifest):
        self.manifest = manifest
        self._matrix: EmbeddingMatrix | None = None

    def __len__(self) -> int:
        return len(self.manifest.entries)

    @property
    def language(self) -> str:
        return self.manifest.language

    def embedding_matrix(self) -> EmbeddingMatrix:
        if self._matrix is None:
            self._matrix = load_embedding_matrix(self.manifest.embedding_matrix_path)
        return self._matrix

    def record(self, index: int) -> UtteranceRecord:
        record = load_utterance_record(self.manifest.entries[index].record_path)
        if record.language != self.manifest.language:
            raise LanguageMismatch(
                f"utterance {record.utterance_id!r} is {record.language!r} in a "
                f"{self.manifest.language!r} corpus"
            )
        record.validate()
        return record

    def sequences(self, index: int) -> dict[str, RepresentationSequence]:
        entry = self.manifest.entries[index]
        record = load_utterance_record(entry.record_path)
        return {
            stage: load_representation_sequence(p, utterance_id=record.utterance_id)
            for stage, p in entry.sequence_paths.items()
        }

    def __iter__(self):
        for i in range(len(self)):
            yield self.record(i), self.sequences(i)


def load_corpus(manifest_path) -> Corpus:
    manifest = load_manifest(manifest_path)
    for entry in manifest.entries:
        if not entry.record_path.exists():
            raise MissingFile(f"utterance record not found: {entry.record_path}")
        for p in entry.sequence_paths.values():
            if not Path(p).exists():
                raise MissingFile(f"sequence file not found: {p}")
    if not Path(manifest.embedding_matrix_path).exists():
        raise MissingFile(f"embedding matrix file not found: {manifest.embedding_matrix_path}")
    return Corpus(manifest)
