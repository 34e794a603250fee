"""Alignment of fixed-rate representation frames to word/phone spans, and
mean-pooling of frames over spans.

Frame i covers [i*frame_ms, (i+1)*frame_ms) from utterance start. A frame
belongs to a span when its overlap exceeds min_overlap_ms; with the
default of 0 a boundary-straddling frame is assigned to both words.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyPool, IndexOutOfRange, InvertedSpan, UtteranceMismatch
from .interchange import RepresentationSequence, UtteranceRecord


@dataclass(frozen=True)
class SpanAssignment:
    word_index: int
    frame_indices: tuple[int, ...]


def frames_for_span(start_ms: int, end_ms: int, frame_ms: int, num_frames: int,
                    min_overlap_ms: int = 0) -> list[int]:
    """Frames whose span overlaps [start_ms, end_ms) by more than min_overlap_ms."""
    if end_ms <= start_ms:
        raise InvertedSpan(f"span [{start_ms}, {end_ms}) is inverted or empty")
    first = max(0, start_ms // frame_ms)
    last = min(num_frames, -(-end_ms // frame_ms))  # ceil division
    out = []
    for i in range(first, last):
        overlap = min(end_ms, (i + 1) * frame_ms) - max(start_ms, i * frame_ms)
        if overlap > min_overlap_ms:
            out.append(i)
    return out


def assign_words(record: UtteranceRecord, seq: RepresentationSequence,
                 min_overlap_ms: int = 0) -> list[SpanAssignment]:
    if record.utterance_id != seq.utterance_id:
        raise UtteranceMismatch(
            f"record {record.utterance_id!r} paired with sequence {seq.utterance_id!r}"
        )
    return [
        SpanAssignment(
            word_index=i,
            frame_indices=tuple(frames_for_span(
                w.start_ms, w.end_ms, seq.frame_ms, seq.num_frames, min_overlap_ms
            )),
        )
        for i, w in enumerate(record.words)
    ]


def assign_phones(record: UtteranceRecord, seq: RepresentationSequence,
                  min_overlap_ms: int = 0) -> list[SpanAssignment]:
    """Same interval engine as assign_words, run over phone spans.

    SpanAssignment.word_index holds the phone index here.
    """
    if record.utterance_id != seq.utterance_id:
        raise UtteranceMismatch(
            f"record {record.utterance_id!r} paired with sequence {seq.utterance_id!r}"
        )
    return [
        SpanAssignment(
            word_index=i,
            frame_indices=tuple(frames_for_span(
                p.start_ms, p.end_ms, seq.frame_ms, seq.num_frames, min_overlap_ms
            )),
        )
        for i, p in enumerate(record.phones)
    ]


def pool_span(seq: RepresentationSequence, frame_indices) -> np.ndarray:
    """Componentwise float64 mean of the selected frames."""
    frame_indices = list(frame_indices)
    if not frame_indices:
        raise EmptyPool("cannot pool an empty frame set")
    for i in frame_indices:
        if not 0 <= i < seq.num_frames:
            raise IndexOutOfRange(f"frame index {i} outside 0..{seq.num_frames - 1}")
    return seq.frames[frame_indices].astype(np.float64).mean(axis=0)
