"""Mean-centred cosine nearest-token search over the LM embedding matrix.

Every representation vector is mapped to the vocabulary row maximizing
cosine(q - m, E_i - m), where m is the mean embedding. Accumulation runs
in float64; storage stays float32. Ties break to the lowest row index and
rows whose centred form is the zero vector are skipped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AllRowsDegenerate, DimMismatch, ZeroQuery
from .interchange import EmbeddingMatrix, RepresentationSequence

NO_NEIGHBOR_INDEX = -1


@dataclass(frozen=True)
class NeighborAssignment:
    frame_index: int
    token_index: int
    token: str
    similarity: float
    language: str | None = None

    @property
    def is_no_neighbor(self) -> bool:
        return self.token_index == NO_NEIGHBOR_INDEX

    @classmethod
    def no_neighbor(cls, frame_index: int) -> "NeighborAssignment":
        return cls(frame_index=frame_index, token_index=NO_NEIGHBOR_INDEX,
                   token="", similarity=0.0)

    def with_language(self, language: str | None) -> "NeighborAssignment":
        return NeighborAssignment(self.frame_index, self.token_index, self.token,
                                  self.similarity, language)


def embedding_mean(matrix: EmbeddingMatrix) -> np.ndarray:
    """Componentwise mean of all rows, accumulated in float64."""
    return matrix.rows.astype(np.float64).mean(axis=0)


class _CenteredIndex:
    """Precomputed centred rows and norms, shared across all frames."""

    def __init__(self, matrix: EmbeddingMatrix, mean: np.ndarray):
        if mean.shape != (matrix.dim,):
            raise DimMismatch(f"mean has shape {mean.shape}, matrix dim is {matrix.dim}")
        self.matrix = matrix
        self.mean = mean.astype(np.float64)
        self.centered = matrix.rows.astype(np.float64) - self.mean
        self.norms = np.linalg.norm(self.centered, axis=1)
        self.degenerate = self.norms == 0.0
        if self.degenerate.all():
            raise AllRowsDegenerate("every centred embedding row is the zero vector")
        # avoid divide-by-zero; degenerate rows are masked out of the argmax
        self.safe_norms = np.where(self.degenerate, 1.0, self.norms)

    def best(self, q: np.ndarray, frame_index: int = 0) -> NeighborAssignment:
        cq = q.astype(np.float64) - self.mean
        qnorm = np.linalg.norm(cq)
        if qnorm == 0.0:
            raise ZeroQuery(f"frame {frame_index}: query equals the embedding mean")
        sims = (self.centered @ cq) / (self.safe_norms * qnorm)
        sims[self.degenerate] = -np.inf
        idx = int(np.argmax(sims))
        return NeighborAssignment(
            frame_index=frame_index,
            token_index=idx,
            token=self.matrix.tokens[idx],
            similarity=float(sims[idx]),
        )


def nearest_token(q: np.ndarray, matrix: EmbeddingMatrix,
                  mean: np.ndarray | None = None) -> NeighborAssignment:
    q = np.asarray(q)
    if q.shape != (matrix.dim,):
        raise DimMismatch(f"query has shape {q.shape}, matrix dim is {matrix.dim}")
    if mean is None:
        mean = embedding_mean(matrix)
    return _CenteredIndex(matrix, mean).best(q)


def assign_neighbors(seq: RepresentationSequence,
                     matrix: EmbeddingMatrix) -> list[NeighborAssignment]:
    """One assignment per frame; a zero-query frame yields a no-neighbor sentinel."""
    if seq.dim != matrix.dim:
        raise DimMismatch(f"sequence dim {seq.dim} != matrix dim {matrix.dim}")
    index = _CenteredIndex(matrix, embedding_mean(matrix))
    out = []
    for i in range(seq.num_frames):
        try:
            out.append(index.best(seq.frames[i], frame_index=i))
        except ZeroQuery:
            out.append(NeighborAssignment.no_neighbor(i))
    return out


def save_assignments(path, utterance_id: str,
                     assignments: list[NeighborAssignment]) -> None:
    """One JSON record per frame, in frame order."""
    with open(path, "w", encoding="utf-8") as f:
        for a in assignments:
            f.write(json.dumps({
                "utterance_id": utterance_id,
                "frame_index": a.frame_index,
                "token_index": a.token_index,
                "token": a.token,
                "similarity": a.similarity,
                "language": a.language,
            }, ensure_ascii=False) + "\n")


def load_assignments(path) -> tuple[str, list[NeighborAssignment]]:
    utterance_id = ""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        utterance_id = doc["utterance_id"]
        out.append(NeighborAssignment(
            frame_index=doc["frame_index"],
            token_index=doc["token_index"],
            token=doc["token"],
            similarity=doc["similarity"],
            language=doc.get("language"),
        ))
    return utterance_id, out
