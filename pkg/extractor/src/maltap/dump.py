"""Dump operations: checkpoint embedding matrices and per-utterance
representation sequences, written in the interchange formats."""

from __future__ import annotations

from pathlib import Path

from . import audio, formats
from .checkpoint import load_embeddings_and_vocab
from .errors import TapUnsupported
from .taps import TAP_LM_EMBEDDINGS, TapSpec


def dump_embedding_matrix(spec: TapSpec) -> Path:
    """Writes <output_dir>/embeddings.bin (+ vocab sidecar); returns the path."""
    if spec.tap != TAP_LM_EMBEDDINGS:
        raise TapUnsupported(
            f"embedding dump needs tap {TAP_LM_EMBEDDINGS!r}, got {spec.tap!r}"
        )
    weights, tokens = load_embeddings_and_vocab(spec.checkpoint_dir)
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "embeddings.bin"
    formats.write_matrix_file(path, weights, tokens)
    return path


def dump_sequences(spec: TapSpec, encode=None) -> list[Path]:
    """Writes one sequence file per .wav under corpus_dir; returns the paths.

    `encode(samples, sample_rate, frame_ms, dim) -> frames` plugs in a real
    model forward pass; the default is the deterministic featurizer.
    """
    if spec.tap == TAP_LM_EMBEDDINGS:
        raise TapUnsupported("sequence dump needs EncoderOutput or AdapterOutput")
    if spec.corpus_dir is None:
        raise ValueError("spec.corpus_dir is required for dump_sequences")
    if encode is None:
        encode = audio.featurize
    frame_ms = spec.effective_frame_ms
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for wav_path in sorted(Path(spec.corpus_dir).glob("*.wav")):
        samples, sample_rate = audio.decode_wav(wav_path)
        frames = encode(samples, sample_rate, frame_ms, spec.feature_dim)
        path = out / f"{wav_path.stem}.{spec.tap}.bin"
        formats.write_sequence_file(path, frames, frame_ms, spec.tap)
        written.append(path)
    return written
