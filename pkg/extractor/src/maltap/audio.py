"""PCM WAV decoding and a deterministic frame featurizer.

The featurizer stands in for a model forward pass: it windows the signal
at the tap's frame rate and projects per-window statistics through a
fixed seeded matrix, so dumps are reproducible and satisfy the frame
count contract without hosting a speech model.
"""

from __future__ import annotations

import wave
from pathlib import Path

import numpy as np

from .errors import AudioDecodeError

_STATS = 4
_PROJECTION_SEED = 0


def decode_wav(path) -> tuple[np.ndarray, int]:
    """Returns (mono float64 samples in [-1, 1], sample_rate)."""
    path = Path(path)
    try:
        with wave.open(str(path), "rb") as f:
            sample_rate = f.getframerate()
            n_channels = f.getnchannels()
            width = f.getsampwidth()
            raw = f.readframes(f.getnframes())
    except (wave.Error, EOFError, OSError) as exc:
        raise AudioDecodeError(f"cannot decode audio file {path}: {exc}")
    if width != 2:
        raise AudioDecodeError(f"cannot decode audio file {path}: "
                               f"only 16-bit PCM supported, got {8 * width}-bit")
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    if n_channels > 1:
        samples = samples.reshape(-1, n_channels).mean(axis=1)
    return samples, sample_rate


def featurize(samples: np.ndarray, sample_rate: int, frame_ms: int,
              dim: int) -> np.ndarray:
    """One feature row per full frame_ms window; float32 output."""
    frame_len = (sample_rate * frame_ms) // 1000
    if frame_len <= 0:
        raise ValueError(f"frame_ms {frame_ms} too small for rate {sample_rate}")
    num_frames = len(samples) // frame_len
    stats = np.zeros((num_frames, _STATS))
    for i in range(num_frames):
        window = samples[i * frame_len:(i + 1) * frame_len]
        crossings = np.count_nonzero(np.diff(np.signbit(window)))
        stats[i] = (
            float(np.abs(window).mean()),
            float(np.sqrt((window ** 2).mean())),
            crossings / frame_len,
            float(window.max(initial=0.0)),
        )
    projection = np.random.default_rng(_PROJECTION_SEED).standard_normal((_STATS, dim))
    return (stats @ projection).astype(np.float32)
