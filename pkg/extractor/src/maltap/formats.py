"""Writers for the malens interchange file formats.

The analysis toolkit and this extractor share no code, only these byte
layouts, so the writers here are kept deliberately self-contained:

  matrix file:   b"MALENS01" | kind=1 | u64 vocab | u64 dim | row-major <f4
  sequence file: b"MALENS01" | kind=2 | u64 frames | u64 dim | u32 frame_ms
                 | u8 stage (1=EncoderOutput, 2=AdapterOutput) | row-major <f4
  vocab sidecar: <matrix>.vocab.json, a JSON array of token strings
  fixture store: one <sha256(request)>.json per canonicalized request

File writes go through a temp file and os.replace so a crash never leaves
a half-written artifact.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
from pathlib import Path

import numpy as np

MAGIC = b"MALENS01"
KIND_MATRIX = 1
KIND_SEQUENCE = 2
STAGE_BYTES = {"EncoderOutput": 1, "AdapterOutput": 2}

_MATRIX_HEADER = struct.Struct("<QQ")
_SEQUENCE_HEADER = struct.Struct("<QQIB")


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def write_matrix_file(path, rows: np.ndarray, tokens: list[str]) -> None:
    path = Path(path)
    rows = np.ascontiguousarray(rows, dtype="<f4")
    if rows.ndim != 2:
        raise ValueError(f"embedding matrix must be 2-D, got shape {rows.shape}")
    if rows.shape[0] != len(tokens):
        raise ValueError(f"{rows.shape[0]} rows but {len(tokens)} vocabulary tokens")
    blob = (MAGIC + bytes([KIND_MATRIX])
            + _MATRIX_HEADER.pack(rows.shape[0], rows.shape[1]) + rows.tobytes())
    _atomic_write(path, blob)
    sidecar = path.with_name(path.name + ".vocab.json")
    _atomic_write(sidecar, json.dumps(list(tokens), ensure_ascii=False).encode("utf-8"))


def write_sequence_file(path, frames: np.ndarray, frame_ms: int, stage: str) -> None:
    path = Path(path)
    if stage not in STAGE_BYTES:
        raise ValueError(f"unknown stage {stage!r}, expected one of {sorted(STAGE_BYTES)}")
    if frame_ms <= 0:
        raise ValueError(f"frame_ms must be positive, got {frame_ms}")
    frames = np.ascontiguousarray(frames, dtype="<f4")
    if frames.ndim != 2:
        raise ValueError(f"sequence must be 2-D, got shape {frames.shape}")
    blob = (MAGIC + bytes([KIND_SEQUENCE])
            + _SEQUENCE_HEADER.pack(frames.shape[0], frames.shape[1], frame_ms,
                                    STAGE_BYTES[stage])
            + frames.tobytes())
    _atomic_write(path, blob)


# --- provider fixture store ----------------------------------------------

def canonical_json(request: dict) -> str:
    return json.dumps(request, sort_keys=True, ensure_ascii=False,
                      separators=(",", ":"))


def request_digest(request: dict) -> str:
    return hashlib.sha256(canonical_json(request).encode("utf-8")).hexdigest()


def response_checksum(response) -> str:
    blob = json.dumps(response, sort_keys=True, ensure_ascii=False).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def fixture_path(store_dir, request: dict) -> Path:
    return Path(store_dir) / f"{request_digest(request)}.json"


def has_valid_fixture(store_dir, request: dict) -> bool:
    path = fixture_path(store_dir, request)
    if not path.exists():
        return False
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
        return record.get("checksum") == response_checksum(record["response"])
    except (ValueError, KeyError):
        return False


def write_fixture(store_dir, request: dict, response, provider_name: str,
                  created_at: str) -> Path:
    store_dir = Path(store_dir)
    store_dir.mkdir(parents=True, exist_ok=True)
    record = {
        "request": request,
        "response": response,
        "provider": provider_name,
        "created_at": created_at,
        "checksum": response_checksum(response),
    }
    path = fixture_path(store_dir, request)
    _atomic_write(path, json.dumps(record, ensure_ascii=False, indent=2).encode("utf-8"))
    return path
