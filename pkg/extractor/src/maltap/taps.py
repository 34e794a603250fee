"""Tap specification: which tensor to pull from which model family."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import TapUnsupported

TAP_LM_EMBEDDINGS = "LMEmbeddings"
TAP_ENCODER_OUTPUT = "EncoderOutput"
TAP_ADAPTER_OUTPUT = "AdapterOutput"
TAPS = (TAP_LM_EMBEDDINGS, TAP_ENCODER_OUTPUT, TAP_ADAPTER_OUTPUT)

# adapter output rates in ms per frame; the toy family exists so the
# pipeline can be exercised without hosting a speech model
FAMILY_FRAME_MS = {
    "qformer-window": 340,
    "qwen2-audio": 40,
    "phi4-mm": 80,
    "toy": 340,
}


def parse_tap(name: str) -> str:
    if name not in TAPS:
        raise TapUnsupported(f"unknown tap {name!r}, expected one of {TAPS}")
    return name


@dataclass(frozen=True)
class TapSpec:
    model_id: str
    family: str
    tap: str
    checkpoint_dir: Path | None = None
    corpus_dir: Path | None = None
    output_dir: Path = Path(".")
    frame_ms: int | None = None        # overrides the family default
    feature_dim: int = 16              # toy encoder output width

    def __post_init__(self):
        parse_tap(self.tap)
        if self.family not in FAMILY_FRAME_MS:
            raise TapUnsupported(
                f"unknown model family {self.family!r}, "
                f"expected one of {sorted(FAMILY_FRAME_MS)}"
            )

    @property
    def effective_frame_ms(self) -> int:
        return self.frame_ms if self.frame_ms is not None else FAMILY_FRAME_MS[self.family]
