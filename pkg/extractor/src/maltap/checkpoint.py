"""Loads input-embedding weights and vocabulary from a local checkpoint."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import CheckpointUnavailable


def load_embeddings_and_vocab(checkpoint_dir) -> tuple[np.ndarray, list[str]]:
    """Returns (float32 weight matrix, token strings), row i = token id i.

    The checkpoint must be a transformers-format directory readable by
    AutoModel/AutoTokenizer; the row count must equal the tokenizer size.
    """
    checkpoint_dir = Path(checkpoint_dir)
    if not checkpoint_dir.exists():
        raise CheckpointUnavailable(f"checkpoint directory not found: {checkpoint_dir}")
    try:
        import torch
        from transformers import AutoModel, AutoTokenizer
    except ImportError as exc:
        raise CheckpointUnavailable(
            f"model-hosting runtime missing ({exc}); install the 'hf' extra"
        )
    try:
        tokenizer = AutoTokenizer.from_pretrained(checkpoint_dir)
        model = AutoModel.from_pretrained(checkpoint_dir)
    except Exception as exc:
        raise CheckpointUnavailable(f"cannot load checkpoint {checkpoint_dir}: {exc}")
    with torch.no_grad():
        weights = model.get_input_embeddings().weight.to(torch.float32).cpu().numpy().copy()
    vocab_size = weights.shape[0]
    if len(tokenizer) != vocab_size:
        raise CheckpointUnavailable(
            f"embedding rows ({vocab_size}) disagree with tokenizer size "
            f"({len(tokenizer)}) in {checkpoint_dir}"
        )
    tokens = tokenizer.convert_ids_to_tokens(list(range(vocab_size)))
    return weights, [t if t is not None else f"<unused_{i}>"
                     for i, t in enumerate(tokens)]
