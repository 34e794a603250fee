import json
import wave

import numpy as np
import pytest


def write_wav(path, duration_ms, sample_rate=16000, freq=220.0):
    """Mono 16-bit PCM sine tone."""
    n = int(sample_rate * duration_ms / 1000)
    t = np.arange(n) / sample_rate
    samples = (0.4 * np.sin(2 * np.pi * freq * t) * 32767).astype("<i2")
    with wave.open(str(path), "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(sample_rate)
        f.writeframes(samples.tobytes())
    return path


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    """A local transformers-format checkpoint: 12-token vocab, 8-dim embeddings."""
    from tokenizers import Tokenizer
    from tokenizers.models import WordLevel
    from transformers import GPT2Config, GPT2Model, PreTrainedTokenizerFast

    root = tmp_path_factory.mktemp("ckpt")
    vocab = {f"tok{i}": i for i in range(12)}
    tokenizer = Tokenizer(WordLevel(vocab, unk_token="tok0"))
    fast = PreTrainedTokenizerFast(tokenizer_object=tokenizer, unk_token="tok0")
    fast.save_pretrained(root)
    config = GPT2Config(vocab_size=12, n_positions=16, n_embd=8,
                        n_layer=1, n_head=2)
    import torch

    torch.manual_seed(0)
    GPT2Model(config).save_pretrained(root)
    (root / "expected_shape.json").write_text(json.dumps([12, 8]))
    return root


class RecordingBackend:
    """Serves canned responses and counts calls, standing in for live tools."""

    name = "recording"

    def __init__(self):
        self.responses = {}
        self.calls = 0

    def add(self, request, response):
        from maltap.formats import canonical_json

        self.responses[canonical_json(request)] = response

    def serve(self, request):
        from maltap.formats import canonical_json

        self.calls += 1
        key = canonical_json(request)
        if key not in self.responses:
            raise RuntimeError(f"no canned response for {key}")
        return self.responses[key]
