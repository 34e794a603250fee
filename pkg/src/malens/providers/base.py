"""Provider protocol and request canonicalization.

Four external capabilities feed the pipeline: language identification,
sentence translation, translation word-alignment, and grapheme-to-phoneme
transcription. Every backend answers the same canonicalized requests
through a single serve() hook, so responses frozen from one backend
replay through any other and the persistent cache can wrap any of them.
"""

from __future__ import annotations

import hashlib
import json

from ..errors import EmptyInput

CAPABILITIES = ("langid", "translate", "align", "phonetize")

# tokenizer whitespace markers (SentencePiece / BPE); vocabulary artifacts,
# not language evidence
_MARKERS = {"▁": " ", "Ġ": " ", "Ċ": " "}


def strip_token_markers(token: str) -> str:
    for marker, repl in _MARKERS.items():
        token = token.replace(marker, repl)
    return token.strip()


def canonical_request(capability: str, **params) -> dict:
    if capability not in CAPABILITIES:
        raise ValueError(f"unknown capability {capability!r}")
    request = {"capability": capability}
    request.update({k: v for k, v in sorted(params.items())})
    return request


def canonical_json(request: dict) -> str:
    return json.dumps(request, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def request_digest(request: dict) -> str:
    return hashlib.sha256(canonical_json(request).encode("utf-8")).hexdigest()


class Provider:
    """Base class; backends implement serve(request) -> JSON-compatible value.

    The public methods normalize inputs and enforce preconditions, so all
    backends see one request shape:

      {"capability": "langid", "text": ...}                       -> "en" | "und"
      {"capability": "translate", "text", "source", "target"}     -> "..."
      {"capability": "align", "source_text", "target_text"}       -> [[s, t], ...]
      {"capability": "phonetize", "text", "language"}             -> ["v", "i", ...]
    """

    name = "abstract"

    def identify_language(self, text: str) -> str:
        text = strip_token_markers(text)
        if not text:
            raise EmptyInput("language identification requires non-empty text")
        code = self.serve(canonical_request("langid", text=text))
        return code or "und"

    def translate(self, sentence: str, source: str, target: str) -> str:
        if not sentence.strip():
            raise ValueError("cannot translate an empty sentence")
        if source == target:
            raise ValueError(f"source and target language are both {source!r}")
        return self.serve(canonical_request("translate", text=sentence,
                                            source=source, target=target))

    def align_words(self, source_sentence: str, target_sentence: str) -> list[tuple[int, int]]:
        if not source_sentence.split() or not target_sentence.split():
            raise ValueError("alignment requires two non-empty sentences")
        pairs = self.serve(canonical_request("align", source_text=source_sentence,
                                             target_text=target_sentence))
        return [(int(s), int(t)) for s, t in pairs]

    def phonetize(self, text: str, language: str) -> list[str]:
        text = strip_token_markers(text)
        if not text:
            return []
        phones = self.serve(canonical_request("phonetize", text=text, language=language))
        return list(phones)

    def serve(self, request: dict):
        raise NotImplementedError
