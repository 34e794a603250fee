import json
import math

import numpy as np
import pytest

from malens.interchange import (
    CorpusManifest,
    EmbeddingMatrix,
    ManifestEntry,
    Phone,
    RepresentationSequence,
    Stage,
    Translation,
    UtteranceRecord,
    Word,
    save_manifest,
    save_utterance_record,
    write_embedding_matrix,
    write_representation_sequence,
)
from malens.providers import FixtureProvider, FixtureStore, Provider
from malens.verdict import (
    MultilingualEmbeddingSpace,
    Normalization,
    TokenObservation,
    VerdictConfig,
)


class StubProvider(Provider):
    """Dict-backed backend that counts serve() invocations."""

    name = "stub"

    def __init__(self, responses=None):
        # canonical-json -> response
        self.responses = dict(responses or {})
        self.calls = 0

    def add(self, capability, response, **params):
        from malens.providers.base import canonical_json, canonical_request

        self.responses[canonical_json(canonical_request(capability, **params))] = response

    def serve(self, request):
        from malens.providers.base import canonical_json

        self.calls += 1
        key = canonical_json(request)
        if key not in self.responses:
            from malens.errors import ProviderUnavailable

            raise ProviderUnavailable(f"stub has no response for {key}")
        return self.responses[key]


@pytest.fixture
def stub_provider():
    return StubProvider()


def _pair_vector(dim, axis, cosine):
    """Unit vector at `cosine` angle to basis vector `axis`, leaking only
    into axis+1."""
    v = np.zeros(dim)
    v[axis] = cosine
    v[axis + 1] = math.sqrt(1.0 - cosine * cosine)
    return v


def walkthrough_space():
    """9-dim space engineered to reproduce the worked-example cosines:
    il/him 0.68, est/him 0.17, à/in 0.07, osaka/Osaka 0.14, mardi/Tuesday 0.74."""
    dim = 10
    e = np.eye(dim)
    fr = {
        "il": 0.68 * e[0] + math.sqrt(1 - 0.68 ** 2) * e[1],
        "est": 0.17 * e[0] + math.sqrt(1 - 0.17 ** 2) * e[2],
        "à": _pair_vector(dim, 3, 0.07),
        "osaka": _pair_vector(dim, 5, 0.14),
        "mardi": _pair_vector(dim, 7, 0.74),
    }
    en = {"him": e[0], "in": e[3], "Osaka": e[5], "Tuesday": e[7]}
    return MultilingualEmbeddingSpace({"fr": fr, "en": en})


def walkthrough_record():
    words = [
        Word("il", 0, 340), Word("est", 340, 680), Word("mort", 680, 1020),
        Word("à", 1020, 1360), Word("osaka", 1360, 1700), Word("mardi", 1700, 2040),
    ]
    translation = Translation(
        sentence="he him died ∥ cal Sunday",
        alignment=((0, 0), (2, 1), (2, 2), (3, 2), (3, 3), (4, 3), (4, 4), (5, 5)),
    )
    return UtteranceRecord(
        utterance_id="walkthrough", language="fr",
        words=tuple(words), translations={"en": translation},
    )


WALKTHROUGH_TOKENS = {
    0: [TokenObservation("щё", "ru"), TokenObservation("him", "en")],
    1: [TokenObservation("him", "en")],
    2: [TokenObservation("died", "en")],
    3: [TokenObservation("in", "en")],
    4: [TokenObservation("Osaka", "en")],
    5: [TokenObservation("Tuesday", "en")],
}

WALKTHROUGH_EXPECTED = {
    "il": "Semantic", "est": "Unclear", "mort": "Translated",
    "à": "Unclear", "osaka": "Unclear", "mardi": "Semantic",
}

# the golden fixture runs with step 3d disabled (the worked example's
# "osaka" stays unclear only without phonetic matching)
WALKTHROUGH_CONFIG = VerdictConfig(
    normalization=Normalization.EXACT,
    enable_steps=frozenset({"3a", "3b", "3c"}),
)


@pytest.fixture
def walkthrough():
    return walkthrough_record(), WALKTHROUGH_TOKENS, walkthrough_space(), WALKTHROUGH_CONFIG


# --- synthetic end-to-end corpus ----------------------------------------

SYNTH_TOKENS = ["chat", "died", "Tuesday", "vi", "vez", "qqq", "padA", "padB"]
SYNTH_EXPECTED_VERDICTS = {
    "chat": "Transcribed",
    "mort": "Translated",
    "mardi": "Semantic",
    "vivez": "Transliterated",
    "zut": "Unclear",
}
SYNTH_EXPECTED_LANGUAGES = {"en": 5, "und": 1}


def build_synth_corpus(root):
    """Writes a one-utterance corpus engineered so each word's nearest
    tokens force a known verdict. Returns (manifest_path, config_path)."""
    root.mkdir(parents=True, exist_ok=True)
    matrix = EmbeddingMatrix(rows=np.eye(8, dtype=np.float32), tokens=tuple(SYNTH_TOKENS))
    write_embedding_matrix(root / "embeddings.bin", matrix)

    frames = np.eye(8, dtype=np.float32)[[0, 1, 2, 3, 4, 5]]
    seq = RepresentationSequence(utterance_id="utt0", stage=Stage.ADAPTER_OUTPUT,
                                 frame_ms=340, frames=frames)
    write_representation_sequence(root / "utt0.adapter.bin", seq)

    record = UtteranceRecord(
        utterance_id="utt0", language="fr",
        words=(
            Word("chat", 0, 340), Word("mort", 340, 680), Word("mardi", 680, 1020),
            Word("vivez", 1020, 1700), Word("zut", 1700, 2040),
        ),
        phones=(
            Phone("ʃ", 0, 170, 0), Phone("a", 170, 340, 0),
            Phone("m", 340, 510, 1), Phone("ɔ", 510, 680, 1),
        ),
        translations={"en": Translation(
            sentence="cat died tuesday live darn",
            alignment=((0, 0), (1, 1), (2, 2), (3, 3), (4, 4)),
        )},
    )
    save_utterance_record(root / "utt0.json", record)

    manifest = CorpusManifest(
        corpus_id="synth", model_id="toy", language="fr",
        embedding_matrix_path=root / "embeddings.bin",
        entries=(ManifestEntry(
            record_path=root / "utt0.json",
            sequence_paths={"AdapterOutput": root / "utt0.adapter.bin"},
        ),),
    )
    manifest_path = root / "manifest.json"
    save_manifest(manifest_path, manifest)

    fixture_dir = root / "fixtures"
    provider = FixtureProvider(FixtureStore(fixture_dir))
    for token, code in [("chat", "en"), ("died", "en"), ("Tuesday", "en"),
                        ("vi", "en"), ("vez", "en"), ("qqq", "und")]:
        provider.add("langid", code, text=token)

    (root / "en.vec").write_text("1 2\nTuesday 1.0 0.0\n", encoding="utf-8")
    mardi_y = math.sqrt(1 - 0.74 ** 2)
    (root / "fr.vec").write_text(f"1 2\nmardi 0.74 {mardi_y}\n", encoding="utf-8")

    config = {
        "manifest": "manifest.json",
        "provider": {"backend": "fixture", "fixture_dir": "fixtures", "g2p": "table"},
        "muse": {"en": "en.vec", "fr": "fr.vec"},
    }
    config_path = root / "config.json"
    config_path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    return manifest_path, config_path


@pytest.fixture
def synth_corpus(tmp_path):
    return build_synth_corpus(tmp_path / "synth")


def random_matrix(rng, vocab_size, dim):
    rows = rng.standard_normal((vocab_size, dim)).astype(np.float32)
    tokens = tuple(f"tok{i}" for i in range(vocab_size))
    return EmbeddingMatrix(rows=rows, tokens=tokens)
