import importlib.util
import json
from pathlib import Path

import pytest

from maltap.errors import RequestFileError
from maltap.fixtures import freeze_fixtures, load_requests

from conftest import RecordingBackend

# the frozen stores must replay through the analysis toolkit's provider
from malens.providers import FixtureProvider, FixtureStore


def load_analysis_fixture_module():
    """Imports the analysis suite's shared golden fixtures by file path."""
    path = Path(__file__).resolve().parents[2] / "tests" / "conftest.py"
    spec = importlib.util.spec_from_file_location("analysis_fixtures", path)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def write_requests(path, requests):
    path.write_text(json.dumps(requests), encoding="utf-8")
    return path


class TestFreezeFixtures:
    def test_single_langid_entry_replays_offline(self, tmp_path):
        backend = RecordingBackend()
        request = {"capability": "langid", "text": "him"}
        backend.add(request, "en")
        requests_path = write_requests(tmp_path / "r.json", [request])
        store_dir = tmp_path / "store"
        report = freeze_fixtures(requests_path, backend, store_dir)
        assert report.answered == 1 and report.skipped == 0
        provider = FixtureProvider(FixtureStore(store_dir))
        assert provider.identify_language("him") == "en"

    def test_resume_skips_answered_requests(self, tmp_path):
        backend = RecordingBackend()
        requests = [{"capability": "langid", "text": t} for t in ("him", "died")]
        for r in requests:
            backend.add(r, "en")
        requests_path = write_requests(tmp_path / "r.json", requests)
        store_dir = tmp_path / "store"
        freeze_fixtures(requests_path, backend, store_dir)
        assert backend.calls == 2
        report = freeze_fixtures(requests_path, backend, store_dir)
        assert backend.calls == 2
        assert report.answered == 0 and report.skipped == 2

    def test_partial_store_kept_on_backend_failure(self, tmp_path):
        backend = RecordingBackend()
        good = {"capability": "langid", "text": "him"}
        bad = {"capability": "langid", "text": "зло"}
        backend.add(good, "en")          # no response for the second request
        requests_path = write_requests(tmp_path / "r.json", [good, bad])
        store_dir = tmp_path / "store"
        with pytest.raises(RuntimeError):
            freeze_fixtures(requests_path, backend, store_dir)
        # the answered prefix replays; rerunning resumes past it
        assert FixtureProvider(FixtureStore(store_dir)).identify_language("him") == "en"
        backend.add(bad, "ru")
        report = freeze_fixtures(requests_path, backend, store_dir)
        assert report.answered == 1 and report.skipped == 1

    def test_malformed_request_file(self, tmp_path):
        path = tmp_path / "r.json"
        path.write_text('{"capability": "langid"}')   # object, not array
        with pytest.raises(RequestFileError):
            load_requests(path)
        path.write_text('[{"capability": "summarize", "text": "x"}]')
        with pytest.raises(RequestFileError):
            load_requests(path)
        with pytest.raises(RequestFileError):
            load_requests(tmp_path / "absent.json")


def test_criterion_12_walkthrough_freeze_enables_offline_golden_run(tmp_path):
    """Secondary acceptance: freezing the walkthrough's provider requests
    lets the token-verdict golden fixture run with no live backend."""
    fixtures = load_analysis_fixture_module()
    record = fixtures.walkthrough_record()
    token_texts = sorted({obs.text for toks in fixtures.WALKTHROUGH_TOKENS.values()
                          for obs in toks})
    token_languages = {obs.text: obs.language
                       for toks in fixtures.WALKTHROUGH_TOKENS.values()
                       for obs in toks}

    requests = [{"capability": "langid", "text": t} for t in token_texts]
    requests.append({"capability": "translate", "source": "fr", "target": "en",
                     "text": " ".join(w.surface for w in record.words)})
    backend = RecordingBackend()
    for request in requests[:-1]:
        backend.add(request, token_languages[request["text"]])
    backend.add(requests[-1], record.translations["en"].sentence)
    requests_path = write_requests(tmp_path / "requests.json", requests)

    store_dir = tmp_path / "store"
    report = freeze_fixtures(requests_path, backend, store_dir)
    assert report.answered == len(requests)

    # offline replay: languages come from the store, never the backend
    provider = FixtureProvider(FixtureStore(store_dir))
    backend.calls = 0
    from malens.verdict import TokenObservation, classify_word

    verdicts = {}
    for i in range(len(record.words)):
        observations = [
            TokenObservation(obs.text, provider.identify_language(obs.text))
            for obs in fixtures.WALKTHROUGH_TOKENS.get(i, [])
        ]
        v = classify_word(i, record, observations, fixtures.WALKTHROUGH_CONFIG,
                          fixtures.walkthrough_space(), None, ["en", "ru"])
        verdicts[v.surface] = v.verdict.value
    assert verdicts == fixtures.WALKTHROUGH_EXPECTED
    assert backend.calls == 0
    assert provider.translate(" ".join(w.surface for w in record.words),
                              "fr", "en") == record.translations["en"].sentence
    print("criterion 12 PASS: walkthrough fixtures frozen and replayed offline")
