"""Remote HTTP backend with bounded retries.

Endpoint URLs and API keys come from config or the environment
(MALENS_LANGID_URL, MALENS_TRANSLATE_URL, MALENS_ALIGN_URL,
MALENS_PHONETIZE_URL and matching *_KEY variables). Requests are POSTed
as JSON in the canonical shape; the response body is expected to be
{"response": <value>}.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

from ..errors import ProviderUnavailable, UnsupportedLanguage, UnsupportedLanguagePair
from .base import Provider

MAX_ATTEMPTS = 3
BACKOFF_INITIAL_S = 1.0

_ENV_URLS = {
    "langid": "MALENS_LANGID_URL",
    "translate": "MALENS_TRANSLATE_URL",
    "align": "MALENS_ALIGN_URL",
    "phonetize": "MALENS_PHONETIZE_URL",
}
_ENV_KEYS = {cap: var.replace("_URL", "_KEY") for cap, var in _ENV_URLS.items()}


@dataclass
class RemoteConfig:
    urls: dict[str, str] = field(default_factory=dict)       # capability -> endpoint
    api_keys: dict[str, str] = field(default_factory=dict)
    timeout_s: float = 30.0

    @classmethod
    def from_env(cls, overrides: dict[str, str] | None = None) -> "RemoteConfig":
        urls = {cap: os.environ[var] for cap, var in _ENV_URLS.items() if var in os.environ}
        keys = {cap: os.environ[var] for cap, var in _ENV_KEYS.items() if var in os.environ}
        if overrides:
            urls.update(overrides)
        return cls(urls=urls, api_keys=keys)


class RemoteProvider(Provider):
    name = "remote"

    def __init__(self, config: RemoteConfig, transport=None, sleep=time.sleep):
        self.config = config
        self._sleep = sleep
        if transport is None:
            import httpx

            transport = httpx.Client(timeout=config.timeout_s)
        # anything with .post(url, json=..., headers=...) -> response
        self._client = transport

    def serve(self, request: dict):
        capability = request["capability"]
        url = self.config.urls.get(capability)
        if url is None:
            raise ProviderUnavailable(f"no endpoint configured for capability {capability!r}")
        headers = {}
        if capability in self.config.api_keys:
            headers["Authorization"] = f"Bearer {self.config.api_keys[capability]}"
        last_error = None
        for attempt in range(MAX_ATTEMPTS):
            if attempt:
                self._sleep(BACKOFF_INITIAL_S * 2 ** (attempt - 1))
            try:
                resp = self._client.post(url, json=request, headers=headers)
            except Exception as exc:  # connection-level failure; retry
                last_error = exc
                continue
            status = getattr(resp, "status_code", 200)
            if status == 422:
                self._raise_unsupported(request)
            if status >= 400:
                last_error = RuntimeError(f"HTTP {status} from {url}")
                continue
            body = resp.json()
            return body["response"]
        raise ProviderUnavailable(
            f"{capability} endpoint {url} failed after {MAX_ATTEMPTS} attempts: {last_error}"
        )

    @staticmethod
    def _raise_unsupported(request: dict):
        if request["capability"] == "translate":
            raise UnsupportedLanguagePair(
                f"{request.get('source')}->{request.get('target')} rejected by remote"
            )
        if request["capability"] == "phonetize":
            raise UnsupportedLanguage(f"{request.get('language')!r} rejected by remote")
        raise ProviderUnavailable(f"remote rejected request: {request}")
