"""Persistent response store: used both as a write-through cache around a
live backend and as the read-only fixture provider for offline runs.

Layout: one JSON file per request under the store directory, named by the
SHA-256 digest of the canonicalized request. Each record carries the
request, the response, a creation timestamp, and a checksum of the
response; a checksum failure is treated as a miss (recompute, overwrite)
with a warning.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from pathlib import Path

from ..errors import ProviderUnavailable
from .base import Provider, canonical_json, request_digest

log = logging.getLogger(__name__)


def _response_checksum(response) -> str:
    blob = json.dumps(response, sort_keys=True, ensure_ascii=False).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


class FixtureStore:
    """Append-safe directory of (request digest -> response) records."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, digest: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(digest, threading.Lock())

    def _path(self, digest: str) -> Path:
        return self.directory / f"{digest}.json"

    def get(self, request: dict):
        """Returns (found, response); a corrupt record counts as a miss."""
        digest = request_digest(request)
        path = self._path(digest)
        if not path.exists():
            return False, None
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
            response = record["response"]
            if record.get("checksum") != _response_checksum(response):
                raise ValueError("checksum mismatch")
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            log.warning("corrupt cache entry %s (%s); treating as miss", path.name, exc)
            return False, None
        return True, response

    def put(self, request: dict, response, provider_name: str = "unknown") -> None:
        digest = request_digest(request)
        record = {
            "request": request,
            "response": response,
            "provider": provider_name,
            "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "checksum": _response_checksum(response),
        }
        path = self._path(digest)
        with self._lock(digest):
            tmp = path.with_name(path.name + f".tmp{os.getpid()}")
            tmp.write_text(json.dumps(record, ensure_ascii=False, indent=2), encoding="utf-8")
            os.replace(tmp, path)

    def __len__(self) -> int:
        return sum(1 for _ in self.directory.glob("*.json"))


class CachedProvider(Provider):
    """Write-through cache: first call hits the backend and persists, later
    identical calls are served from disk and survive process restarts."""

    def __init__(self, backend: Provider, store: FixtureStore):
        self.backend = backend
        self.store = store
        self.name = f"cached({backend.name})"

    def serve(self, request: dict):
        found, response = self.store.get(request)
        if found:
            return response
        response = self.backend.serve(request)
        self.store.put(request, response, provider_name=self.backend.name)
        return response


class FixtureProvider(Provider):
    """Offline backend answering only from a frozen store; a miss is an error
    naming the uncached request."""

    name = "fixture"

    def __init__(self, store: FixtureStore):
        self.store = store

    def serve(self, request: dict):
        found, response = self.store.get(request)
        if not found:
            raise ProviderUnavailable(
                f"no fixture for request {canonical_json(request)} "
                f"(digest {request_digest(request)}) in {self.store.directory}"
            )
        return response

    def add(self, capability: str, response, **params) -> None:
        """Test/freeze helper: record one canned response."""
        from .base import canonical_request

        self.store.put(canonical_request(capability, **params), response,
                       provider_name=self.name)
