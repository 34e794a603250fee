"""Freezes live provider responses into the fixture-store file format so
analysis runs replay them offline.

The request file is a JSON array of canonical requests, e.g.
[{"capability": "langid", "text": "him"}, ...]. Requests already answered
by a valid store entry are skipped, so an interrupted freeze resumes
without repeating backend calls.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

from . import formats
from .errors import RequestFileError

VALID_CAPABILITIES = ("langid", "translate", "align", "phonetize")


@dataclass(frozen=True)
class FreezeReport:
    answered: int
    skipped: int
    store_dir: Path


def load_requests(path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise RequestFileError(f"request file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise RequestFileError(f"{path}: invalid JSON ({exc})")
    if not isinstance(doc, list):
        raise RequestFileError(f"{path}: expected a JSON array of requests")
    for i, request in enumerate(doc):
        if not isinstance(request, dict) or "capability" not in request:
            raise RequestFileError(f"{path}: entry {i} has no 'capability'")
        if request["capability"] not in VALID_CAPABILITIES:
            raise RequestFileError(
                f"{path}: entry {i} capability {request['capability']!r} "
                f"not in {VALID_CAPABILITIES}"
            )
    return doc


def freeze_fixtures(requests_path, backend, store_dir,
                    provider_name: str | None = None) -> FreezeReport:
    """backend: any object with serve(request) -> JSON-compatible response.

    A backend failure propagates after the store is left in a valid
    partial state; rerunning resumes from the first unanswered request.
    """
    requests = load_requests(requests_path)
    store_dir = Path(store_dir)
    name = provider_name or getattr(backend, "name", type(backend).__name__)
    answered = skipped = 0
    for request in requests:
        if formats.has_valid_fixture(store_dir, request):
            skipped += 1
            continue
        response = backend.serve(request)
        formats.write_fixture(
            store_dir, request, response, name,
            created_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        )
        answered += 1
    return FreezeReport(answered=answered, skipped=skipped, store_dir=store_dir)
