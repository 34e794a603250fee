"""Command bridge backend: drives an external tool (aligner, G2P) living in
the model-hosting ecosystem over a line protocol.

The configured executable reads one canonical-request JSON line on stdin
and must answer with one JSON line: {"response": <value>} or
{"error": "message"}.
"""

from __future__ import annotations

import json
import subprocess
import threading

from ..errors import ProviderUnavailable
from .base import Provider, canonical_json


class CommandBridgeProvider(Provider):
    name = "bridge"

    def __init__(self, argv: list[str]):
        self.argv = list(argv)
        self._proc: subprocess.Popen | None = None
        self._lock = threading.Lock()

    def _ensure_process(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.argv,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    bufsize=1,
                )
            except OSError as exc:
                raise ProviderUnavailable(f"cannot start bridge {self.argv}: {exc}")
        return self._proc

    def serve(self, request: dict):
        with self._lock:
            proc = self._ensure_process()
            try:
                proc.stdin.write(canonical_json(request) + "\n")
                proc.stdin.flush()
                line = proc.stdout.readline()
            except (BrokenPipeError, OSError) as exc:
                raise ProviderUnavailable(f"bridge {self.argv} died: {exc}")
        if not line:
            raise ProviderUnavailable(f"bridge {self.argv} closed its output")
        try:
            body = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProviderUnavailable(f"bridge produced invalid JSON: {exc}")
        if "error" in body:
            raise ProviderUnavailable(f"bridge error: {body['error']}")
        return body["response"]

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=10)
