"""Table-driven grapheme-to-phoneme backend.

Ships small per-language grapheme -> phone tables as package data and
applies greedy longest-match scanning over the casefolded input. This
keeps the pipeline self-contained and deterministic; the command bridge
can swap in a full G2P tool when fidelity matters. Characters with no
table entry (punctuation, digits, foreign script) produce no phones, so a
marker-only token phonetizes to [].
"""

from __future__ import annotations

import json
from importlib import resources

from ..errors import UnsupportedLanguage
from .base import Provider, strip_token_markers


def load_bundled_tables() -> dict[str, dict[str, list[str]]]:
    tables = {}
    root = resources.files("malens").joinpath("data/g2p")
    for entry in root.iterdir():
        if entry.name.endswith(".json"):
            lang = entry.name[:-5]
            tables[lang] = json.loads(entry.read_text(encoding="utf-8"))
    return tables


class TableG2P(Provider):
    name = "table-g2p"

    def __init__(self, tables: dict[str, dict[str, list[str]]] | None = None):
        self.tables = tables if tables is not None else load_bundled_tables()
        self._max_key = {
            lang: max((len(k) for k in table), default=1)
            for lang, table in self.tables.items()
        }

    @property
    def supported_languages(self) -> set[str]:
        return set(self.tables)

    def serve(self, request: dict):
        if request["capability"] != "phonetize":
            raise NotImplementedError("TableG2P only serves phonetize requests")
        return self._phonetize(request["text"], request["language"])

    def _phonetize(self, text: str, language: str) -> list[str]:
        table = self.tables.get(language)
        if table is None:
            raise UnsupportedLanguage(f"no G2P table for language {language!r}")
        text = strip_token_markers(text).casefold()
        phones: list[str] = []
        i = 0
        max_key = self._max_key[language]
        while i < len(text):
            for width in range(min(max_key, len(text) - i), 0, -1):
                chunk = text[i:i + width]
                if chunk in table:
                    phones.extend(table[chunk])
                    i += width
                    break
            else:
                i += 1  # unmapped character contributes nothing
        return phones
