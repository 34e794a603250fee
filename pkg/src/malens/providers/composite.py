"""Routes each capability to its own backend.

Typical wiring: langid/translate/align to a cached remote or fixture
backend, phonetize to the bundled G2P tables.
"""

from __future__ import annotations

from ..errors import ProviderUnavailable
from .base import Provider


class CompositeProvider(Provider):
    name = "composite"

    def __init__(self, langid: Provider | None = None, translate: Provider | None = None,
                 align: Provider | None = None, phonetize: Provider | None = None,
                 default: Provider | None = None):
        self._routes = {
            "langid": langid or default,
            "translate": translate or default,
            "align": align or default,
            "phonetize": phonetize or default,
        }

    def serve(self, request: dict):
        backend = self._routes.get(request["capability"])
        if backend is None:
            raise ProviderUnavailable(
                f"no backend wired for capability {request['capability']!r}"
            )
        return backend.serve(request)
