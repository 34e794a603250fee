from .base import (
    CAPABILITIES,
    Provider,
    canonical_request,
    request_digest,
    strip_token_markers,
)
from .cache import CachedProvider, FixtureProvider, FixtureStore
from .composite import CompositeProvider
from .g2p import TableG2P, load_bundled_tables
from .bridge import CommandBridgeProvider
from .remote import RemoteConfig, RemoteProvider

__all__ = [
    "CAPABILITIES",
    "Provider",
    "canonical_request",
    "request_digest",
    "strip_token_markers",
    "CachedProvider",
    "FixtureProvider",
    "FixtureStore",
    "CompositeProvider",
    "TableG2P",
    "load_bundled_tables",
    "CommandBridgeProvider",
    "RemoteConfig",
    "RemoteProvider",
]
