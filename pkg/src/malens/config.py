"""Run configuration: a validated JSON file that wires corpora, providers,
and analysis parameters for the CLI. Unknown keys are rejected so typos
fail fast instead of silently using defaults."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .providers import (
    CachedProvider,
    CommandBridgeProvider,
    CompositeProvider,
    FixtureProvider,
    FixtureStore,
    Provider,
    RemoteConfig,
    RemoteProvider,
    TableG2P,
)
from .verdict import ALL_STEPS, Normalization, VerdictConfig

_TOP_LEVEL_KEYS = {
    "manifest", "output_dir", "seed", "stage", "min_overlap_ms",
    "provider", "verdict", "probe", "wer", "muse", "hypotheses",
    "sts_pairs", "simlex",
}
_PROVIDER_KEYS = {"backend", "fixture_dir", "cache_dir", "bridge_argv",
                  "remote_urls", "g2p", "max_inflight"}
_VERDICT_KEYS = {"semantic_threshold", "phone_match_ratio", "phone_ratio_strict",
                 "normalization", "enable_steps", "top_k_languages"}
_PROBE_KEYS = {"level", "epochs", "learning_rate", "l2", "batch_size",
               "min_label_count", "train_fraction"}
_WER_KEYS = {"scheme", "scheme_by_language"}


@dataclass
class ProviderSettings:
    backend: str = "fixture"            # fixture | remote | bridge
    fixture_dir: str | None = None
    cache_dir: str | None = None
    bridge_argv: list[str] = field(default_factory=list)
    remote_urls: dict[str, str] = field(default_factory=dict)
    g2p: str = "table"                  # table | backend
    max_inflight: int = 8


@dataclass
class ProbeSettings:
    level: str = "word"
    epochs: int = 100
    learning_rate: float = 0.1
    l2: float = 1e-4
    batch_size: int = 64
    min_label_count: int = 1
    train_fraction: float = 0.8


@dataclass
class WerSettings:
    scheme: str | None = None
    scheme_by_language: dict[str, str] = field(default_factory=dict)


@dataclass
class RunConfig:
    manifest: str | None = None
    output_dir: str = "malens-out"
    seed: int = 0
    stage: str = "AdapterOutput"
    min_overlap_ms: int = 0
    provider: ProviderSettings = field(default_factory=ProviderSettings)
    verdict: VerdictConfig = field(default_factory=VerdictConfig)
    probe: ProbeSettings = field(default_factory=ProbeSettings)
    wer: WerSettings = field(default_factory=WerSettings)
    muse: dict[str, str] = field(default_factory=dict)     # language -> .vec path
    hypotheses: str | None = None
    sts_pairs: str | None = None
    simlex: str | None = None

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})")
        return cls.from_dict(doc, base=path.parent)

    @classmethod
    def from_dict(cls, doc: dict, base: Path | None = None) -> "RunConfig":
        _reject_unknown(doc, _TOP_LEVEL_KEYS, "config")
        cfg = cls()
        base = base or Path(".")

        def resolve(p):
            return str(p) if Path(p).is_absolute() else str(base / p)

        if "manifest" in doc:
            cfg.manifest = resolve(doc["manifest"])
        if "output_dir" in doc:
            cfg.output_dir = resolve(doc["output_dir"])
        cfg.seed = int(doc.get("seed", cfg.seed))
        cfg.stage = doc.get("stage", cfg.stage)
        cfg.min_overlap_ms = int(doc.get("min_overlap_ms", cfg.min_overlap_ms))
        if "hypotheses" in doc:
            cfg.hypotheses = resolve(doc["hypotheses"])
        if "sts_pairs" in doc:
            cfg.sts_pairs = resolve(doc["sts_pairs"])
        if "simlex" in doc:
            cfg.simlex = resolve(doc["simlex"])
        cfg.muse = {lang: resolve(p) for lang, p in doc.get("muse", {}).items()}

        prov = doc.get("provider", {})
        _reject_unknown(prov, _PROVIDER_KEYS, "provider")
        cfg.provider = ProviderSettings(
            backend=prov.get("backend", "fixture"),
            fixture_dir=resolve(prov["fixture_dir"]) if "fixture_dir" in prov else None,
            cache_dir=resolve(prov["cache_dir"]) if "cache_dir" in prov else None,
            bridge_argv=list(prov.get("bridge_argv", [])),
            remote_urls=dict(prov.get("remote_urls", {})),
            g2p=prov.get("g2p", "table"),
            max_inflight=int(prov.get("max_inflight", 8)),
        )

        ver = doc.get("verdict", {})
        _reject_unknown(ver, _VERDICT_KEYS, "verdict")
        cfg.verdict = VerdictConfig(
            semantic_threshold=float(ver.get("semantic_threshold", 0.54)),
            phone_match_ratio=float(ver.get("phone_match_ratio", 0.5)),
            phone_ratio_strict=bool(ver.get("phone_ratio_strict", False)),
            normalization=Normalization(ver.get("normalization", "Exact")),
            enable_steps=frozenset(ver.get("enable_steps", sorted(ALL_STEPS))),
            top_k_languages=int(ver.get("top_k_languages", 3)),
        )

        prb = doc.get("probe", {})
        _reject_unknown(prb, _PROBE_KEYS, "probe")
        cfg.probe = ProbeSettings(
            level=prb.get("level", "word"),
            epochs=int(prb.get("epochs", 100)),
            learning_rate=float(prb.get("learning_rate", 0.1)),
            l2=float(prb.get("l2", 1e-4)),
            batch_size=int(prb.get("batch_size", 64)),
            min_label_count=int(prb.get("min_label_count", 1)),
            train_fraction=float(prb.get("train_fraction", 0.8)),
        )

        werdoc = doc.get("wer", {})
        _reject_unknown(werdoc, _WER_KEYS, "wer")
        cfg.wer = WerSettings(
            scheme=werdoc.get("scheme"),
            scheme_by_language=dict(werdoc.get("scheme_by_language", {})),
        )
        return cfg

    def build_provider(self) -> Provider:
        settings = self.provider
        if settings.backend == "fixture":
            if settings.fixture_dir is None:
                raise ConfigError("provider.fixture_dir is required for the fixture backend")
            backend: Provider = FixtureProvider(FixtureStore(settings.fixture_dir))
        elif settings.backend == "remote":
            backend = RemoteProvider(RemoteConfig.from_env(settings.remote_urls))
        elif settings.backend == "bridge":
            if not settings.bridge_argv:
                raise ConfigError("provider.bridge_argv is required for the bridge backend")
            backend = CommandBridgeProvider(settings.bridge_argv)
        else:
            raise ConfigError(f"unknown provider backend {settings.backend!r}")
        if settings.cache_dir is not None:
            backend = CachedProvider(backend, FixtureStore(settings.cache_dir))
        if settings.g2p == "table":
            return CompositeProvider(phonetize=TableG2P(), default=backend)
        return backend


def _reject_unknown(doc: dict, allowed: set[str], section: str) -> None:
    if not isinstance(doc, dict):
        raise ConfigError(f"{section} section must be an object")
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown {section} keys: {sorted(unknown)}")
