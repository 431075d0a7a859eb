"""Service configuration: one JSON file plus environment-variable credentials."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .encoding import EncodingStrategy, PatchPolicy, PatchVariant
from .geometry import DEFAULT_FOVEAL_ANGLE_DEG
from .providers import (
    MockProviders,
    ProviderConfig,
    Providers,
    RemoteProviders,
    config_from_env,
)


@dataclass(frozen=True)
class EncodeDefaults:
    strategy: EncodingStrategy = EncodingStrategy.CONTEXTUAL
    gamma: int = 9
    policy: PatchPolicy = PatchPolicy(
        variant=PatchVariant.TEXT_ONLY, include_background=True
    )


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    archive_root: Path = Path("archive")
    cors_origins: tuple[str, ...] = ()
    fov_h: float = 85.0
    fov_v: float = 68.0
    foveal_angle: float = DEFAULT_FOVEAL_ANGLE_DEG
    encode: EncodeDefaults = field(default_factory=EncodeDefaults)
    provider_mode: str = "mock"  # "mock" | "remote" | "env"
    provider: ProviderConfig | None = None
    mock_fixtures: Path | None = None
    ui_dist: Path | None = None

    def build_providers(self) -> Providers:
        if self.provider_mode == "remote":
            if self.provider is None:
                raise ValueError("provider_mode=remote requires a provider block")
            return RemoteProviders(self.provider)
        if self.provider_mode == "env":
            cfg = config_from_env()
            if cfg is None:
                raise ValueError(
                    "provider_mode=env but GAZEMEM_ENDPOINT is not set"
                )
            return RemoteProviders(cfg)
        if self.mock_fixtures is not None:
            return MockProviders.from_fixture_file(self.mock_fixtures)
        return MockProviders()


def load_config(path: str | Path) -> ServiceConfig:
    """Read the JSON config file; unknown keys are rejected."""
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    known = {
        "host",
        "port",
        "archive_root",
        "cors_origins",
        "fov_h",
        "fov_v",
        "foveal_angle",
        "encode",
        "provider_mode",
        "provider",
        "mock_fixtures",
        "ui_dist",
    }
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"{path}: unknown config keys: {sorted(unknown)}")

    encode = EncodeDefaults()
    if "encode" in data:
        block = data["encode"]
        encode = EncodeDefaults(
            strategy=EncodingStrategy.from_name(block.get("strategy", "contextual")),
            gamma=int(block.get("gamma", 9)),
            policy=PatchPolicy(
                variant=PatchVariant.from_name(block.get("patch_variant", "text_only")),
                include_background=bool(block.get("include_background", True)),
            ),
        )

    provider = None
    if "provider" in data and data["provider"] is not None:
        block = data["provider"]
        provider = ProviderConfig(
            endpoint=block["endpoint"],
            model=block["model"],
            embed_model=block.get("embed_model", ""),
            timeout_s=float(block.get("timeout_s", 60.0)),
            max_retries=int(block.get("max_retries", 2)),
            max_parallel=int(block.get("max_parallel", 4)),
        )

    def _resolve(p: str | None) -> Path | None:
        return (path.parent / p).resolve() if p else None

    return ServiceConfig(
        host=data.get("host", "127.0.0.1"),
        port=int(data.get("port", 8000)),
        archive_root=(path.parent / data.get("archive_root", "archive")).resolve(),
        cors_origins=tuple(data.get("cors_origins", ())),
        fov_h=float(data.get("fov_h", 85.0)),
        fov_v=float(data.get("fov_v", 68.0)),
        foveal_angle=float(data.get("foveal_angle", DEFAULT_FOVEAL_ANGLE_DEG)),
        encode=encode,
        provider_mode=data.get("provider_mode", "mock"),
        provider=provider,
        mock_fixtures=_resolve(data.get("mock_fixtures")),
        ui_dist=_resolve(data.get("ui_dist")),
    )
