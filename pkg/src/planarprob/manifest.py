"""Run manifests: enough provenance to regenerate any output."""

from __future__ import annotations

import hashlib
import json
import platform
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path


def config_hash(config) -> str:
    """SHA-256 of the canonical JSON form; insensitive to key order."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def _versions() -> dict[str, str]:
    out = {"python": platform.python_version()}
    for pkg in ("numpy", "artifact"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            pass
    return out


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


@dataclass
class RunManifest:
    command: list[str]
    config: dict
    config_hash: str
    seed: int | None = None
    versions: dict = field(default_factory=_versions)
    started: str = field(default_factory=_now)
    finished: str | None = None
    outputs: list[str] = field(default_factory=list)

    @classmethod
    def start(cls, config: dict, seed: int | None = None, argv: list[str] | None = None) -> "RunManifest":
        argv = list(sys.argv if argv is None else argv)
        return cls(argv, config, config_hash(config), seed)

    def finish(self, *outputs: str | Path) -> "RunManifest":
        self.finished = _now()
        self.outputs.extend(str(p) for p in outputs)
        return self

    def to_json(self) -> dict:
        return asdict(self)

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_json(), indent=2, sort_keys=True, default=str))
        return path


def manifest_path(output: str | Path) -> Path:
    return Path(f"{output}.manifest.json")
