"""key=value configuration file support."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import CouncilKitError


@dataclass
class Config:
    instance_slug: Optional[str] = None
    store_root: str = "./store"
    cache_root: str = "./cache"
    port: int = 8777
    recency_tau: Optional[float] = None
    transcriber_cmd: Optional[str] = None
    fetch_video: bool = False


_BOOL = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def load_config(path: str | Path) -> Config:
    """Parse a key=value file; blank lines and '#' comments are skipped."""
    config = Config()
    for line_no, raw in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CouncilKitError(f"{path}:{line_no}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "instance_slug":
            config.instance_slug = value
        elif key == "store_root":
            config.store_root = value
        elif key == "cache_root":
            config.cache_root = value
        elif key == "port":
            config.port = int(value)
        elif key == "recency_tau":
            config.recency_tau = float(value)
        elif key == "transcriber_cmd":
            config.transcriber_cmd = value
        elif key == "fetch_video":
            if value.lower() not in _BOOL:
                raise CouncilKitError(f"{path}:{line_no}: fetch_video must be boolean")
            config.fetch_video = _BOOL[value.lower()]
        else:
            raise CouncilKitError(f"{path}:{line_no}: unknown key {key!r}")
    return config
