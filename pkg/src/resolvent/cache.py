"""Version-stamped JSON result cache.

Each entry is one file holding {"version", "module", "params", "payload"}.
A file is reused only when its version and parameters both match the
request; unreadable files are logged and recomputed.  A deterministic 5%
of hits are recomputed and compared against the stored payload.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import pathlib
from typing import Any, Callable

from . import __version__

log = logging.getLogger(__name__)

CODE_VERSION = f"resolvent-{__version__}"
AUDIT_RATE = 0.05
ENV_VAR = "RESOLVENT_CACHE_DIR"


class CacheAuditFailure(RuntimeError):
    pass


def default_cache_dir() -> pathlib.Path:
    return pathlib.Path(os.environ.get(ENV_VAR) or "cache")


def _canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class ResultCache:
    """Cache rooted at `root` (default: $RESOLVENT_CACHE_DIR or ./cache)."""

    def __init__(self, root=None, version: str = CODE_VERSION, audit_rate: float = AUDIT_RATE,
                 audit_seed: int = 0, enabled: bool = True):
        self.root = pathlib.Path(root) if root is not None else default_cache_dir()
        self.version = version
        self.audit_rate = audit_rate
        self.audit_seed = audit_seed
        self.enabled = enabled
        self.stats = {"hits": 0, "misses": 0, "corrupt": 0, "audited": 0, "audit_failures": 0}

    def path(self, module: str, name: str) -> pathlib.Path:
        return self.root / module / f"{name}.json"

    def get(self, module: str, name: str, params: dict):
        """Stored payload, or None when absent, stale or unreadable."""
        if not self.enabled:
            return None
        path = self.path(module, name)
        if not path.exists():
            return None
        try:
            entry = json.loads(path.read_text())
            if not isinstance(entry, dict) or "payload" not in entry:
                raise ValueError("missing payload")
        except (OSError, ValueError) as exc:
            self.stats["corrupt"] += 1
            log.warning("ignoring corrupted cache file %s (%s)", path, exc)
            return None
        if entry.get("version") != self.version or _canonical(entry.get("params")) != _canonical(params):
            return None
        return entry["payload"]

    def put(self, module: str, name: str, params: dict, payload) -> None:
        if not self.enabled:
            return
        path = self.path(module, name)
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {"version": self.version, "module": module, "params": params, "payload": payload}
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(entry, sort_keys=True, indent=1))
        tmp.replace(path)

    def should_audit(self, module: str, name: str, params: dict) -> bool:
        h = hashlib.sha256(f"{self.audit_seed}|{module}|{name}|{_canonical(params)}".encode()).digest()
        return int.from_bytes(h[:8], "big") / 2**64 < self.audit_rate

    def fetch(self, module: str, name: str, params: dict, compute: Callable[[], Any]):
        """Cached payload if present (audited on a 5% sample), else compute and store.

        `compute` must return a JSON-serializable payload.
        """
        hit = self.get(module, name, params)
        if hit is not None:
            self.stats["hits"] += 1
            if self.should_audit(module, name, params):
                self.stats["audited"] += 1
                fresh = _roundtrip(compute())
                if _canonical(fresh) != _canonical(hit):
                    self.stats["audit_failures"] += 1
                    log.error("cache audit failed for %s/%s; replacing entry", module, name)
                    self.put(module, name, params, fresh)
                    return fresh
            return hit
        self.stats["misses"] += 1
        fresh = _roundtrip(compute())
        self.put(module, name, params, fresh)
        return fresh


def _roundtrip(payload):
    # what a later cache hit would return, so fresh and cached compare alike
    return json.loads(json.dumps(payload))
