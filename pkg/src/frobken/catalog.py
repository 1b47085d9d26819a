"""Content-addressed, write-once result catalog.

An entry is keyed by the SHA-256 of the canonical request (ring spec,
command, parameters, engine version).  The stored file records the digest of
its result document, which is re-checked on every read.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import CatalogCorrupt
from .serialize import dumps

ENV_VAR = "FROBKEN_CATALOG"


def _sha(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def request_key(spec_doc, command, params, engine_version=__version__):
    request = {"spec": spec_doc, "command": command, "params": params, "engine": engine_version}
    return _sha(dumps(request))


@dataclass(frozen=True)
class CatalogEntry:
    key: str
    result: dict
    engine_version: str
    timestamp: str

    @property
    def result_text(self):
        return dumps(self.result)


class Catalog:
    def __init__(self, root, engine_version=__version__):
        self.root = Path(root)
        self.engine_version = engine_version

    @classmethod
    def from_env(cls, override=None):
        root = override or os.environ.get(ENV_VAR)
        return cls(root) if root else None

    def key(self, spec_doc, command, params):
        return request_key(spec_doc, command, params, self.engine_version)

    def path(self, key):
        return self.root / key[:2] / f"{key}.json"

    def lookup(self, key):
        path = self.path(key)
        if not path.exists():
            return None
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            result = doc["result"]
            digest = doc["result_sha256"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CatalogCorrupt(f"unreadable catalog entry {path}", key=key) from exc
        if doc.get("key") != key or _sha(dumps(result)) != digest:
            raise CatalogCorrupt(f"hash mismatch in catalog entry {path}", key=key)
        return CatalogEntry(key, result, doc["engine_version"], doc["timestamp"])

    def store(self, key, result):
        """Write once; an existing entry must hold a byte-identical result."""
        text = dumps(result)
        existing = self.lookup(key)
        if existing is not None:
            if existing.result_text != text:
                raise CatalogCorrupt(f"catalog key collision with different result: {key}", key=key)
            return existing
        entry = CatalogEntry(key, json.loads(text), self.engine_version,
                             datetime.now(timezone.utc).isoformat(timespec="seconds"))
        doc = {
            "key": key,
            "engine_version": entry.engine_version,
            "timestamp": entry.timestamp,
            "result": entry.result,
            "result_sha256": _sha(text),
        }
        path = self.path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(dumps(doc))
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return entry
