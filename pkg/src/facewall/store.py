"""Append-only file-backed post store: normalized JSONL log, manifest, and
the derived-artifact cache keyed by (scope, analysis config hash).

Appends never rewrite existing log bytes, so re-ingesting the same corpus
leaves the store byte-identical. One writer at a time is enforced with an
advisory flock on <root>/.lock.
"""

from __future__ import annotations

import fcntl
import json
import os
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import quote, unquote

from .ingest import CorpusBatch, RawPost
from .rfc3339 import parse_rfc3339

SCHEMA_VERSION = 1

POSTS_FILE = "posts.jsonl"
MANIFEST_FILE = "manifest.json"
LOCK_FILE = ".lock"
DERIVED_DIR = "derived"

# Reserved derived scopes. quote() output never starts with "@", so these
# cannot collide with an encoded user id.
ALL_SCOPE = "@all"
MODEL_SCOPE = "@model"
META_SCOPE = "@meta"


class StoreError(Exception):
    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


def user_scope(user_id: str) -> str:
    """Filesystem-safe directory name for a user id (reversible)."""
    return quote(user_id, safe="")


def scope_user(scope: str) -> str:
    return unquote(scope)


@dataclass(frozen=True)
class AppendReceipt:
    written: int
    record_count: int


class Store:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._manifest: dict | None = None
        self._keys: set[tuple[str, str, str]] | None = None

    # -- lifecycle ---------------------------------------------------------

    @classmethod
    def open(cls, root: str | Path, create: bool = False) -> "Store":
        store = cls(root)
        if not store.manifest_path.exists():
            if not create:
                raise StoreError("store-io", f"no store at {store.root}")
            try:
                store.root.mkdir(parents=True, exist_ok=True)
                store.posts_path.touch(exist_ok=True)
                store._manifest = {
                    "schema_version": SCHEMA_VERSION,
                    "record_count": 0,
                    "config_hash": None,
                    "analyses": {},
                }
                store._save_manifest()
            except OSError as exc:
                raise StoreError("store-io", str(exc)) from exc
        store._load_manifest()
        return store

    @property
    def posts_path(self) -> Path:
        return self.root / POSTS_FILE

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST_FILE

    @property
    def derived_root(self) -> Path:
        return self.root / DERIVED_DIR

    @contextmanager
    def lock(self):
        """Advisory exclusive lock; a held lock is a store error, not a wait."""
        lock_path = self.root / LOCK_FILE
        try:
            handle = open(lock_path, "w")
        except OSError as exc:
            raise StoreError("store-io", str(exc)) from exc
        try:
            try:
                fcntl.flock(handle, fcntl.LOCK_EX | fcntl.LOCK_NB)
            except OSError as exc:
                raise StoreError("locked", f"another command holds {lock_path}") from exc
            yield
        finally:
            handle.close()

    # -- manifest ----------------------------------------------------------

    def _load_manifest(self) -> None:
        try:
            manifest = json.loads(self.manifest_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise StoreError("store-io", f"unreadable manifest: {exc}") from exc
        if manifest.get("schema_version") != SCHEMA_VERSION:
            raise StoreError(
                "schema-mismatch",
                f"store schema {manifest.get('schema_version')!r}, expected {SCHEMA_VERSION}",
            )
        self._manifest = manifest

    def _save_manifest(self) -> None:
        text = json.dumps(self._manifest, sort_keys=True, ensure_ascii=False, indent=2) + "\n"
        _write_atomic(self.manifest_path, text)

    @property
    def manifest(self) -> dict:
        assert self._manifest is not None
        return self._manifest

    @property
    def record_count(self) -> int:
        return int(self.manifest["record_count"])

    # -- post log ----------------------------------------------------------

    def iter_posts(self):
        try:
            with open(self.posts_path, "r", encoding="utf-8") as handle:
                for line in handle:
                    obj = json.loads(line)
                    yield RawPost(
                        user_id=obj["user_id"],
                        timestamp=parse_rfc3339(obj["timestamp"]),
                        text=obj["text"],
                        source=obj.get("source"),
                    )
        except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
            raise StoreError("store-io", f"corrupt post log: {exc}") from exc

    def _existing_keys(self) -> set[tuple[str, str, str]]:
        if self._keys is None:
            self._keys = {post.dedupe_key() for post in self.iter_posts()}
        return self._keys

    def append_batch(self, batch: CorpusBatch) -> AppendReceipt:
        """Append new records in batch order; records already present (same
        dedupe key) are skipped. Idempotent across re-ingests."""
        keys = self._existing_keys()
        written = 0
        try:
            with open(self.posts_path, "a", encoding="utf-8") as handle:
                for post in batch.posts:
                    key = post.dedupe_key()
                    if key in keys:
                        continue
                    handle.write(
                        json.dumps(post.to_record(), sort_keys=True, ensure_ascii=False)
                        + "\n"
                    )
                    keys.add(key)
                    written += 1
        except OSError as exc:
            raise StoreError("store-io", str(exc)) from exc
        if written:
            self.manifest["record_count"] = self.record_count + written
            self._save_manifest()
        return AppendReceipt(written=written, record_count=self.record_count)

    # -- derived artifacts ---------------------------------------------------

    def derived_dir(self, scope: str, config_hash: str) -> Path:
        return self.derived_root / scope / config_hash

    def register_analysis(self, config_hash: str, info: dict) -> None:
        self.manifest.setdefault("analyses", {})[config_hash] = info
        self.manifest["config_hash"] = config_hash
        self._save_manifest()


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
