"""Dataset registry: short ids mapped to edge-list files with optional checks."""
from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from .exceptions import DatasetError
from .graph import EdgeListOptions, Graph, load_edge_list

DATA_DIR_ENV = "CCLP_DATA_DIR"
REGISTRY_NAME = "registry.yaml"


@dataclass(frozen=True)
class DatasetEntry:
    id: str
    path: Path
    expected_n: int | None = None
    expected_m: int | None = None
    checksum: str | None = None  # sha256 hex digest
    symmetrize: bool = True


def sha256_of(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _entries_from(manifest: Path) -> dict[str, DatasetEntry]:
    try:
        doc = yaml.safe_load(manifest.read_text()) or {}
    except OSError as exc:
        raise DatasetError(f"cannot read registry {manifest}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise DatasetError(f"malformed registry {manifest}: {exc}") from exc
    entries = {}
    for key, item in (doc.get("datasets") or {}).items():
        if not isinstance(item, dict) or "path" not in item:
            raise DatasetError(f"registry {manifest}: entry {key!r} has no path")
        entries[str(key)] = DatasetEntry(
            id=str(key),
            path=(manifest.parent / os.path.expanduser(item["path"])).resolve(),
            expected_n=item.get("n"),
            expected_m=item.get("m"),
            checksum=item.get("sha256"),
            symmetrize=item.get("symmetrize", True),
        )
    return entries


class Registry:
    """Ordered collection of dataset entries; later manifests override earlier ones."""

    def __init__(self, entries: dict[str, DatasetEntry] | None = None):
        self.entries = dict(entries or {})

    @classmethod
    def default(cls, extra: list[str | Path] | None = None) -> "Registry":
        """Bundled fixtures, then ``$CCLP_DATA_DIR/registry.yaml``, then ``extra``."""
        reg = cls()
        with resources.as_file(resources.files("cclp") / "data" / REGISTRY_NAME) as p:
            reg.entries.update(_entries_from(Path(p)))
        data_dir = os.environ.get(DATA_DIR_ENV)
        if data_dir and (Path(data_dir) / REGISTRY_NAME).is_file():
            reg.entries.update(_entries_from(Path(data_dir) / REGISTRY_NAME))
        for manifest in extra or []:
            reg.entries.update(_entries_from(Path(manifest)))
        return reg

    def __contains__(self, key):
        return key in self.entries

    def resolve(self, name: str) -> DatasetEntry:
        """Look up a registry id; fall back to a file path (absolute, relative,
        or relative to ``$CCLP_DATA_DIR``)."""
        if name in self.entries:
            return self.entries[name]
        candidates = [Path(name)]
        if os.environ.get(DATA_DIR_ENV):
            candidates.append(Path(os.environ[DATA_DIR_ENV]) / name)
        for c in candidates:
            if c.is_file():
                return DatasetEntry(id=c.stem, path=c.resolve())
        raise DatasetError(f"dataset {name!r}: not a registry id and no such file")

    def load(self, name: str) -> tuple[DatasetEntry, Graph]:
        entry = self.resolve(name)
        return entry, load_entry(entry)


def load_entry(entry: DatasetEntry) -> Graph:
    if not entry.path.is_file():
        raise DatasetError(f"dataset {entry.id!r}: file not found: {entry.path}")
    if entry.checksum and sha256_of(entry.path) != entry.checksum.lower():
        raise DatasetError(f"dataset {entry.id!r}: checksum mismatch for {entry.path}")
    with open(entry.path, encoding="utf-8", errors="replace") as fh:
        g = load_edge_list(fh, EdgeListOptions(symmetrize=entry.symmetrize))
    if entry.expected_n is not None and g.node_count != entry.expected_n:
        raise DatasetError(f"dataset {entry.id!r}: expected N={entry.expected_n}, loaded {g.node_count}")
    if entry.expected_m is not None and g.edge_count != entry.expected_m:
        raise DatasetError(f"dataset {entry.id!r}: expected M={entry.expected_m}, loaded {g.edge_count}")
    return g
