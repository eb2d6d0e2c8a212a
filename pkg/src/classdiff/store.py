"""Loading, validation and caching of class-labeled embedding sets.

A dataset on disk is a JSON manifest pointing at one array file per class
(CSV or NPY).  Everything downstream works off the immutable in-memory
:class:`LabeledEmbeddingSet`, or off the :class:`NormalizedCache` of
unit vectors and per-class sums that powers the fast mean-cosine path.
"""
from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError

_MODULE = "store"

CACHE_MAGIC = b"CDCACHE1"


@dataclass(frozen=True)
class ClassBlock:
    """One class: a label and an (n_instances, dim) float64 matrix."""

    label: str
    vectors: np.ndarray

    @property
    def n_instances(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class LabeledEmbeddingSet:
    """Ordered collection of class blocks sharing one embedding dimension."""

    dataset_id: str
    classes: tuple[ClassBlock, ...]

    @property
    def dim(self) -> int:
        return self.classes[0].dim

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def labels(self) -> list[str]:
        return [c.label for c in self.classes]

    def block(self, label: str) -> ClassBlock:
        for c in self.classes:
            if c.label == label:
                return c
        raise DataError(f"no class labeled {label!r} in {self.dataset_id}", _MODULE)

    def subset(self, labels, dataset_id: str | None = None) -> "LabeledEmbeddingSet":
        """Restrict to the given labels, keeping this set's class order."""
        wanted = set(labels)
        missing = wanted - set(self.labels())
        if missing:
            raise DataError(
                f"labels not in dataset {self.dataset_id}: {sorted(missing)}", _MODULE
            )
        picked = tuple(c for c in self.classes if c.label in wanted)
        return LabeledEmbeddingSet(dataset_id or self.dataset_id, picked)


@dataclass(frozen=True)
class NormalizedCache:
    """Per-class L2-normalized vectors plus their column sums and counts."""

    labels: tuple[str, ...]
    unit_vectors: tuple[np.ndarray, ...]
    class_sums: tuple[np.ndarray, ...]
    class_counts: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.unit_vectors[0].shape[1]


def _validate_block(label: str, vectors: np.ndarray, source: str) -> np.ndarray:
    if vectors.ndim == 1:
        vectors = vectors.reshape(1, -1)
    if vectors.ndim != 2:
        raise DataError(
            f"class {label!r}: expected a 2-D array in {source}, got ndim={vectors.ndim}",
            _MODULE,
        )
    if vectors.shape[0] < 1 or vectors.shape[1] < 1:
        raise DataError(f"class {label!r}: empty array in {source}", _MODULE)
    vectors = np.ascontiguousarray(vectors, dtype=np.float64)
    bad = ~np.isfinite(vectors)
    if bad.any():
        row = int(np.argwhere(bad)[0][0])
        raise DataError(
            f"class {label!r}: non-finite value at row {row} in {source}", _MODULE
        )
    norms = np.linalg.norm(vectors, axis=1)
    zero = np.nonzero(norms == 0.0)[0]
    if zero.size:
        raise DataError(
            f"class {label!r}: all-zero vector at row {int(zero[0])} in {source}",
            _MODULE,
        )
    vectors.setflags(write=False)
    return vectors


def _read_array(path: Path, label: str) -> np.ndarray:
    if not path.is_file():
        raise DataError(f"class {label!r}: file not found: {path}", _MODULE)
    suffix = path.suffix.lower()
    if suffix == ".csv":
        try:
            arr = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
        except ValueError as exc:
            raise DataError(f"class {label!r}: bad CSV {path}: {exc}", _MODULE) from exc
    elif suffix == ".npy":
        try:
            arr = np.load(path, allow_pickle=False)
        except ValueError as exc:
            raise DataError(f"class {label!r}: bad NPY {path}: {exc}", _MODULE) from exc
        if arr.dtype.kind != "f":
            raise DataError(
                f"class {label!r}: NPY dtype must be float32/float64, got {arr.dtype}",
                _MODULE,
            )
    else:
        raise DataError(
            f"class {label!r}: unsupported extension {path.suffix!r} (use .csv or .npy)",
            _MODULE,
        )
    return arr


def load_dataset(manifest_path) -> LabeledEmbeddingSet:
    """Load and validate a dataset from its JSON manifest.

    Class order follows the manifest.  Referenced array files are resolved
    relative to the manifest's directory.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise DataError(f"manifest not found: {manifest_path}", _MODULE)
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"manifest is not valid JSON: {exc}", _MODULE) from exc

    if not isinstance(manifest, dict) or "classes" not in manifest:
        raise DataError("manifest must be an object with a 'classes' list", _MODULE)
    dataset_id = manifest.get("dataset_id")
    if not isinstance(dataset_id, str) or not dataset_id:
        raise DataError("manifest 'dataset_id' must be a non-empty string", _MODULE)
    entries = manifest["classes"]
    if not isinstance(entries, list) or not entries:
        raise DataError("manifest 'classes' must be a non-empty list", _MODULE)

    root = manifest_path.parent
    blocks: list[ClassBlock] = []
    seen: set[str] = set()
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or "label" not in entry or "file" not in entry:
            raise DataError(
                f"manifest classes[{i}] must have 'label' and 'file'", _MODULE
            )
        label = entry["label"]
        if not isinstance(label, str) or not label:
            raise DataError(f"manifest classes[{i}]: label must be non-empty", _MODULE)
        if label in seen:
            raise DataError(f"duplicate class label {label!r}", _MODULE)
        seen.add(label)
        path = root / entry["file"]
        arr = _read_array(path, label)
        blocks.append(ClassBlock(label, _validate_block(label, arr, str(path))))

    dim = blocks[0].dim
    for b in blocks[1:]:
        if b.dim != dim:
            raise DataError(
                f"dimension mismatch: class {b.label!r} has dim {b.dim}, "
                f"class {blocks[0].label!r} has dim {dim}",
                _MODULE,
            )
    return LabeledEmbeddingSet(dataset_id, tuple(blocks))


def from_arrays(dataset_id, labeled_arrays) -> LabeledEmbeddingSet:
    """Build a validated set from (label, array) pairs, in the given order."""
    blocks = []
    seen = set()
    for label, arr in labeled_arrays:
        if not label or not isinstance(label, str):
            raise DataError("class labels must be non-empty strings", _MODULE)
        if label in seen:
            raise DataError(f"duplicate class label {label!r}", _MODULE)
        seen.add(label)
        blocks.append(
            ClassBlock(label, _validate_block(label, np.asarray(arr), "<memory>"))
        )
    dim = blocks[0].dim
    for b in blocks[1:]:
        if b.dim != dim:
            raise DataError(
                f"dimension mismatch: class {b.label!r} has dim {b.dim}, expected {dim}",
                _MODULE,
            )
    return LabeledEmbeddingSet(dataset_id, tuple(blocks))


def build_cache(ds: LabeledEmbeddingSet) -> NormalizedCache:
    """Normalize every vector to unit L2 norm and precompute per-class sums."""
    units, sums, counts = [], [], []
    for block in ds.classes:
        norms = np.linalg.norm(block.vectors, axis=1, keepdims=True)
        u = block.vectors / norms
        u.setflags(write=False)
        s = u.sum(axis=0)
        s.setflags(write=False)
        units.append(u)
        sums.append(s)
        counts.append(block.n_instances)
    return NormalizedCache(
        labels=tuple(ds.labels()),
        unit_vectors=tuple(units),
        class_sums=tuple(sums),
        class_counts=tuple(counts),
    )


def save_cache(cache: NormalizedCache, path) -> None:
    """Write the cache in the binary CDCACHE1 layout with a trailing CRC32."""
    out = bytearray()
    out += CACHE_MAGIC
    out += struct.pack("<I", len(cache.labels))
    for label, units, csum, count in zip(
        cache.labels, cache.unit_vectors, cache.class_sums, cache.class_counts
    ):
        raw = label.encode("utf-8")
        out += struct.pack("<I", len(raw))
        out += raw
        out += struct.pack("<QQ", count, units.shape[1])
        out += np.ascontiguousarray(units, dtype="<f8").tobytes()
        out += np.ascontiguousarray(csum, dtype="<f8").tobytes()
    out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    Path(path).write_bytes(bytes(out))


def load_cache(path) -> NormalizedCache:
    """Read a CDCACHE1 file back, verifying magic bytes and checksum."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"cache file not found: {path}", _MODULE)
    blob = path.read_bytes()
    if len(blob) < len(CACHE_MAGIC) + 8 or blob[: len(CACHE_MAGIC)] != CACHE_MAGIC:
        raise DataError(f"not a CDCACHE1 file: {path}", _MODULE)
    body, (stored_crc,) = blob[:-4], struct.unpack("<I", blob[-4:])
    if zlib.crc32(body) & 0xFFFFFFFF != stored_crc:
        raise DataError(f"cache checksum mismatch (truncated or corrupt): {path}", _MODULE)

    off = len(CACHE_MAGIC)

    def take(n):
        nonlocal off
        if off + n > len(body):
            raise DataError(f"cache truncated: {path}", _MODULE)
        chunk = body[off : off + n]
        off += n
        return chunk

    (n_classes,) = struct.unpack("<I", take(4))
    labels, units, sums, counts = [], [], [], []
    for _ in range(n_classes):
        (label_len,) = struct.unpack("<I", take(4))
        labels.append(take(label_len).decode("utf-8"))
        count, dim = struct.unpack("<QQ", take(16))
        u = np.frombuffer(take(count * dim * 8), dtype="<f8").reshape(count, dim)
        s = np.frombuffer(take(dim * 8), dtype="<f8")
        units.append(u)
        sums.append(s)
        counts.append(int(count))
    if off != len(body):
        raise DataError(f"cache has {len(body) - off} trailing bytes: {path}", _MODULE)
    return NormalizedCache(tuple(labels), tuple(units), tuple(sums), tuple(counts))


def save_dataset(ds: LabeledEmbeddingSet, out_dir, *, fmt: str = "npy") -> Path:
    """Write a dataset as manifest + per-class array files; returns manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, block in enumerate(ds.classes):
        fname = f"class_{i:03d}.{fmt}"
        if fmt == "npy":
            np.save(out_dir / fname, block.vectors)
        elif fmt == "csv":
            np.savetxt(out_dir / fname, block.vectors, delimiter=",", fmt="%.17g")
        else:
            raise DataError(f"unsupported format {fmt!r}", _MODULE)
        entries.append({"label": block.label, "file": fname})
    manifest = {"dataset_id": ds.dataset_id, "classes": entries}
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest_path
