"""Intra- and inter-class similarity statistics.

Two interchangeable computation paths exist for mean cosine statistics:
``summarize`` materializes pairwise similarity blocks, while
``mean_cosine_fast`` uses cached per-class unit-vector sums so each class
pair costs a single dot product.  Both agree to 1e-9 and are checked in
the test suite against a third, double-loop reference.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DegenerateError, UsageError
from .store import ClassBlock, LabeledEmbeddingSet, NormalizedCache, build_cache

_MODULE = "similarity"

KINDS = ("cosine", "euclidean")


@dataclass(frozen=True)
class SimilaritySummary:
    """Per-class, per-pair and averaged similarity (or distance) statistics."""

    kind: str
    per_class: dict[str, float]
    per_pair: dict[tuple[str, str], float]
    avg_intra: float
    avg_inter: float
    intra_counts: dict[str, int]
    inter_counts: dict[tuple[str, str], int]
    dropped_classes: tuple[str, ...] = field(default_factory=tuple)


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise UsageError(f"kind must be one of {KINDS}, got {kind!r}", _MODULE)


def cosine(z_i, z_j) -> float:
    """Cosine similarity between two vectors, clamped to [-1, 1]."""
    z_i = np.asarray(z_i, dtype=np.float64)
    z_j = np.asarray(z_j, dtype=np.float64)
    if z_i.shape != z_j.shape or z_i.ndim != 1:
        raise DataError(
            f"dimension mismatch: {z_i.shape} vs {z_j.shape}", _MODULE
        )
    ni = np.linalg.norm(z_i)
    nj = np.linalg.norm(z_j)
    if ni == 0.0 or nj == 0.0:
        raise DegenerateError("cosine undefined for a zero vector", _MODULE)
    return float(np.clip(z_i @ z_j / (ni * nj), -1.0, 1.0))


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def _pairwise_euclidean(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # (n_a, n_b) distance matrix via the expanded square; clipped against
    # tiny negative round-off before the square root.
    sq = (
        (a * a).sum(axis=1)[:, None]
        + (b * b).sum(axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.sqrt(np.clip(sq, 0.0, None))


def intra_class(block: ClassBlock, kind: str = "cosine") -> float:
    """Mean pairwise statistic over all C(n, 2) unordered pairs of one class."""
    _check_kind(kind)
    n = block.n_instances
    if n < 2:
        raise DataError(
            f"intra-class statistic undefined for single-instance class "
            f"{block.label!r}",
            _MODULE,
        )
    if kind == "cosine":
        u = _unit_rows(block.vectors)
        g = np.clip(u @ u.T, -1.0, 1.0)
        total = (g.sum() - np.trace(g)) / 2.0
    else:
        d = _pairwise_euclidean(block.vectors, block.vectors)
        total = d.sum() / 2.0
    return float(total / (n * (n - 1) / 2))


def inter_class(a: ClassBlock, b: ClassBlock, kind: str = "cosine") -> float:
    """Mean pairwise statistic over all n_a * n_b cross pairs of two classes."""
    _check_kind(kind)
    if a.n_instances < 1 or b.n_instances < 1:
        raise DataError("inter-class statistic requires non-empty classes", _MODULE)
    if a.label == b.label:
        raise DataError(f"inter-class needs two distinct classes, got {a.label!r}", _MODULE)
    if kind == "cosine":
        g = np.clip(_unit_rows(a.vectors) @ _unit_rows(b.vectors).T, -1.0, 1.0)
    else:
        g = _pairwise_euclidean(a.vectors, b.vectors)
    return float(g.mean())


def _pair_key(la: str, lb: str) -> tuple[str, str]:
    return (la, lb) if la <= lb else (lb, la)


def summarize(
    ds: LabeledEmbeddingSet, kind: str = "cosine", permissive: bool = False
) -> SimilaritySummary:
    """Full per-class / per-pair statistics plus their averages.

    Strict mode rejects single-instance classes; with ``permissive`` they
    are dropped from the intra average (and reported) but still count in
    every inter-class pair.
    """
    _check_kind(kind)
    if ds.n_classes < 2:
        raise DataError(
            f"need at least 2 classes, dataset {ds.dataset_id} has {ds.n_classes}",
            _MODULE,
        )
    singles = [c.label for c in ds.classes if c.n_instances < 2]
    if singles and not permissive:
        raise DataError(
            f"single-instance classes (use permissive mode to drop them): {singles}",
            _MODULE,
        )

    per_class: dict[str, float] = {}
    intra_counts: dict[str, int] = {}
    for block in ds.classes:
        if block.n_instances < 2:
            continue
        per_class[block.label] = intra_class(block, kind)
        intra_counts[block.label] = block.n_instances * (block.n_instances - 1) // 2

    per_pair: dict[tuple[str, str], float] = {}
    inter_counts: dict[tuple[str, str], int] = {}
    for i, a in enumerate(ds.classes):
        for b in ds.classes[i + 1 :]:
            key = _pair_key(a.label, b.label)
            per_pair[key] = inter_class(a, b, kind)
            inter_counts[key] = a.n_instances * b.n_instances

    if not per_class:
        raise DataError(
            "no class with >= 2 instances; intra average undefined", _MODULE
        )
    avg_intra = float(np.mean(list(per_class.values())))
    avg_inter = float(np.mean(list(per_pair.values())))
    return SimilaritySummary(
        kind=kind,
        per_class=per_class,
        per_pair=per_pair,
        avg_intra=avg_intra,
        avg_inter=avg_inter,
        intra_counts=intra_counts,
        inter_counts=inter_counts,
        dropped_classes=tuple(singles),
    )


def pair_matrix(
    ds: LabeledEmbeddingSet, kind: str = "cosine", permissive: bool = False
) -> tuple[list[str], np.ndarray]:
    """Symmetric class matrix: intra statistic on the diagonal, inter off it.

    Returns (labels in dataset order, matrix).  Dropped (single-instance)
    classes get NaN on the diagonal in permissive mode.
    """
    summary = summarize(ds, kind, permissive)
    labels = ds.labels()
    n = len(labels)
    m = np.full((n, n), np.nan)
    for i, la in enumerate(labels):
        if la in summary.per_class:
            m[i, i] = summary.per_class[la]
        for j in range(i + 1, n):
            v = summary.per_pair[_pair_key(la, labels[j])]
            m[i, j] = v
            m[j, i] = v
    return labels, m


def mean_cosine_fast(
    cache: NormalizedCache, permissive: bool = False
) -> SimilaritySummary:
    """Cached-sum path for the cosine statistics.

    With s_C the sum of a class's unit vectors:
    intra(C) = (||s_C||^2 - n) / (n (n - 1)) and
    inter(A, B) = s_A . s_B / (n_A n_B), so each value is one dot product.
    """
    if len(cache.labels) < 2:
        raise DataError(
            f"need at least 2 classes, cache has {len(cache.labels)}", _MODULE
        )
    singles = [
        label for label, n in zip(cache.labels, cache.class_counts) if n < 2
    ]
    if singles and not permissive:
        raise DataError(
            f"single-instance classes (use permissive mode to drop them): {singles}",
            _MODULE,
        )

    per_class: dict[str, float] = {}
    intra_counts: dict[str, int] = {}
    for label, s, n in zip(cache.labels, cache.class_sums, cache.class_counts):
        if n < 2:
            continue
        per_class[label] = float((s @ s - n) / (n * (n - 1)))
        intra_counts[label] = n * (n - 1) // 2

    per_pair: dict[tuple[str, str], float] = {}
    inter_counts: dict[tuple[str, str], int] = {}
    k = len(cache.labels)
    for i in range(k):
        for j in range(i + 1, k):
            key = _pair_key(cache.labels[i], cache.labels[j])
            na, nb = cache.class_counts[i], cache.class_counts[j]
            per_pair[key] = float(cache.class_sums[i] @ cache.class_sums[j] / (na * nb))
            inter_counts[key] = na * nb

    if not per_class:
        raise DataError(
            "no class with >= 2 instances; intra average undefined", _MODULE
        )
    return SimilaritySummary(
        kind="cosine",
        per_class=per_class,
        per_pair=per_pair,
        avg_intra=float(np.mean(list(per_class.values()))),
        avg_inter=float(np.mean(list(per_pair.values()))),
        intra_counts=intra_counts,
        inter_counts=inter_counts,
        dropped_classes=tuple(singles),
    )


def summarize_fast(ds: LabeledEmbeddingSet, permissive: bool = False) -> SimilaritySummary:
    """Convenience wrapper: build the cache then run the fast cosine path."""
    return mean_cosine_fast(build_cache(ds), permissive)


def matrix_to_csv(labels: list[str], matrix: np.ndarray) -> str:
    """Render a labeled square matrix as CSV with a header row and column."""
    lines = ["," + ",".join(labels)]
    for label, row in zip(labels, matrix):
        lines.append(label + "," + ",".join(f"{v:.12g}" for v in row))
    return "\n".join(lines) + "\n"
