"""Desk-scale accuracy ground truth: synthetic clusters and light classifiers.

Gaussian class clusters with tunable center spread give a controllable
difficulty dial, and nearest-centroid / k-NN classifiers on the embeddings
supply the accuracy numbers that full-scale model training would otherwise
provide.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DataError, UsageError
from .rng import derive_seed
from .store import ClassBlock, LabeledEmbeddingSet, from_arrays

_MODULE = "proxy"


@dataclass(frozen=True)
class SyntheticSpec:
    n_classes: int
    instances_per_class: int
    dim: int
    center_spread: float
    noise_sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_classes < 2:
            raise UsageError(f"n_classes must be >= 2, got {self.n_classes}", _MODULE)
        if self.instances_per_class < 2:
            raise UsageError(
                f"instances_per_class must be >= 2, got {self.instances_per_class}",
                _MODULE,
            )
        if self.dim < 2:
            raise UsageError(f"dim must be >= 2, got {self.dim}", _MODULE)
        if self.center_spread < 0:
            raise UsageError("center_spread must be >= 0", _MODULE)
        if self.noise_sigma <= 0:
            raise UsageError("noise_sigma must be > 0", _MODULE)


@dataclass(frozen=True)
class EvalResult:
    evaluator_id: str
    accuracy: float
    split_seed: int
    n_train: dict[str, int]
    n_test: dict[str, int]


def generate(spec: SyntheticSpec) -> LabeledEmbeddingSet:
    """Gaussian clusters: centers on a sphere of radius center_spread,
    isotropic noise_sigma noise around each center.  Deterministic per seed."""
    rng = np.random.default_rng(spec.seed)
    # Shared offset lifting every vector off the origin, like real encoder
    # embeddings whose pairwise cosines are positive on average.  Without it
    # the zero-spread case has near-zero statistics and the soft-score ratio
    # is ill-conditioned.
    offset_dir = rng.standard_normal(spec.dim)
    offset = offset_dir / np.linalg.norm(offset_dir) * spec.noise_sigma * np.sqrt(spec.dim)
    raw = rng.standard_normal((spec.n_classes, spec.dim))
    # Mean-center before projecting onto the sphere so class centers are
    # negatively correlated on average; inter-class similarity then falls
    # monotonically as the spread grows.
    raw = raw - raw.mean(axis=0)
    if spec.center_spread > 0:
        centers = raw / np.linalg.norm(raw, axis=1, keepdims=True) * spec.center_spread
    else:
        centers = np.zeros_like(raw)
    blocks = []
    for c in range(spec.n_classes):
        noise = rng.standard_normal((spec.instances_per_class, spec.dim))
        blocks.append((f"c{c:02d}", offset + centers[c] + spec.noise_sigma * noise))
    dataset_id = (
        f"synth_k{spec.n_classes}_n{spec.instances_per_class}_d{spec.dim}"
        f"_s{spec.center_spread:g}_sig{spec.noise_sigma:g}_seed{spec.seed}"
    )
    return from_arrays(dataset_id, blocks)


def split(
    ds: LabeledEmbeddingSet, train_fraction: float, seed: int
) -> tuple[LabeledEmbeddingSet, LabeledEmbeddingSet]:
    """Stratified per-class split into disjoint train/test sets."""
    if not (0.0 < train_fraction < 1.0):
        raise UsageError(f"train_fraction must be in (0, 1), got {train_fraction}", _MODULE)
    train_blocks, test_blocks = [], []
    for block in ds.classes:
        n = block.n_instances
        if n < 2:
            raise DataError(
                f"class {block.label!r} has {n} instance(s); cannot split", _MODULE
            )
        n_train = int(round(train_fraction * n))
        n_train = min(max(n_train, 1), n - 1)
        perm = np.random.default_rng(derive_seed(seed, "split", block.label)).permutation(n)
        train_blocks.append(ClassBlock(block.label, block.vectors[np.sort(perm[:n_train])]))
        test_blocks.append(ClassBlock(block.label, block.vectors[np.sort(perm[n_train:])]))
    return (
        LabeledEmbeddingSet(f"{ds.dataset_id}/train", tuple(train_blocks)),
        LabeledEmbeddingSet(f"{ds.dataset_id}/test", tuple(test_blocks)),
    )


def _check_labels(train: LabeledEmbeddingSet, test: LabeledEmbeddingSet) -> None:
    missing = set(test.labels()) - set(train.labels())
    if missing:
        raise DataError(f"test labels absent from train: {sorted(missing)}", _MODULE)


def _stack(ds: LabeledEmbeddingSet) -> tuple[np.ndarray, list[str]]:
    x = np.vstack([b.vectors for b in ds.classes])
    y = [b.label for b in ds.classes for _ in range(b.n_instances)]
    return x, y


def _distances(x: np.ndarray, refs: np.ndarray, metric: str) -> np.ndarray:
    if metric == "euclidean":
        sq = (
            (x * x).sum(axis=1)[:, None]
            + (refs * refs).sum(axis=1)[None, :]
            - 2.0 * (x @ refs.T)
        )
        return np.sqrt(np.clip(sq, 0.0, None))
    if metric == "cosine":
        xn = x / np.linalg.norm(x, axis=1, keepdims=True)
        rn = refs / np.linalg.norm(refs, axis=1, keepdims=True)
        return 1.0 - xn @ rn.T
    raise UsageError(f"metric must be euclidean or cosine, got {metric!r}", _MODULE)


def nearest_centroid(
    train: LabeledEmbeddingSet,
    test: LabeledEmbeddingSet,
    metric: str = "euclidean",
    split_seed: int = 0,
) -> EvalResult:
    """Assign each test vector to the class with the nearest train centroid.

    Exact distance ties go to the lexicographically smaller label.
    """
    _check_labels(train, test)
    order = sorted(train.labels())
    centroids = np.vstack([train.block(lb).vectors.mean(axis=0) for lb in order])
    x, y = _stack(test)
    d = _distances(x, centroids, metric)
    # argmin returns the first minimum; rows are in sorted label order.
    pred = [order[i] for i in d.argmin(axis=1)]
    correct = sum(p == t for p, t in zip(pred, y))
    return EvalResult(
        evaluator_id=f"centroid-{metric}",
        accuracy=correct / len(y),
        split_seed=split_seed,
        n_train={b.label: b.n_instances for b in train.classes},
        n_test={b.label: b.n_instances for b in test.classes},
    )


def knn(
    train: LabeledEmbeddingSet,
    test: LabeledEmbeddingSet,
    k: int = 3,
    metric: str = "euclidean",
    split_seed: int = 0,
) -> EvalResult:
    """k-nearest-neighbor majority vote; vote ties go to the smaller label."""
    if k < 1 or k % 2 == 0:
        raise UsageError(f"k must be a positive odd number, got {k}", _MODULE)
    _check_labels(train, test)
    xt, yt = _stack(train)
    if k > len(yt):
        raise UsageError(f"k={k} exceeds the {len(yt)} training instances", _MODULE)
    x, y = _stack(test)
    d = _distances(x, xt, metric)
    # Stable sort keeps equal-distance neighbors in train order, which is
    # itself deterministic, so votes are reproducible.
    nearest = np.argsort(d, axis=1, kind="stable")[:, :k]
    correct = 0
    for row, truth in zip(nearest, y):
        votes: dict[str, int] = {}
        for idx in row:
            votes[yt[idx]] = votes.get(yt[idx], 0) + 1
        top = max(votes.values())
        best = min(label for label, count in votes.items() if count == top)
        correct += best == truth
    return EvalResult(
        evaluator_id=f"knn{k}-{metric}",
        accuracy=correct / len(y),
        split_seed=split_seed,
        n_train={b.label: b.n_instances for b in train.classes},
        n_test={b.label: b.n_instances for b in test.classes},
    )


def proxy_accuracy(
    ds: LabeledEmbeddingSet,
    evaluator: str = "centroid",
    *,
    train_fraction: float = 0.5,
    split_seed: int = 0,
    metric: str = "euclidean",
    k: int = 3,
) -> EvalResult:
    """Split the dataset and run the named evaluator on the held-out half."""
    train, test = split(ds, train_fraction, split_seed)
    if evaluator == "centroid":
        return nearest_centroid(train, test, metric, split_seed)
    if evaluator == "knn":
        return knn(train, test, k, metric, split_seed)
    raise UsageError(f"evaluator must be centroid or knn, got {evaluator!r}", _MODULE)


def accuracy_matrix(
    ds: LabeledEmbeddingSet,
    evaluator: str = "centroid",
    *,
    train_fraction: float = 0.5,
    seed: int = 0,
    metric: str = "euclidean",
    k: int = 3,
    threads: int = 1,
) -> tuple[list[str], np.ndarray]:
    """Binary-classification accuracy for every class pair.

    Entry (a, b) is the evaluator's held-out accuracy on the two-class
    restriction; the split seed is derived from the sorted label pair so
    the matrix is symmetric by construction.  Diagonal is 1 by convention.
    """
    if ds.n_classes < 2:
        raise DataError(f"need at least 2 classes, got {ds.n_classes}", _MODULE)
    labels = ds.labels()
    n = len(labels)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def run_pair(pair):
        i, j = pair
        la, lb = sorted((labels[i], labels[j]))
        sub = ds.subset([la, lb], dataset_id=f"{ds.dataset_id}/{la}|{lb}")
        pair_seed = derive_seed(seed, la, lb)
        return proxy_accuracy(
            sub,
            evaluator,
            train_fraction=train_fraction,
            split_seed=pair_seed,
            metric=metric,
            k=k,
        ).accuracy

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            accs = list(pool.map(run_pair, pairs))
    else:
        accs = [run_pair(p) for p in pairs]

    m = np.eye(n)
    for (i, j), acc in zip(pairs, accs):
        m[i, j] = acc
        m[j, i] = acc
    return labels, m
