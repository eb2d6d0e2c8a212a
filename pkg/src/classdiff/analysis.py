"""Correlation studies: does a difficulty score track classifier accuracy?

Covers Pearson correlation, polynomial least-squares fits with MSE,
seeded class-subset sampling, and the study runner that sweeps measures
and lambda values over subsets of a dataset.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, DegenerateError, UsageError
from .measures import measure_kind, score_from_stats
from .rng import fisher_yates_prefix
from .similarity import summarize
from .store import LabeledEmbeddingSet

_MODULE = "analysis"


@dataclass(frozen=True)
class AccuracyRecord:
    subset_id: str
    evaluator_id: str
    accuracy: float

    def __post_init__(self):
        if not (0.0 <= self.accuracy <= 1.0):
            raise DataError(
                f"accuracy must be in [0, 1], got {self.accuracy} "
                f"for ({self.subset_id}, {self.evaluator_id})",
                _MODULE,
            )


@dataclass(frozen=True)
class SubsetSpec:
    seed: int
    n_cl: int
    labels: tuple[str, ...]

    @property
    def subset_id(self) -> str:
        return f"ncl{self.n_cl}_seed{self.seed}"


@dataclass(frozen=True)
class PolyFit:
    degree: int
    coefficients: tuple[float, ...]  # descending powers
    mse: float

    def predict(self, x):
        return np.polyval(self.coefficients, x)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "coefficients": list(self.coefficients),
            "mse": self.mse,
        }


@dataclass(frozen=True)
class CorrelationReport:
    measure: str
    lam: float
    r: float
    abs_r: float
    n_points: int
    points: tuple[tuple[float, float], ...]  # (difficulty, accuracy)

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "lambda": self.lam,
            "r": self.r,
            "abs_r": self.abs_r,
            "n_points": self.n_points,
            "points": [list(p) for p in self.points],
        }


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient, clamped to [-1, 1]."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError(f"length mismatch: {x.shape} vs {y.shape}", _MODULE)
    if x.size < 2:
        raise DataError("pearson needs at least 2 points", _MODULE)
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(dx @ dx)
    sy = float(dy @ dy)
    if sx == 0.0 or sy == 0.0:
        raise DegenerateError("pearson undefined for a constant input", _MODULE)
    return float(np.clip(dx @ dy / np.sqrt(sx * sy), -1.0, 1.0))


def polyfit(points: Iterable[tuple[float, float]], degree: int) -> PolyFit:
    """Least-squares polynomial of the given degree with its fit MSE."""
    pts = list(points)
    if degree < 1:
        raise UsageError(f"degree must be >= 1, got {degree}", _MODULE)
    if len(pts) < degree + 1:
        raise DataError(
            f"need at least {degree + 1} points for degree {degree}, got {len(pts)}",
            _MODULE,
        )
    x = np.array([p[0] for p in pts], dtype=np.float64)
    y = np.array([p[1] for p in pts], dtype=np.float64)
    if np.unique(x).size < degree + 1:
        raise DataError(
            f"need {degree + 1} distinct abscissae for degree {degree}", _MODULE
        )
    # np.polyfit solves the Vandermonde system by SVD-backed least squares.
    coeffs = np.polyfit(x, y, degree)
    residuals = np.polyval(coeffs, x) - y
    return PolyFit(degree, tuple(float(c) for c in coeffs), float(np.mean(residuals**2)))


def matrix_correlation(sim_matrix, acc_matrix) -> float:
    """Pearson r over the strict upper triangles of two class matrices."""
    a = np.asarray(sim_matrix, dtype=np.float64)
    b = np.asarray(acc_matrix, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DataError(f"matrix shape mismatch: {a.shape} vs {b.shape}", _MODULE)
    iu = np.triu_indices(a.shape[0], k=1)
    return pearson(a[iu], b[iu])


def sample_subsets(
    parent_labels: Sequence[str], n_cl: int, seeds: Sequence[int]
) -> list[SubsetSpec]:
    """Seeded class subsets: Fisher-Yates prefix over the sorted label list."""
    labels = sorted(set(parent_labels))
    if len(labels) != len(parent_labels):
        raise DataError("parent labels must be distinct", _MODULE)
    if n_cl > len(labels):
        raise DataError(
            f"n_cl={n_cl} exceeds the {len(labels)} available classes", _MODULE
        )
    if len(set(seeds)) != len(seeds):
        raise UsageError("seeds must be distinct", _MODULE)
    return [
        SubsetSpec(seed, n_cl, tuple(fisher_yates_prefix(labels, n_cl, seed)))
        for seed in seeds
    ]


def load_accuracy_csv(path) -> list[AccuracyRecord]:
    """Read `subset_id,evaluator_id,accuracy` rows (header required)."""
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise DataError(f"cannot read accuracy CSV: {exc}", _MODULE) from exc
    return parse_accuracy_csv(text)


def parse_accuracy_csv(text: str) -> list[AccuracyRecord]:
    reader = csv.DictReader(io.StringIO(text))
    expected = {"subset_id", "evaluator_id", "accuracy"}
    if reader.fieldnames is None or set(reader.fieldnames) != expected:
        raise DataError(
            f"accuracy CSV header must be subset_id,evaluator_id,accuracy, "
            f"got {reader.fieldnames}",
            _MODULE,
        )
    records = []
    seen = set()
    for row in reader:
        key = (row["subset_id"], row["evaluator_id"])
        if key in seen:
            raise DataError(f"duplicate accuracy record for {key}", _MODULE)
        seen.add(key)
        try:
            acc = float(row["accuracy"])
        except ValueError as exc:
            raise DataError(f"bad accuracy value for {key}: {row['accuracy']}", _MODULE) from exc
        records.append(AccuracyRecord(row["subset_id"], row["evaluator_id"], acc))
    return records


def accuracy_csv(records: Iterable[AccuracyRecord]) -> str:
    lines = ["subset_id,evaluator_id,accuracy"]
    for r in records:
        lines.append(f"{r.subset_id},{r.evaluator_id},{r.accuracy:.12g}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SubsetScore:
    """One evaluated subset: its spec, difficulty scores, and accuracy."""

    spec: SubsetSpec
    scores: dict[tuple[str, float], float]  # (measure, lambda) -> value
    accuracy: float


@dataclass(frozen=True)
class StudyResult:
    subsets: tuple[SubsetScore, ...]
    reports: tuple[CorrelationReport, ...]
    fits: tuple[PolyFit, ...] = field(default_factory=tuple)


def _resolve_accuracy(
    accuracy, subset_ds: LabeledEmbeddingSet, subset_id: str, evaluator_id: str
) -> float:
    if callable(accuracy):
        return float(accuracy(subset_ds, subset_id))
    for rec in accuracy:
        if rec.subset_id == subset_id and rec.evaluator_id == evaluator_id:
            return rec.accuracy
    raise DataError(
        f"no accuracy record for subset {subset_id!r}, evaluator {evaluator_id!r}",
        _MODULE,
    )


def run_study(
    ds: LabeledEmbeddingSet,
    n_cl_values: Sequence[int],
    seeds: Sequence[int],
    measures: Sequence[str],
    lambdas: Sequence[float],
    accuracy,
    *,
    evaluator_id: str = "import",
    pairing: str = "per_subset",
    permissive: bool = False,
    threads: int = 1,
) -> StudyResult:
    """Score seeded class subsets and correlate each measure with accuracy.

    ``accuracy`` is either a list of AccuracyRecord (matched on subset id
    and ``evaluator_id``) or a callable ``(subset_ds, subset_id) -> float``.
    ``pairing`` is ``per_subset`` (one correlation point per subset) or
    ``per_ncl`` (points averaged over seeds for each class count).
    """
    if pairing not in ("per_subset", "per_ncl"):
        raise UsageError(f"pairing must be per_subset or per_ncl, got {pairing!r}", _MODULE)
    kinds = {measure_kind(m) for m in measures}

    specs: list[SubsetSpec] = []
    for n_cl in n_cl_values:
        specs.extend(sample_subsets(ds.labels(), n_cl, seeds))

    def evaluate(spec: SubsetSpec) -> SubsetScore:
        sub = ds.subset(spec.labels, dataset_id=f"{ds.dataset_id}/{spec.subset_id}")
        summaries = {kind: summarize(sub, kind, permissive) for kind in kinds}
        scores = {}
        for m in measures:
            s = summaries[measure_kind(m)]
            for lam in lambdas:
                scores[(m, lam)] = score_from_stats(m, s.avg_intra, s.avg_inter, lam).value
        acc = _resolve_accuracy(accuracy, sub, spec.subset_id, evaluator_id)
        if not (0.0 <= acc <= 1.0):
            raise DataError(f"accuracy out of [0, 1] for {spec.subset_id}: {acc}", _MODULE)
        return SubsetScore(spec, scores, acc)

    # Evaluation order is fixed by the spec list; results are merged in
    # that order so the report is identical for any thread count.
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            subset_scores = list(pool.map(evaluate, specs))
    else:
        subset_scores = [evaluate(s) for s in specs]

    reports = []
    for m in measures:
        for lam in lambdas:
            if pairing == "per_subset":
                pts = [(ss.scores[(m, lam)], ss.accuracy) for ss in subset_scores]
            else:
                pts = []
                for n_cl in n_cl_values:
                    group = [ss for ss in subset_scores if ss.spec.n_cl == n_cl]
                    pts.append(
                        (
                            float(np.mean([ss.scores[(m, lam)] for ss in group])),
                            float(np.mean([ss.accuracy for ss in group])),
                        )
                    )
            if len(pts) < 3:
                raise DataError(
                    f"need at least 3 (difficulty, accuracy) points, got {len(pts)}",
                    _MODULE,
                )
            r = pearson([p[0] for p in pts], [p[1] for p in pts])
            reports.append(
                CorrelationReport(m, lam, r, abs(r), len(pts), tuple(pts))
            )
    return StudyResult(tuple(subset_scores), tuple(reports))


def fit_report_points(
    points: Sequence[tuple[float, float]], degrees: Sequence[int] = (1, 2, 3)
) -> list[PolyFit]:
    """Fit each requested degree to the same point set."""
    return [polyfit(points, d) for d in degrees]
