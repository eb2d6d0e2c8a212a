"""Scalar separability scores built from averaged class statistics.

Similarity variants combine the average intra-class statistic (higher is
easier) with the average inter-class statistic (higher is harder); the
Euclidean-distance variants swap those roles.  The "soft" forms divide by
the larger weighted term so non-negative inputs always land in [-1, 1].
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DataError, DegenerateError, UsageError
from .similarity import summarize
from .store import LabeledEmbeddingSet

_MODULE = "measures"

EPS = 1e-12

MEASURES = ("weighted_sim", "soft_sim", "weighted_dist", "soft_dist")


@dataclass(frozen=True)
class DifficultyScore:
    measure: str
    lam: float
    value: float
    avg_intra: float
    avg_inter: float
    n_classes: int | None = None

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "lambda": self.lam,
            "value": self.value,
            "avg_intra": self.avg_intra,
            "avg_inter": self.avg_inter,
            "n_classes": self.n_classes,
        }


def _check_lambda(lam: float) -> None:
    if not (0.0 <= lam <= 1.0):
        raise UsageError(f"lambda must be in [0, 1], got {lam}", _MODULE)


def weighted_sim(avg_intra: float, avg_inter: float, lam: float = 0.5) -> DifficultyScore:
    """(1 + lam*intra - (1-lam)*inter) / 2."""
    _check_lambda(lam)
    value = (1.0 + lam * avg_intra - (1.0 - lam) * avg_inter) / 2.0
    return DifficultyScore("weighted_sim", lam, value, avg_intra, avg_inter)


def soft_sim(avg_intra: float, avg_inter: float, lam: float = 0.5) -> DifficultyScore:
    """(lam*intra - (1-lam)*inter) / max(lam*intra, (1-lam)*inter)."""
    _check_lambda(lam)
    a = lam * avg_intra
    b = (1.0 - lam) * avg_inter
    denom = max(a, b)
    if denom <= EPS:
        raise DegenerateError(
            f"soft score denominator max({a:.3g}, {b:.3g}) is not positive", _MODULE
        )
    return DifficultyScore("soft_sim", lam, (a - b) / denom, avg_intra, avg_inter)


def weighted_dist(avg_intra: float, avg_inter: float, lam: float = 0.5) -> DifficultyScore:
    """(1 + lam*inter_dist - (1-lam)*intra_dist) / 2; unbounded above."""
    _check_lambda(lam)
    if avg_intra < 0.0 or avg_inter < 0.0:
        raise DataError("distances must be non-negative", _MODULE)
    value = (1.0 + lam * avg_inter - (1.0 - lam) * avg_intra) / 2.0
    return DifficultyScore("weighted_dist", lam, value, avg_intra, avg_inter)


def soft_dist(avg_intra: float, avg_inter: float, lam: float = 0.5) -> DifficultyScore:
    """(lam*inter_dist - (1-lam)*intra_dist) / max of the two weighted terms."""
    _check_lambda(lam)
    if avg_intra < 0.0 or avg_inter < 0.0:
        raise DataError("distances must be non-negative", _MODULE)
    a = lam * avg_inter
    b = (1.0 - lam) * avg_intra
    denom = max(a, b)
    if denom <= EPS:
        raise DegenerateError(
            f"soft score denominator max({a:.3g}, {b:.3g}) is not positive", _MODULE
        )
    return DifficultyScore("soft_dist", lam, (a - b) / denom, avg_intra, avg_inter)


_SCORE_FNS = {
    "weighted_sim": weighted_sim,
    "soft_sim": soft_sim,
    "weighted_dist": weighted_dist,
    "soft_dist": soft_dist,
}


def score_from_stats(
    measure: str, avg_intra: float, avg_inter: float, lam: float = 0.5
) -> DifficultyScore:
    """Apply a named measure to precomputed average statistics."""
    if measure not in _SCORE_FNS:
        raise UsageError(f"measure must be one of {MEASURES}, got {measure!r}", _MODULE)
    return _SCORE_FNS[measure](avg_intra, avg_inter, lam)


def measure_kind(measure: str) -> str:
    """Which pairwise statistic a measure consumes: cosine or euclidean."""
    if measure not in MEASURES:
        raise UsageError(f"measure must be one of {MEASURES}, got {measure!r}", _MODULE)
    return "cosine" if measure.endswith("_sim") else "euclidean"


def score_dataset(
    ds: LabeledEmbeddingSet,
    measure: str = "soft_sim",
    lam: float = 0.5,
    permissive: bool = False,
) -> DifficultyScore:
    """Summarize the dataset and apply the selected score."""
    kind = measure_kind(measure)
    _check_lambda(lam)
    summary = summarize(ds, kind, permissive)
    score = _SCORE_FNS[measure](summary.avg_intra, summary.avg_inter, lam)
    return DifficultyScore(
        score.measure, score.lam, score.value, score.avg_intra, score.avg_inter,
        n_classes=ds.n_classes,
    )
