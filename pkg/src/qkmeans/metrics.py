"""Clustering quality scores and cross-validated benchmarking.

Assignment fidelity is permutation-maximized accuracy: the best fraction
of points a cluster->class relabeling can get right.  Exhaustive over the
permutations for up to 4 clusters, Hungarian assignment above that (both
maximize the same contingency-trace objective).

Fowlkes-Mallows works on co-membership pairs:

    FM = TP / sqrt((TP + FP) * (TP + FN))

with TP the point pairs grouped together in both labelings; a labeling
with no co-clustered pairs at all makes a denominator zero, which is
reported as 0.

``cross_validate`` runs a stratified shuffled k-fold: class indices are
shuffled once, dealt round-robin to folds (stagger offset per class so
remainders spread), each fold scored on a model fitted to the rest.  The
"±" half-width defaults to the sample standard deviation across folds;
``half_width="sem95"`` switches to a 1.96*std/sqrt(n) normal-theory CI.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import clustering
from .dataset import DataSet
from .simulator import derive_seed

METRIC_NAMES = {"fidelity": "AssignmentFidelity", "fm": "FowlkesMallows"}
HALF_WIDTH_KINDS = ("std", "sem95")
_EXHAUSTIVE_MAX_CLUSTERS = 4


@dataclass(frozen=True)
class ScoreReport:
    """Cross-validation outcome for one dataset and metric."""

    metric: str
    per_fold: tuple[float, ...]
    mean: float
    half_width: float
    half_width_kind: str = "std"

    def __post_init__(self) -> None:
        if self.metric not in METRIC_NAMES.values():
            raise ValueError(f"metric must be one of {sorted(METRIC_NAMES.values())}")
        if not self.per_fold:
            raise ValueError("per_fold must not be empty")
        if any(not 0.0 <= v <= 1.0 for v in self.per_fold):
            raise ValueError("per-fold scores must lie in [0, 1]")
        if abs(self.mean - sum(self.per_fold) / len(self.per_fold)) > 1e-12:
            raise ValueError("mean must equal the arithmetic mean of per_fold")
        if self.half_width_kind not in HALF_WIDTH_KINDS:
            raise ValueError(f"half_width_kind must be one of {HALF_WIDTH_KINDS}")


def table_row(label: str, kind: str, report: ScoreReport) -> str:
    """One benchmark-table line: ``<qubit>, <single|both>, <mean> ±<half_width>``."""
    return f"{label}, {kind}, {report.mean:.3f} ±{report.half_width:.4f}"


def _as_label_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D label sequence")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError(f"{name} must contain integers")
    arr = arr.astype(np.int64)
    if arr.min() < 0:
        raise ValueError(f"{name} labels must be nonnegative")
    return arr


def contingency_table(predicted, truth) -> np.ndarray:
    """Square count matrix: entry [c, t] = points with cluster c and class t."""
    pred = _as_label_array(predicted, "predicted")
    true = _as_label_array(truth, "truth")
    if pred.shape != true.shape:
        raise ValueError("predicted and truth must have equal length")
    size = int(max(pred.max(), true.max())) + 1
    flat = np.bincount(pred * size + true, minlength=size * size)
    return flat.reshape(size, size)


def assignment_fidelity(predicted, truth) -> float:
    """Best accuracy over all cluster-to-class relabelings, in [0, 1]."""
    table = contingency_table(predicted, truth)
    n = int(table.sum())
    size = table.shape[0]
    if size <= _EXHAUSTIVE_MAX_CLUSTERS:
        best = max(
            sum(table[c, perm[c]] for c in range(size))
            for perm in itertools.permutations(range(size))
        )
    else:
        rows, cols = linear_sum_assignment(-table)
        best = table[rows, cols].sum()
    return float(best / n)


def _pairs_together(counts: np.ndarray):
    return counts * (counts - 1) // 2


def fowlkes_mallows(predicted, truth) -> float:
    """Pairwise precision/recall geometric mean; 0 when undefined."""
    table = contingency_table(predicted, truth)
    if table.sum() < 2:
        raise ValueError("need at least two points")
    true_positive = int(_pairs_together(table).sum())
    together_pred = int(_pairs_together(table.sum(axis=1)).sum())
    together_true = int(_pairs_together(table.sum(axis=0)).sum())
    if together_pred == 0 or together_true == 0:
        return 0.0
    return float(true_positive / np.sqrt(together_pred * together_true))


def score_labels(metric: str, predicted, truth) -> float:
    if metric == "fidelity":
        return assignment_fidelity(predicted, truth)
    if metric == "fm":
        return fowlkes_mallows(predicted, truth)
    raise ValueError(f"metric must be one of {sorted(METRIC_NAMES)}")


def stratified_folds(labels: np.ndarray, n_splits: int, seed: int) -> list[np.ndarray]:
    """Shuffled per-class round-robin split; returns test-index arrays."""
    labels = _as_label_array(labels, "labels")
    if n_splits < 2:
        raise ValueError("n_splits must be >= 2")
    rng = np.random.default_rng(seed)
    buckets: list[list[int]] = [[] for _ in range(n_splits)]
    for offset, value in enumerate(np.unique(labels)):
        members = np.flatnonzero(labels == value)
        if members.size < n_splits:
            raise ValueError(
                f"class {value} has {members.size} samples; need >= n_splits={n_splits}"
            )
        shuffled = rng.permutation(members)
        for i, idx in enumerate(shuffled):
            buckets[(i + offset) % n_splits].append(int(idx))
    return [np.sort(np.asarray(bucket, dtype=np.int64)) for bucket in buckets]


def cross_validate(
    X: DataSet,
    config: clustering.FitConfig,
    n_splits: int = 10,
    metric: str = "fidelity",
    seed: int = 0,
    half_width: str = "std",
) -> ScoreReport:
    """Stratified k-fold fit/predict/score; deterministic given ``seed``.

    Per fold f the derived seeds are: fold base = derive_seed(seed, f),
    fit seed = derive(base, 0), batch seed = derive(base, 1), predict
    sampling seed = derive(base, 2).
    """
    if metric not in METRIC_NAMES:
        raise ValueError(f"metric must be one of {sorted(METRIC_NAMES)}")
    if half_width not in HALF_WIDTH_KINDS:
        raise ValueError(f"half_width must be one of {HALF_WIDTH_KINDS}")
    folds = stratified_folds(X.labels, n_splits, seed)
    scores = []
    for fold_idx, test_idx in enumerate(folds):
        mask = np.ones(X.n_points, dtype=bool)
        mask[test_idx] = False
        train = DataSet(X.features[mask], X.labels[mask], transform=X.transform)
        test = DataSet(X.features[test_idx], X.labels[test_idx], transform=X.transform)
        base = derive_seed(seed, fold_idx)
        fold_config = replace(
            config,
            seed=derive_seed(base, 0),
            batch=replace(config.batch, seed=derive_seed(base, 1)),
        )
        model = clustering.fit(train, fold_config)
        predicted = clustering.predict(
            model,
            test,
            distance_mode=fold_config.distance_mode,
            batch=fold_config.batch,
            seed=derive_seed(base, 2),
        )
        scores.append(score_labels(metric, predicted, test.labels))
    per_fold = tuple(float(s) for s in scores)
    mean = sum(per_fold) / len(per_fold)
    std = float(np.std(per_fold, ddof=1)) if len(per_fold) > 1 else 0.0
    width = std if half_width == "std" else 1.96 * std / np.sqrt(len(per_fold))
    return ScoreReport(
        metric=METRIC_NAMES[metric],
        per_fold=per_fold,
        mean=float(mean),
        half_width=float(width),
        half_width_kind=half_width,
    )
