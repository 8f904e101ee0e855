"""Lloyd-style k-means over quantum (SwapTest) or Euclidean distances.

One loop serves three distance modes:

* ``quantum_exact``    — SwapTest circuits, exact ancilla marginals
* ``quantum_sampled``  — SwapTest circuits, finite-shot estimates
* ``classical_euclidean`` — plain Euclidean metric (the baseline)

Iteration structure: assign every point to its nearest center (argmin,
ties to the lowest center index), average the assigned raw feature rows
to get new centers, re-encode on the next pass, stop when the L1 sum of
center movement drops below ``tol``.  Quantum modes amplitude-encode
points and centers per distance evaluation; centers always live in the
original feature space.

Initialization is greedy farthest-point seeding ("qkmeans++"): the first
center is a uniformly drawn data point, each next center the point with
the greatest distance to its nearest chosen center (measured in the same
distance mode), ties to the lowest index.

Empty clusters are repaired deterministically: ascending over empty
cluster ids, reassign the not-yet-stolen point with the largest distance
to its own center, considering only donor clusters that keep at least
one member; a cluster that still ends up empty keeps its old center.

Seed discipline: ``config.seed`` drives initialization; quantum shot
noise for init round r uses ``derive_seed(batch.seed, 0, r)`` and for
Lloyd iteration i uses ``derive_seed(batch.seed, 1, i)``, so runs are
reproducible and init/iteration streams never collide.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import DataSet
from .distance import BatchConfig, BatchStats, distance_matrix
from .simulator import derive_seed

DISTANCE_MODES = ("quantum_exact", "quantum_sampled", "classical_euclidean")
INIT_METHODS = ("qkmeans_plusplus", "random_sample")


@dataclass(frozen=True)
class FitConfig:
    n_clusters: int
    max_iter: int = 30
    tol: float = 1e-4
    init: str = "qkmeans_plusplus"
    distance_mode: str = "quantum_exact"
    batch: BatchConfig = field(default_factory=BatchConfig)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_clusters < 1:
            raise ValueError("n_clusters must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.tol >= 0.0:
            raise ValueError("tol must be nonnegative")
        if self.init not in INIT_METHODS:
            raise ValueError(f"init must be one of {INIT_METHODS}")
        if self.distance_mode not in DISTANCE_MODES:
            raise ValueError(f"distance_mode must be one of {DISTANCE_MODES}")


@dataclass(frozen=True)
class ClusterModel:
    """Fitted model. ``inertia_history`` holds the per-iteration L1 center
    shift (Algorithm-style convergence values), one entry per executed
    iteration; ``batch_history`` holds the per-iteration backend stats for
    quantum modes (initialization circuits are not included)."""

    cluster_centers: np.ndarray
    labels: np.ndarray
    inertia_history: tuple[float, ...]
    n_iter: int
    converged: bool
    batch_history: tuple[BatchStats, ...] = ()

    def __post_init__(self) -> None:
        centers = np.asarray(self.cluster_centers, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if not np.all(np.isfinite(centers)):
            raise ValueError("cluster centers must be finite")
        if labels.size and (labels.min() < 0 or labels.max() >= centers.shape[0]):
            raise ValueError("labels must lie in [0, n_clusters)")
        if len(self.inertia_history) != self.n_iter:
            raise ValueError("inertia_history must have one entry per iteration")
        object.__setattr__(self, "cluster_centers", centers)
        object.__setattr__(self, "labels", labels)

    @property
    def n_clusters(self) -> int:
        return int(self.cluster_centers.shape[0])


def _pairwise(
    points: np.ndarray,
    centers: np.ndarray,
    distance_mode: str,
    batch: BatchConfig,
    seed_tag: int,
) -> tuple[np.ndarray, BatchStats | None]:
    """(N, K) distances under the given mode; stats only for quantum modes."""
    if distance_mode == "classical_euclidean":
        diff = points[:, None, :] - centers[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=2)), None
    sampled = distance_mode == "quantum_sampled"
    cfg = replace(batch, seed=seed_tag)
    return distance_matrix(points, centers, strategy="amplitude", config=cfg, sampled=sampled)


def qkmeans_plusplus_init(
    X: DataSet,
    n_clusters: int,
    distance_mode: str = "quantum_exact",
    seed: int = 0,
    batch: BatchConfig | None = None,
) -> np.ndarray:
    """Greedy farthest-point seeding; returns a (K, F) center matrix."""
    if distance_mode not in DISTANCE_MODES:
        raise ValueError(f"distance_mode must be one of {DISTANCE_MODES}")
    n = X.n_points
    if n_clusters < 1 or n < n_clusters:
        raise ValueError("need 1 <= n_clusters <= number of points")
    batch = batch or BatchConfig()
    rng = np.random.default_rng(seed)
    chosen = [int(rng.integers(n))]
    min_dist: np.ndarray | None = None
    for round_idx in range(1, n_clusters):
        newest = X.features[chosen[-1]][None, :]
        dist, _ = _pairwise(
            X.features, newest, distance_mode, batch, derive_seed(batch.seed, 0, round_idx)
        )
        dist = dist[:, 0]
        min_dist = dist if min_dist is None else np.minimum(min_dist, dist)
        masked = min_dist.copy()
        masked[np.asarray(chosen)] = -np.inf
        chosen.append(int(np.argmax(masked)))
    return X.features[np.asarray(chosen)].copy()


def _random_sample_init(X: DataSet, n_clusters: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    picks = rng.choice(X.n_points, size=n_clusters, replace=False)
    return X.features[np.sort(picks)].copy()


def _repair_empty_clusters(labels: np.ndarray, dists: np.ndarray, n_clusters: int) -> np.ndarray:
    """Hand the farthest-from-its-center point to each empty cluster."""
    counts = np.bincount(labels, minlength=n_clusters)
    empties = np.flatnonzero(counts == 0)
    if empties.size == 0:
        return labels
    labels = labels.copy()
    dist_to_own = dists[np.arange(labels.size), labels]
    for k in empties:
        donors = counts[labels] > 1
        if not np.any(donors):
            continue
        j = int(np.argmax(np.where(donors, dist_to_own, -np.inf)))
        counts[labels[j]] -= 1
        labels[j] = k
        counts[k] = 1
        dist_to_own[j] = -np.inf
    return labels


def fit(X: DataSet, config: FitConfig) -> ClusterModel:
    """Run Lloyd iterations until the centers move less than ``tol`` (L1)."""
    n, k = X.n_points, config.n_clusters
    if n == 0:
        raise ValueError("cannot fit an empty dataset")
    if n < k:
        raise ValueError(f"need at least n_clusters={k} points, got {n}")
    if config.init == "qkmeans_plusplus":
        centers = qkmeans_plusplus_init(
            X, k, config.distance_mode, config.seed, config.batch
        )
    else:
        centers = _random_sample_init(X, k, config.seed)

    labels = np.zeros(n, dtype=np.int64)
    history: list[float] = []
    batch_history: list[BatchStats] = []
    converged = False
    for iteration in range(config.max_iter):
        dists, stats = _pairwise(
            X.features, centers, config.distance_mode, config.batch,
            derive_seed(config.batch.seed, 1, iteration),
        )
        if stats is not None:
            batch_history.append(stats)
        labels = _repair_empty_clusters(np.argmin(dists, axis=1), dists, k)
        new_centers = centers.copy()
        for c in range(k):
            members = labels == c
            if np.any(members):
                new_centers[c] = X.features[members].mean(axis=0)
        shift = float(np.sum(np.abs(new_centers - centers)))
        history.append(shift)
        centers = new_centers
        if shift < config.tol:
            converged = True
            break
    return ClusterModel(
        cluster_centers=centers,
        labels=labels,
        inertia_history=tuple(history),
        n_iter=len(history),
        converged=converged,
        batch_history=tuple(batch_history),
    )


def predict(
    model: ClusterModel,
    X: DataSet,
    distance_mode: str = "quantum_exact",
    batch: BatchConfig | None = None,
    seed: int = 0,
) -> np.ndarray:
    """Assign each point of ``X`` to its nearest fitted center."""
    if distance_mode not in DISTANCE_MODES:
        raise ValueError(f"distance_mode must be one of {DISTANCE_MODES}")
    if X.n_features != model.cluster_centers.shape[1]:
        raise ValueError("feature dimension does not match the fitted model")
    batch = batch or BatchConfig()
    dists, _ = _pairwise(X.features, model.cluster_centers, distance_mode, batch, seed)
    return np.argmin(dists, axis=1).astype(np.int64)


def classical_kmeans_oracle(
    X: DataSet,
    n_clusters: int,
    seed: int = 0,
    max_iter: int = 30,
    tol: float = 1e-4,
) -> ClusterModel:
    """Euclidean baseline sharing every rule (init, ties, update) with fit."""
    config = FitConfig(
        n_clusters=n_clusters,
        max_iter=max_iter,
        tol=tol,
        init="qkmeans_plusplus",
        distance_mode="classical_euclidean",
        seed=seed,
    )
    return fit(X, config)
