"""SwapTest overlap estimation and the quantum distance metric.

Circuit layout for registers of m qubits: qubit 0 is the ancilla, qubits
1..m hold the left state, qubits m+1..2m the right state.  After
H(0), CSWAP(0, 1+i, 1+m+i) for each register position, H(0), the ancilla
measures 0 with probability  1/2 + |<x|y>|^2 / 2.

From an (estimated or exact) ancilla-zero probability p0:

    overlap_sq = clip(2*p0 - 1, 0, 1)
    distance   = sqrt(2 - 2*sqrt(overlap_sq))        in [0, sqrt(2)]

The batched executor packs many independent pairs into (batch, 2**n)
arrays, grouping by (strategy, feature length) and splitting each group
into jobs of at most ``max_circuits_per_job`` circuits.  Results are
bit-identical to the one-pair path and do not depend on the grouping:
in sampled mode every request draws from its own generator seeded by
``derive_seed(config.seed, request_index)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .encoding import EncodedState, encode, encode_matrix, padded_dimension
from .simulator import (
    GateOp,
    apply_circuit,
    batch_cswap,
    batch_ground,
    batch_h,
    batch_marginal,
    batch_prepare,
    batch_ry,
    cswap,
    derive_seed,
    exact_probability,
    ground_state,
    h,
    measure_ancilla,
)

MAX_DISTANCE = math.sqrt(2.0)


@dataclass(frozen=True)
class DistanceRequest:
    """One left/right pair of raw (unencoded) feature vectors."""

    left: np.ndarray
    right: np.ndarray
    strategy: str = "amplitude"


@dataclass(frozen=True)
class BatchConfig:
    """Execution budget for the batched backend."""

    max_circuits_per_job: int = 900
    shots_per_circuit: int = 1024
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_circuits_per_job < 1:
            raise ValueError("max_circuits_per_job must be >= 1")
        if self.shots_per_circuit < 1:
            raise ValueError("shots_per_circuit must be >= 1")


@dataclass(frozen=True)
class BatchStats:
    """Accounting for one executor call: how many jobs and circuits ran."""

    jobs_submitted: int
    circuits_executed: int


def overlap_squared(p0):
    """|<x|y>|^2 implied by an ancilla-zero probability, clipped into [0, 1]."""
    return np.clip(2.0 * p0 - 1.0, 0.0, 1.0)


def distance_from_overlap_sq(ov_sq):
    return np.sqrt(2.0 - 2.0 * np.sqrt(ov_sq))


def distance_from_p0(p0):
    return distance_from_overlap_sq(overlap_squared(p0))


def swap_test_ops(left: EncodedState, right: EncodedState) -> tuple[list[GateOp], int]:
    """Full SwapTest op list and total qubit count for two encoded states."""
    if left.strategy != right.strategy:
        raise ValueError("both states must use the same encoding strategy")
    if left.num_qubits != right.num_qubits:
        raise ValueError("both states must occupy registers of equal size")
    m = left.num_qubits
    a_reg = tuple(range(1, m + 1))
    b_reg = tuple(range(m + 1, 2 * m + 1))
    ops = [*left.prep_ops(a_reg), *right.prep_ops(b_reg), h(0)]
    ops.extend(cswap(0, 1 + i, 1 + m + i) for i in range(m))
    ops.append(h(0))
    return ops, 1 + 2 * m


def swap_test_state(left: EncodedState, right: EncodedState):
    ops, n = swap_test_ops(left, right)
    return apply_circuit(ground_state(n), ops)


def exact_ancilla_p0(left: EncodedState, right: EncodedState) -> float:
    return exact_probability(swap_test_state(left, right), 0, 0)


def quantum_distance(
    x: np.ndarray,
    y: np.ndarray,
    strategy: str = "amplitude",
    shots: int | None = None,
    seed: int = 0,
) -> float:
    """Distance between two raw vectors via one explicitly simulated SwapTest.

    ``shots=None`` reads the exact ancilla marginal; an integer samples it.
    """
    state = swap_test_state(encode(x, strategy), encode(y, strategy))
    if shots is None:
        p0 = exact_probability(state, 0, 0)
    else:
        p0 = measure_ancilla(state, 0, shots, seed).frequency(0)
    return float(distance_from_p0(p0))


def euclidean_distance(x: np.ndarray, y: np.ndarray) -> float:
    diff = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    return float(np.sqrt(np.sum(diff * diff)))


# ---------------------------------------------------------------------------
# batched execution
# ---------------------------------------------------------------------------


def _run_group(
    left_mat: np.ndarray,
    right_mat: np.ndarray,
    strategy: str,
    config: BatchConfig,
    sampled: bool,
    request_indices: np.ndarray,
) -> tuple[np.ndarray, int]:
    """Execute one same-shape group job by job; returns (p0 estimates, jobs)."""
    total = left_mat.shape[0]
    if strategy == "angle":
        m = 1
    else:
        m = int(np.log2(padded_dimension(left_mat.shape[1])))
    n = 1 + 2 * m
    a_reg = tuple(range(1, m + 1))
    b_reg = tuple(range(m + 1, 2 * m + 1))
    p0_hat = np.empty(total, dtype=np.float64)
    jobs = 0
    for start in range(0, total, config.max_circuits_per_job):
        stop = min(start + config.max_circuits_per_job, total)
        jobs += 1
        rows = stop - start
        enc_left = encode_matrix(left_mat[start:stop], strategy)
        enc_right = encode_matrix(right_mat[start:stop], strategy)
        amps = batch_ground(rows, n)
        if strategy == "angle":
            batch_ry(amps, n, a_reg[0], 2.0 * np.arctan2(enc_left[:, 1].real, enc_left[:, 0].real))
            batch_ry(amps, n, b_reg[0], 2.0 * np.arctan2(enc_right[:, 1].real, enc_right[:, 0].real))
        else:
            batch_prepare(amps, n, a_reg, enc_left)
            batch_prepare(amps, n, b_reg, enc_right)
        batch_h(amps, n, 0)
        for i in range(m):
            batch_cswap(amps, n, 0, 1 + i, 1 + m + i)
        batch_h(amps, n, 0)
        if sampled:
            p1 = np.clip(batch_marginal(amps, n, 0, 1), 0.0, 1.0)
            shots = config.shots_per_circuit
            for j in range(rows):
                rng = np.random.default_rng(derive_seed(config.seed, int(request_indices[start + j])))
                ones = int(rng.binomial(shots, p1[j]))
                p0_hat[start + j] = (shots - ones) / shots
        else:
            p0_hat[start:stop] = batch_marginal(amps, n, 0, 0)
    return p0_hat, jobs


def _execute_pairs(
    left_mat: np.ndarray,
    right_mat: np.ndarray,
    strategy: str,
    config: BatchConfig,
    sampled: bool,
) -> tuple[np.ndarray, BatchStats]:
    left_mat = np.asarray(left_mat, dtype=np.float64)
    right_mat = np.asarray(right_mat, dtype=np.float64)
    if left_mat.shape != right_mat.shape or left_mat.ndim != 2:
        raise ValueError("left and right matrices must share a (pairs, features) shape")
    indices = np.arange(left_mat.shape[0])
    p0, jobs = _run_group(left_mat, right_mat, strategy, config, sampled, indices)
    stats = BatchStats(jobs_submitted=jobs, circuits_executed=left_mat.shape[0])
    return distance_from_p0(p0), stats


def estimate_distances(
    requests: Sequence[DistanceRequest],
    config: BatchConfig | None = None,
    sampled: bool = False,
) -> tuple[np.ndarray, BatchStats]:
    """Run every request through the batched backend.

    Requests are grouped by (strategy, feature length); each group is cut
    into jobs of at most ``config.max_circuits_per_job`` circuits.  Result
    i depends only on request i (and config), never on its neighbours.
    """
    config = config or BatchConfig()
    groups: dict[tuple[str, int], list[int]] = {}
    for i, req in enumerate(requests):
        left = np.asarray(req.left, dtype=np.float64)
        right = np.asarray(req.right, dtype=np.float64)
        if left.ndim != 1 or left.shape != right.shape:
            raise ValueError(f"request {i}: left/right must be 1-D vectors of equal length")
        groups.setdefault((req.strategy, left.size), []).append(i)
    out = np.empty(len(requests), dtype=np.float64)
    jobs = 0
    for (strategy, _size), idx_list in groups.items():
        idx = np.asarray(idx_list)
        left_mat = np.stack([np.asarray(requests[i].left, dtype=np.float64) for i in idx_list])
        right_mat = np.stack([np.asarray(requests[i].right, dtype=np.float64) for i in idx_list])
        p0, group_jobs = _run_group(left_mat, right_mat, strategy, config, sampled, idx)
        out[idx] = distance_from_p0(p0)
        jobs += group_jobs
    return out, BatchStats(jobs_submitted=jobs, circuits_executed=len(requests))


def distance_matrix(
    points: np.ndarray,
    centers: np.ndarray,
    strategy: str = "amplitude",
    config: BatchConfig | None = None,
    sampled: bool = False,
) -> tuple[np.ndarray, BatchStats]:
    """All point-to-center distances as an (N, K) matrix.

    Equivalent to ``estimate_distances`` over the row-major list of
    (point i, center k) requests — including per-request sampling seeds —
    but without materialising the request objects.
    """
    config = config or BatchConfig()
    pts = np.asarray(points, dtype=np.float64)
    ctr = np.asarray(centers, dtype=np.float64)
    if pts.ndim != 2 or ctr.ndim != 2 or pts.shape[1] != ctr.shape[1]:
        raise ValueError("points and centers must be 2-D with matching feature counts")
    n_pts, k = pts.shape[0], ctr.shape[0]
    left = np.repeat(pts, k, axis=0)
    right = np.tile(ctr, (n_pts, 1))
    dists, stats = _execute_pairs(left, right, strategy, config, sampled)
    return dists.reshape(n_pts, k), stats
