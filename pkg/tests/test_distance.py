"""SwapTest distance and batched-executor tests."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qkmeans.distance import (
    MAX_DISTANCE,
    BatchConfig,
    BatchStats,
    DistanceRequest,
    distance_from_p0,
    distance_matrix,
    estimate_distances,
    euclidean_distance,
    exact_ancilla_p0,
    overlap_squared,
    quantum_distance,
    swap_test_ops,
    swap_test_state,
)
from qkmeans.encoding import amplitude_encode, angle_encode

vectors = st.lists(
    st.floats(-50.0, 50.0).filter(lambda v: abs(v) > 1e-3),
    min_size=1,
    max_size=8,
)


def oracle_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Inner-product form of the metric, computed without any circuit."""
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    overlap = abs(xv @ yv) / (np.linalg.norm(xv) * np.linalg.norm(yv))
    return float(np.sqrt(2.0 - 2.0 * overlap))


class TestSwapTestCircuit:
    def test_known_p0_for_plus_state_pair(self):
        # |0> against (|0>+|1>)/sqrt(2): overlap^2 = 1/2 so p0 = 3/4.
        left = amplitude_encode(np.array([1.0, 0.0]))
        right = amplitude_encode(np.array([1.0, 1.0]))
        assert exact_ancilla_p0(left, right) == pytest.approx(0.75, abs=1e-12)

    def test_ops_layout(self):
        left = amplitude_encode(np.array([1.0, 2.0, 3.0, 4.0]))
        right = amplitude_encode(np.array([4.0, 3.0, 2.0, 1.0]))
        ops, n = swap_test_ops(left, right)
        assert n == 5  # ancilla + two 2-qubit registers
        # two preparations, H, one CSWAP per register qubit, H
        assert len(ops) == 2 + 1 + 2 + 1
        assert ops[-1].qubits == (0,)

    def test_rejects_mixed_strategies(self):
        with pytest.raises(ValueError):
            swap_test_ops(
                amplitude_encode(np.array([1.0, 1.0])),
                angle_encode(np.array([1.0, 1.0])),
            )

    def test_rejects_mixed_register_sizes(self):
        with pytest.raises(ValueError):
            swap_test_ops(
                amplitude_encode(np.array([1.0, 1.0])),
                amplitude_encode(np.array([1.0, 1.0, 1.0])),
            )

    def test_state_norm(self):
        state = swap_test_state(
            amplitude_encode(np.array([1.0, -2.0, 0.5])),
            amplitude_encode(np.array([0.3, 0.3, 4.0])),
        )
        assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-9


class TestScalarDistance:
    def test_matches_inner_product_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            x = rng.normal(size=5)
            y = rng.normal(size=5)
            d = quantum_distance(x, y)
            assert d == pytest.approx(oracle_distance(x, y), abs=1e-9)

    def test_known_value_for_orthogonal_pair(self):
        d = quantum_distance(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        assert d == pytest.approx(MAX_DISTANCE, abs=1e-7)

    def test_known_value_for_plus_pair(self):
        d = quantum_distance(np.array([1.0, 0.0]), np.array([1.0, 1.0]))
        assert d == pytest.approx(np.sqrt(2.0 - np.sqrt(2.0)), abs=1e-9)

    def test_identical_vectors_give_zero(self):
        v = np.array([0.2, -1.4, 3.3])
        assert quantum_distance(v, v) == pytest.approx(0.0, abs=1e-7)

    def test_sampled_mode_is_deterministic(self):
        x = np.array([1.0, 0.0])
        y = np.array([1.0, 1.0])
        a = quantum_distance(x, y, shots=512, seed=9)
        b = quantum_distance(x, y, shots=512, seed=9)
        assert a == b
        assert a != quantum_distance(x, y, shots=512, seed=10)

    def test_sampled_mode_converges(self):
        x = np.array([1.0, 0.0])
        y = np.array([1.0, 1.0])
        d = quantum_distance(x, y, shots=200_000, seed=4)
        assert d == pytest.approx(oracle_distance(x, y), abs=0.01)

    def test_angle_strategy_uses_ray_angle(self):
        # angle encoding sees only the direction of a nonnegative 2-vector
        d = quantum_distance(
            np.array([1.0, 1.0]), np.array([2.0, 2.0]), strategy="angle"
        )
        assert d == pytest.approx(0.0, abs=1e-7)

    @given(vectors, vectors, st.booleans())
    def test_distance_stays_in_range(self, xs, ys, sampled):
        size = min(len(xs), len(ys))
        x = np.array(xs[:size])
        y = np.array(ys[:size])
        d = quantum_distance(x, y, shots=64 if sampled else None, seed=1)
        assert 0.0 <= d <= MAX_DISTANCE + 1e-12

    def test_symmetry(self):
        rng = np.random.default_rng(23)
        x = rng.normal(size=4)
        y = rng.normal(size=4)
        assert quantum_distance(x, y) == pytest.approx(
            quantum_distance(y, x), abs=1e-12
        )

    def test_euclidean_matches_numpy(self):
        x = np.array([1.0, 2.0, 3.0])
        y = np.array([-1.0, 0.5, 3.0])
        assert euclidean_distance(x, y) == pytest.approx(np.linalg.norm(x - y))


class TestConversions:
    def test_overlap_squared_clips(self):
        assert overlap_squared(0.3) == 0.0
        assert overlap_squared(1.2) == 1.0
        assert overlap_squared(0.75) == pytest.approx(0.5)

    def test_distance_from_p0_endpoints(self):
        assert distance_from_p0(1.0) == 0.0
        assert distance_from_p0(0.5) == pytest.approx(MAX_DISTANCE)


class TestBatchedExecutor:
    def test_matches_single_circuit_exactly(self):
        rng = np.random.default_rng(2)
        requests = [
            DistanceRequest(rng.normal(size=3), rng.normal(size=3))
            for _ in range(25)
        ]
        dists, stats = estimate_distances(requests, BatchConfig(max_circuits_per_job=7))
        singles = np.array([quantum_distance(r.left, r.right) for r in requests])
        np.testing.assert_array_equal(dists, singles)
        assert stats.jobs_submitted == 4  # ceil(25 / 7)
        assert stats.circuits_executed == 25

    def test_matches_single_circuit_sampled(self):
        rng = np.random.default_rng(3)
        config = BatchConfig(max_circuits_per_job=5, shots_per_circuit=256, seed=11)
        requests = [
            DistanceRequest(rng.normal(size=4), rng.normal(size=4))
            for _ in range(12)
        ]
        dists, _ = estimate_distances(requests, config, sampled=True)
        from qkmeans.simulator import derive_seed

        singles = np.array(
            [
                quantum_distance(
                    r.left, r.right, shots=256, seed=derive_seed(11, i)
                )
                for i, r in enumerate(requests)
            ]
        )
        np.testing.assert_array_equal(dists, singles)

    def test_results_independent_of_job_size(self):
        rng = np.random.default_rng(4)
        requests = [
            DistanceRequest(rng.normal(size=5), rng.normal(size=5))
            for _ in range(30)
        ]
        small, _ = estimate_distances(requests, BatchConfig(max_circuits_per_job=1))
        large, _ = estimate_distances(requests, BatchConfig(max_circuits_per_job=900))
        np.testing.assert_array_equal(small, large)

    def test_results_independent_of_job_size_sampled(self):
        rng = np.random.default_rng(5)
        requests = [
            DistanceRequest(rng.normal(size=2), rng.normal(size=2))
            for _ in range(20)
        ]
        a, _ = estimate_distances(
            requests, BatchConfig(max_circuits_per_job=3, seed=7), sampled=True
        )
        b, _ = estimate_distances(
            requests, BatchConfig(max_circuits_per_job=19, seed=7), sampled=True
        )
        np.testing.assert_array_equal(a, b)

    def test_mixed_groups_keep_request_order(self):
        rng = np.random.default_rng(6)
        requests = [
            DistanceRequest(rng.normal(size=2), rng.normal(size=2)),
            DistanceRequest(rng.normal(size=6), rng.normal(size=6)),
            DistanceRequest(
                rng.uniform(0.1, 1.0, 2), rng.uniform(0.1, 1.0, 2), strategy="angle"
            ),
            DistanceRequest(rng.normal(size=2), rng.normal(size=2)),
        ]
        dists, stats = estimate_distances(requests)
        for i, r in enumerate(requests):
            assert dists[i] == quantum_distance(r.left, r.right, strategy=r.strategy)
        # three distinct (strategy, length) groups, each one job
        assert stats.jobs_submitted == 3
        assert stats.circuits_executed == 4

    def test_mixed_group_job_accounting(self):
        rng = np.random.default_rng(7)
        requests = [
            DistanceRequest(rng.normal(size=2), rng.normal(size=2)) for _ in range(5)
        ] + [
            DistanceRequest(rng.normal(size=3), rng.normal(size=3)) for _ in range(3)
        ]
        _, stats = estimate_distances(requests, BatchConfig(max_circuits_per_job=2))
        assert stats.jobs_submitted == 3 + 2  # ceil(5/2) + ceil(3/2)

    def test_appending_requests_leaves_earlier_results_alone(self):
        # sampled seeds are a function of (config.seed, request index), so a
        # longer request list reproduces the shorter list's results exactly
        rng = np.random.default_rng(8)
        base = [
            DistanceRequest(rng.normal(size=3), rng.normal(size=3)) for _ in range(6)
        ]
        extra = base + [DistanceRequest(rng.normal(size=3), rng.normal(size=3))]
        config = BatchConfig(shots_per_circuit=128, seed=21)
        short, _ = estimate_distances(base, config, sampled=True)
        long, _ = estimate_distances(extra, config, sampled=True)
        np.testing.assert_array_equal(short, long[:6])

    def test_rejects_mismatched_pair(self):
        with pytest.raises(ValueError):
            estimate_distances(
                [DistanceRequest(np.ones(2), np.ones(3))], BatchConfig()
            )


class TestDistanceMatrix:
    def test_matches_request_list(self):
        rng = np.random.default_rng(9)
        pts = rng.normal(size=(6, 3))
        ctr = rng.normal(size=(2, 3))
        config = BatchConfig(max_circuits_per_job=5, seed=13)
        mat, mat_stats = distance_matrix(pts, ctr, config=config, sampled=True)
        requests = [
            DistanceRequest(pts[i], ctr[k]) for i in range(6) for k in range(2)
        ]
        flat, flat_stats = estimate_distances(requests, config, sampled=True)
        np.testing.assert_array_equal(mat.ravel(), flat)
        assert mat_stats == flat_stats == BatchStats(3, 12)

    def test_exact_matrix_matches_oracle(self):
        rng = np.random.default_rng(10)
        pts = rng.normal(size=(8, 4))
        ctr = rng.normal(size=(3, 4))
        mat, _ = distance_matrix(pts, ctr)
        for i in range(8):
            for k in range(3):
                assert mat[i, k] == pytest.approx(
                    oracle_distance(pts[i], ctr[k]), abs=1e-9
                )

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            distance_matrix(np.ones((4, 2)), np.ones((2, 3)))


class TestBatchConfig:
    def test_rejects_nonpositive_job_size(self):
        with pytest.raises(ValueError):
            BatchConfig(max_circuits_per_job=0)

    def test_rejects_nonpositive_shots(self):
        with pytest.raises(ValueError):
            BatchConfig(shots_per_circuit=0)
