"""Pure-statevector simulation of the small circuits used by the toolkit.

Conventions (fixed, relied on by every consumer):

* Qubit 0 is the least significant bit of the amplitude index, so basis
  state ``|b_{n-1} ... b_1 b_0>`` lives at index ``sum(b_q << q)``.
* ``RY(theta)`` is the real rotation
  ``[[cos(theta/2), -sin(theta/2)], [sin(theta/2), cos(theta/2)]]``.
* ``CSWAP`` takes its first qubit as control and swaps the other two
  (Fredkin gate).
* ``PREPARE`` injects a normalized amplitude vector directly into a
  register whose qubits must all still be in ``|0>``.  It is amplitude
  injection, not a gate decomposition.
* Randomness flows through ``numpy.random.default_rng`` (PCG64) with an
  explicit seed; nothing reads global RNG state.  ``derive_seed`` is the
  one sanctioned way to fan a base seed out into per-task sub-seeds.

Two execution levels share the same arithmetic kernels: single-state
``apply_gate`` / ``apply_circuit`` for clarity, and ``batch_*`` functions
that run many independent same-shape circuits as one ``(batch, 2**n)``
array.  Results are bit-identical between the two paths; the distance
batcher depends on that.  Intended scale is a dozen qubits or fewer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

NORM_ATOL = 1e-9

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class Gate(Enum):
    H = "h"
    RY = "ry"
    CSWAP = "cswap"
    PREPARE = "prepare"


@dataclass(frozen=True)
class GateOp:
    """One circuit operation: a gate, its qubits, and any parameters."""

    gate: Gate
    qubits: tuple[int, ...]
    theta: float | None = None
    amplitudes: np.ndarray | None = None


def h(qubit: int) -> GateOp:
    return GateOp(Gate.H, (int(qubit),))


def ry(theta: float, qubit: int) -> GateOp:
    return GateOp(Gate.RY, (int(qubit),), theta=float(theta))


def cswap(control: int, target_a: int, target_b: int) -> GateOp:
    return GateOp(Gate.CSWAP, (int(control), int(target_a), int(target_b)))


def prepare(amplitudes: np.ndarray, qubits: tuple[int, ...]) -> GateOp:
    """Amplitude-injection op for ``qubits`` (must be in |0> when applied)."""
    vec = np.asarray(amplitudes, dtype=np.complex128)
    if vec.ndim != 1 or vec.size != 2 ** len(qubits):
        raise ValueError("PREPARE vector length must be 2**len(qubits)")
    if abs(np.sum(vec.real**2 + vec.imag**2) - 1.0) > NORM_ATOL:
        raise ValueError("PREPARE vector must have unit norm within 1e-9")
    vec = vec.copy()
    vec.setflags(write=False)
    return GateOp(Gate.PREPARE, tuple(int(q) for q in qubits), amplitudes=vec)


@dataclass(frozen=True)
class StateVector:
    """Immutable n-qubit state. Amplitude index bit q is qubit q."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size != 2**self.num_qubits:
            raise ValueError("amplitude vector length must be 2**num_qubits")
        if abs(np.sum(amps.real**2 + amps.imag**2) - 1.0) > NORM_ATOL:
            raise ValueError("state norm must be 1 within 1e-9")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True)
class ShotResult:
    """Measurement counts for one ancilla readout. Zero counts are omitted."""

    counts: dict[int, int]
    shots: int

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts must sum to shots")

    def frequency(self, outcome: int) -> float:
        return self.counts.get(outcome, 0) / self.shots


def ground_state(num_qubits: int) -> StateVector:
    if num_qubits < 1:
        raise ValueError("need at least one qubit")
    amps = np.zeros(2**num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def derive_seed(base: int, *indices: int) -> int:
    """Stable hash of a base seed and index path into a fresh 64-bit seed.

    Derivation goes through ``numpy.random.SeedSequence`` so it is
    deterministic across processes and platforms (unlike builtin hash()).
    """
    entropy = [int(base), *(int(i) for i in indices)]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])


# ---------------------------------------------------------------------------
# index caches
# ---------------------------------------------------------------------------


def _check_qubits(num_qubits: int, qubits: tuple[int, ...]) -> None:
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"qubit indices must be distinct, got {qubits}")
    for q in qubits:
        if not 0 <= q < num_qubits:
            raise ValueError(f"qubit {q} out of range for {num_qubits} qubits")


@lru_cache(maxsize=None)
def _axis_indices(num_qubits: int, qubit: int, bit: int) -> np.ndarray:
    idx = np.arange(2**num_qubits)
    out = np.flatnonzero(((idx >> qubit) & 1) == bit)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _cswap_indices(num_qubits: int, control: int, a: int, b: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(2**num_qubits)
    sel = (((idx >> control) & 1) == 1) & (((idx >> a) & 1) == 1) & (((idx >> b) & 1) == 0)
    ia = np.flatnonzero(sel)
    ib = ia - (1 << a) + (1 << b)
    ia.setflags(write=False)
    ib.setflags(write=False)
    return ia, ib


@lru_cache(maxsize=None)
def _prepare_indices(num_qubits: int, qubits: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    """(base, scatter): indices with target bits clear, and the (2**m, len(base))
    index grid hit by each payload component."""
    idx = np.arange(2**num_qubits)
    mask = np.ones(idx.size, dtype=bool)
    for q in qubits:
        mask &= ((idx >> q) & 1) == 0
    base = np.flatnonzero(mask)
    patterns = np.arange(2 ** len(qubits))
    offsets = np.zeros(patterns.size, dtype=np.int64)
    for j, q in enumerate(qubits):
        offsets += ((patterns >> j) & 1) << q
    scatter = base[None, :] + offsets[:, None]
    base.setflags(write=False)
    scatter.setflags(write=False)
    return base, scatter


# ---------------------------------------------------------------------------
# batch kernels: operate in place on (batch, 2**n) complex arrays
# ---------------------------------------------------------------------------


def batch_ground(count: int, num_qubits: int) -> np.ndarray:
    amps = np.zeros((count, 2**num_qubits), dtype=np.complex128)
    amps[:, 0] = 1.0
    return amps


def row_sums(values: np.ndarray) -> np.ndarray:
    """Per-row sum via a fixed binary reduction tree.

    ``np.sum(..., axis=1)`` may pick different accumulation orders for
    different row counts, which breaks bit-identity between one-circuit
    and batched execution; this tree depends only on the column count.
    """
    arr = values
    while arr.shape[1] > 1:
        if arr.shape[1] % 2:
            pad = np.zeros((arr.shape[0], 1), dtype=arr.dtype)
            arr = np.concatenate([arr, pad], axis=1)
        arr = arr[:, 0::2] + arr[:, 1::2]
    return arr[:, 0]


def batch_h(amps: np.ndarray, num_qubits: int, qubit: int) -> np.ndarray:
    _check_qubits(num_qubits, (qubit,))
    i0 = _axis_indices(num_qubits, qubit, 0)
    i1 = i0 + (1 << qubit)
    a0 = amps[:, i0]
    a1 = amps[:, i1]
    amps[:, i0] = (a0 + a1) * _INV_SQRT2
    amps[:, i1] = (a0 - a1) * _INV_SQRT2
    return amps


def batch_ry(amps: np.ndarray, num_qubits: int, qubit: int, theta) -> np.ndarray:
    _check_qubits(num_qubits, (qubit,))
    th = np.asarray(theta, dtype=np.float64)
    c = np.cos(th / 2.0)
    s = np.sin(th / 2.0)
    if c.ndim == 1:
        c = c[:, None]
        s = s[:, None]
    i0 = _axis_indices(num_qubits, qubit, 0)
    i1 = i0 + (1 << qubit)
    a0 = amps[:, i0]
    a1 = amps[:, i1]
    amps[:, i0] = c * a0 - s * a1
    amps[:, i1] = s * a0 + c * a1
    return amps


def batch_cswap(amps: np.ndarray, num_qubits: int, control: int, a: int, b: int) -> np.ndarray:
    _check_qubits(num_qubits, (control, a, b))
    ia, ib = _cswap_indices(num_qubits, control, a, b)
    swapped = amps[:, ib]
    amps[:, ib] = amps[:, ia]
    amps[:, ia] = swapped
    return amps


def batch_prepare(amps: np.ndarray, num_qubits: int, qubits: tuple[int, ...], vectors: np.ndarray) -> np.ndarray:
    """Inject one normalized payload per row into ``qubits`` (all must be |0>)."""
    _check_qubits(num_qubits, qubits)
    vec = np.asarray(vectors, dtype=np.complex128)
    if vec.ndim == 1:
        vec = vec[None, :]
    if vec.shape != (amps.shape[0], 2 ** len(qubits)):
        raise ValueError("payload matrix shape must be (batch, 2**len(qubits))")
    norms = np.sum(vec.real**2 + vec.imag**2, axis=1)
    if np.any(np.abs(norms - 1.0) > NORM_ATOL):
        raise ValueError("PREPARE vector must have unit norm within 1e-9")
    base, scatter = _prepare_indices(num_qubits, qubits)
    base_block = amps[:, base]
    total = np.sum(amps.real**2 + amps.imag**2, axis=1)
    kept = np.sum(base_block.real**2 + base_block.imag**2, axis=1)
    if np.any(total - kept > NORM_ATOL):
        raise ValueError("PREPARE target qubits must be in |0> before injection")
    amps[:, :] = 0.0
    amps[:, scatter.ravel()] = (vec[:, :, None] * base_block[:, None, :]).reshape(amps.shape[0], -1)
    return amps


def batch_marginal(amps: np.ndarray, num_qubits: int, qubit: int, outcome: int) -> np.ndarray:
    """Exact marginal probability of ``qubit == outcome`` for every row."""
    _check_qubits(num_qubits, (qubit,))
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    idx = _axis_indices(num_qubits, qubit, outcome)
    block = amps[:, idx]
    return row_sums(block.real**2 + block.imag**2)


# ---------------------------------------------------------------------------
# single-state interface
# ---------------------------------------------------------------------------


def apply_gate(state: StateVector, op: GateOp) -> StateVector:
    """Apply one op and return the new state (the input is never mutated)."""
    n = state.num_qubits
    buf = state.amplitudes[None, :].copy()
    if op.gate is Gate.H:
        batch_h(buf, n, op.qubits[0])
    elif op.gate is Gate.RY:
        if op.theta is None:
            raise ValueError("RY op needs theta")
        batch_ry(buf, n, op.qubits[0], op.theta)
    elif op.gate is Gate.CSWAP:
        batch_cswap(buf, n, *op.qubits)
    elif op.gate is Gate.PREPARE:
        if op.amplitudes is None:
            raise ValueError("PREPARE op needs amplitudes")
        batch_prepare(buf, n, op.qubits, op.amplitudes)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown gate {op.gate}")
    return StateVector(n, buf[0])


def apply_circuit(state: StateVector, ops) -> StateVector:
    for op in ops:
        state = apply_gate(state, op)
    return state


def exact_probability(state: StateVector, qubit: int, outcome: int) -> float:
    return float(batch_marginal(state.amplitudes[None, :], state.num_qubits, qubit, outcome)[0])


def measure_ancilla(state: StateVector, qubit: int, shots: int, seed: int) -> ShotResult:
    """Sample ``shots`` measurements of one qubit from its exact marginal."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p1 = exact_probability(state, qubit, 1)
    p1 = min(max(p1, 0.0), 1.0)
    rng = np.random.default_rng(seed)
    ones = int(rng.binomial(shots, p1))
    counts = {k: v for k, v in ((0, shots - ones), (1, ones)) if v > 0}
    return ShotResult(counts=counts, shots=shots)
