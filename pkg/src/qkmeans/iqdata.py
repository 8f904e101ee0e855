"""Synthetic single-shot IQ readout data for coupled qubit pairs.

For every coupled pair (a, b) the generator runs the four two-qubit
preparation schedules "00", "01", "10", "11", written so that the
rightmost character is the state bit of the lower-indexed qubit (the
pair's first qubit is the least significant bit).  Each schedule yields
``shots_per_schedule`` (I, Q) samples per qubit, drawn around that
qubit's ground or excited center with per-feature spread.

Readout crosstalk is injected through two effects controlled by the
ordered coupling strength ``kappa[(victim, aggressor)]``:

* a center shift of ``0.25 * kappa * (excited - ground)`` applied to the
  victim in schedules where the aggressor is excited, and
* a pair-wide latent component, one value per shot index shared by all
  schedules, mixed into the victim's noise with weight
  ``CROSSTALK_LATENT_GAIN * kappa``.  Shared across schedules it models
  slow shot-synchronous drift and is what makes excited-vs-ground
  schedule correlations measurable; the resulting Pearson coefficient is
  exactly lambda^2 / (1 + lambda^2) with lambda = gain * kappa.

For 32 shots and above, the per-pair noise table (16 independent columns
+ 1 latent) is orthonormalized against the constant vector and rescaled
to unit sample deviation, so sample means, variances and cross
correlations hit their nominal values exactly: kappa = 0 produces
exactly zero named correlations, not merely small ones.

Assembled per-qubit datasets go through a fitted ``ReadoutFrame`` before
clustering; the frame is recorded on the dataset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import DataSet, fit_readout_frame
from .errors import ConfigError, DataError
from .simulator import derive_seed

SCHEDULES = ("00", "01", "10", "11")
CROSSTALK_LATENT_GAIN = 1.8
EXCITED_SHIFT_FRACTION = 0.25
_ORTHOGONALIZE_MIN_SHOTS = 32
_NOISE_COLUMNS = 17  # 2 qubits x 4 schedules x 2 features, + 1 shared latent


@dataclass(frozen=True)
class QubitReadoutSpec:
    """Ground/excited IQ centers and per-feature spread for one qubit."""

    ground_center: tuple[float, float]
    excited_center: tuple[float, float]
    cluster_stddev: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self) -> None:
        for name in ("ground_center", "excited_center", "cluster_stddev"):
            value = tuple(float(v) for v in getattr(self, name))
            if len(value) != 2 or not all(math.isfinite(v) for v in value):
                raise ConfigError(f"{name} must be two finite numbers")
            object.__setattr__(self, name, value)
        if any(v <= 0 for v in self.cluster_stddev):
            raise ConfigError("cluster_stddev entries must be positive")


@dataclass(frozen=True)
class ReadoutModel:
    """Per-qubit readout response plus ordered pairwise coupling strengths.

    ``crosstalk[(i, j)]`` perturbs qubit i when neighbor j is excited.
    """

    device: str
    qubits: dict[int, QubitReadoutSpec]
    crosstalk: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for (victim, aggressor), kappa in self.crosstalk.items():
            if victim == aggressor:
                raise ConfigError("crosstalk pairs must involve two distinct qubits")
            if victim not in self.qubits or aggressor not in self.qubits:
                raise ConfigError(f"crosstalk pair ({victim}, {aggressor}) not in model qubits")
            if not 0.0 <= kappa <= 1.0:
                raise ConfigError("coupling strength must lie in [0, 1]")

    def coupling_strength(self, victim: int, aggressor: int) -> float:
        return self.crosstalk.get((victim, aggressor), 0.0)


@dataclass(frozen=True)
class QubitInfo:
    """Informational device metadata (not used by the generator)."""

    frequency_ghz: float
    readout_error: float


@dataclass(frozen=True)
class CouplingMap:
    device: str
    edges: tuple[tuple[int, int], ...]
    qubits: dict[int, QubitInfo] = field(default_factory=dict)

    def __post_init__(self) -> None:
        edges = tuple((int(a), int(b)) for a, b in self.edges)
        for a, b in edges:
            if a == b:
                raise ConfigError("coupling edges must connect distinct qubits")
            if a > b:
                raise ConfigError("coupling edges must list the lower qubit first")
        if len(set(edges)) != len(edges):
            raise ConfigError("duplicate coupling edge")
        object.__setattr__(self, "edges", edges)


@dataclass(frozen=True)
class IQShotTable:
    """Column-oriented shot records, canonically ordered and key-unique.

    Keyed by (pair_first, pair_second, qubit, schedule, shot); a qubit
    belonging to two couplings appears once per pair, which is why the
    pair columns are part of the key.
    """

    device: str
    pair_first: np.ndarray
    pair_second: np.ndarray
    qubit: np.ndarray
    schedule: np.ndarray
    shot: np.ndarray
    i_value: np.ndarray
    q_value: np.ndarray

    def __post_init__(self) -> None:
        pf = np.asarray(self.pair_first, dtype=np.int64)
        ps = np.asarray(self.pair_second, dtype=np.int64)
        qb = np.asarray(self.qubit, dtype=np.int64)
        sched = np.asarray(self.schedule, dtype="U2")
        shot = np.asarray(self.shot, dtype=np.int64)
        i_val = np.asarray(self.i_value, dtype=np.float64)
        q_val = np.asarray(self.q_value, dtype=np.float64)
        n = pf.shape[0]
        for name, arr in (
            ("pair_second", ps), ("qubit", qb), ("schedule", sched),
            ("shot", shot), ("i_value", i_val), ("q_value", q_val),
        ):
            if arr.shape != (n,):
                raise DataError(f"column {name} must match pair_first length")
        if n:
            if not (np.all(np.isfinite(i_val)) and np.all(np.isfinite(q_val))):
                raise DataError("i/q values must be finite")
            valid = np.isin(sched, SCHEDULES)
            if not np.all(valid):
                raise DataError(f"invalid schedule string {sched[~valid][0]!r}")
            order = np.lexsort((shot, sched, qb, ps, pf))
            pf, ps, qb = pf[order], ps[order], qb[order]
            sched, shot = sched[order], shot[order]
            i_val, q_val = i_val[order], q_val[order]
            keys = np.stack([pf, ps, qb, shot], axis=1)
            same = np.all(keys[1:] == keys[:-1], axis=1) & (sched[1:] == sched[:-1])
            if np.any(same):
                j = int(np.flatnonzero(same)[0])
                raise DataError(
                    "duplicate shot key "
                    f"(pair {pf[j]}-{ps[j]}, qubit {qb[j]}, schedule {sched[j]}, shot {shot[j]})"
                )
        for name, arr in (
            ("pair_first", pf), ("pair_second", ps), ("qubit", qb),
            ("schedule", sched), ("shot", shot), ("i_value", i_val), ("q_value", q_val),
        ):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return int(self.pair_first.shape[0])

    def pairs(self) -> tuple[tuple[int, int], ...]:
        if len(self) == 0:
            return ()
        stacked = np.stack([self.pair_first, self.pair_second], axis=1)
        uniq = np.unique(stacked, axis=0)
        return tuple((int(a), int(b)) for a, b in uniq)

    def schedules_for(self, pair: tuple[int, int]) -> tuple[str, ...]:
        mask = (self.pair_first == pair[0]) & (self.pair_second == pair[1])
        return tuple(np.unique(self.schedule[mask]))

    def values(self, pair: tuple[int, int], qubit: int, schedule: str, feature: str) -> np.ndarray:
        """Shot-ordered I or Q samples for one (pair, qubit, schedule) slice."""
        if feature not in ("i", "q"):
            raise ValueError("feature must be 'i' or 'q'")
        mask = (
            (self.pair_first == pair[0])
            & (self.pair_second == pair[1])
            & (self.qubit == qubit)
            & (self.schedule == schedule)
        )
        column = self.i_value if feature == "i" else self.q_value
        return column[mask]


def empty_table(device: str = "") -> IQShotTable:
    z_int = np.zeros(0, dtype=np.int64)
    return IQShotTable(
        device=device,
        pair_first=z_int,
        pair_second=z_int.copy(),
        qubit=z_int.copy(),
        schedule=np.zeros(0, dtype="U2"),
        shot=z_int.copy(),
        i_value=np.zeros(0, dtype=np.float64),
        q_value=np.zeros(0, dtype=np.float64),
    )


def _noise_columns(rng: np.random.Generator, shots: int) -> np.ndarray:
    """(shots, 17) noise table; exactly whitened when enough shots."""
    raw = rng.standard_normal((shots, _NOISE_COLUMNS))
    if shots < _ORTHOGONALIZE_MIN_SHOTS:
        return raw
    basis = np.column_stack([np.ones(shots), raw])
    q, _ = np.linalg.qr(basis)
    return q[:, 1:] * np.sqrt(shots - 1.0)


def synthesize(
    model: ReadoutModel,
    coupling: CouplingMap,
    shots_per_schedule: int = 1024,
    seed: int = 0,
) -> IQShotTable:
    """Generate the full shot table for every coupled pair; pure in ``seed``."""
    if shots_per_schedule < 1:
        raise ConfigError("shots_per_schedule must be >= 1")
    for a, b in coupling.edges:
        if a not in model.qubits or b not in model.qubits:
            raise ConfigError(f"readout model does not cover coupling ({a}, {b})")
    shots = shots_per_schedule
    columns: dict[str, list[np.ndarray]] = {k: [] for k in (
        "pair_first", "pair_second", "qubit", "schedule", "shot", "i_value", "q_value")}
    shot_idx = np.arange(shots, dtype=np.int64)
    for a, b in coupling.edges:
        rng = np.random.default_rng(derive_seed(seed, a, b))
        noise = _noise_columns(rng, shots)
        latent = noise[:, 16]
        for pos, (q, neighbor) in enumerate(((a, b), (b, a))):
            spec = model.qubits[q]
            kappa = model.coupling_strength(q, neighbor)
            lam = CROSSTALK_LATENT_GAIN * kappa
            ground = np.asarray(spec.ground_center)
            excited = np.asarray(spec.excited_center)
            stddev = np.asarray(spec.cluster_stddev)
            shift = EXCITED_SHIFT_FRACTION * kappa * (excited - ground)
            for s_idx, sched in enumerate(SCHEDULES):
                own_bit = int(sched[1 - pos])
                neighbor_bit = int(sched[pos])
                center = excited if own_bit else ground
                offset = shift if neighbor_bit else np.zeros(2)
                base = noise[:, pos * 8 + s_idx * 2 : pos * 8 + s_idx * 2 + 2]
                samples = center + stddev * (base + lam * latent[:, None]) + offset
                columns["pair_first"].append(np.full(shots, a, dtype=np.int64))
                columns["pair_second"].append(np.full(shots, b, dtype=np.int64))
                columns["qubit"].append(np.full(shots, q, dtype=np.int64))
                columns["schedule"].append(np.full(shots, sched, dtype="U2"))
                columns["shot"].append(shot_idx)
                columns["i_value"].append(samples[:, 0])
                columns["q_value"].append(samples[:, 1])
    if not columns["pair_first"]:
        return empty_table(model.device)
    return IQShotTable(
        device=model.device,
        **{k: np.concatenate(v) for k, v in columns.items()},
    )


def assemble_datasets(
    table: IQShotTable, qubit: int, pair: tuple[int, int]
) -> tuple[DataSet, DataSet]:
    """(single, both) labeled datasets for one qubit of one coupled pair.

    single: the two schedules with the neighbor in ground (2 * shots
    points); both: all four schedules (4 * shots points).  Labels are the
    qubit's own state bit.  Features pass through a freshly fitted
    ReadoutFrame, recorded on each dataset.
    """
    pair = (int(pair[0]), int(pair[1]))
    if qubit not in pair:
        raise DataError(f"qubit {qubit} is not part of pair {pair}")
    present = table.schedules_for(pair)
    missing = [s for s in SCHEDULES if s not in present]
    if missing:
        raise DataError(f"pair {pair} is missing schedules {missing}")
    pos = pair.index(qubit)

    def gather(schedules: tuple[str, ...]) -> DataSet:
        feats, labels = [], []
        for sched in schedules:
            i_vals = table.values(pair, qubit, sched, "i")
            q_vals = table.values(pair, qubit, sched, "q")
            feats.append(np.column_stack([i_vals, q_vals]))
            labels.append(np.full(i_vals.shape[0], int(sched[1 - pos]), dtype=np.int64))
        raw = np.concatenate(feats)
        frame = fit_readout_frame(raw)
        return DataSet(frame.apply(raw), np.concatenate(labels), transform=frame)

    ground_neighbor = tuple(s for s in SCHEDULES if s[pos] == "0")
    return gather(ground_neighbor), gather(SCHEDULES)


# ---------------------------------------------------------------------------
# file round trip
# ---------------------------------------------------------------------------

_HEADER = "pair,qubit,schedule,shot,i,q"


def save_table(table: IQShotTable, path, format: str = "csv") -> None:
    if format != "csv":
        raise ConfigError(f"unsupported table format {format!r}")
    lines = [f"# device: {table.device}", _HEADER]
    for row in range(len(table)):
        lines.append(
            f"{table.pair_first[row]}-{table.pair_second[row]},"
            f"{table.qubit[row]},{table.schedule[row]},{table.shot[row]},"
            f"{repr(float(table.i_value[row]))},{repr(float(table.q_value[row]))}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_table(path, format: str = "csv") -> IQShotTable:
    if format != "csv":
        raise ConfigError(f"unsupported table format {format!r}")
    with open(path, "r", encoding="utf-8") as fh:
        raw_lines = fh.read().splitlines()
    device = ""
    rows: dict[str, list] = {k: [] for k in (
        "pair_first", "pair_second", "qubit", "schedule", "shot", "i_value", "q_value")}
    header_seen = False
    for lineno, line in enumerate(raw_lines, start=1):
        text = line.strip()
        if not text:
            continue
        if text.startswith("#"):
            body = text.lstrip("#").strip()
            if body.startswith("device:"):
                device = body[len("device:"):].strip()
            continue
        if not header_seen:
            if text != _HEADER:
                raise DataError(f"line {lineno}: expected header {_HEADER!r}, got {text!r}")
            header_seen = True
            continue
        parts = text.split(",")
        if len(parts) != 6:
            raise DataError(f"line {lineno}: expected 6 fields, got {len(parts)}")
        try:
            pair_a, _, pair_b = parts[0].partition("-")
            rows["pair_first"].append(int(pair_a))
            rows["pair_second"].append(int(pair_b))
            rows["qubit"].append(int(parts[1]))
            rows["schedule"].append(parts[2])
            rows["shot"].append(int(parts[3]))
            rows["i_value"].append(float(parts[4]))
            rows["q_value"].append(float(parts[5]))
        except ValueError as exc:
            raise DataError(f"line {lineno}: malformed row ({exc})") from exc
        if not (math.isfinite(rows["i_value"][-1]) and math.isfinite(rows["q_value"][-1])):
            raise DataError(f"line {lineno}: non-finite i/q value")
        if rows["schedule"][-1] not in SCHEDULES:
            raise DataError(f"line {lineno}: invalid schedule {rows['schedule'][-1]!r}")
    return IQShotTable(
        device=device,
        pair_first=np.asarray(rows["pair_first"], dtype=np.int64),
        pair_second=np.asarray(rows["pair_second"], dtype=np.int64),
        qubit=np.asarray(rows["qubit"], dtype=np.int64),
        schedule=np.asarray(rows["schedule"], dtype="U2"),
        shot=np.asarray(rows["shot"], dtype=np.int64),
        i_value=np.asarray(rows["i_value"], dtype=np.float64),
        q_value=np.asarray(rows["q_value"], dtype=np.float64),
    )


# ---------------------------------------------------------------------------
# shipped defaults: a five-qubit linear chain
# ---------------------------------------------------------------------------


def default_coupling_map() -> CouplingMap:
    """Linear chain 0-1-2-3-4 with informational per-qubit metadata."""
    frequencies = (5.030, 4.851, 5.096, 4.943, 5.052)
    readout_errors = (0.021, 0.084, 0.018, 0.013, 0.016)
    return CouplingMap(
        device="synthetic-5q-chain",
        edges=((0, 1), (1, 2), (2, 3), (3, 4)),
        qubits={
            q: QubitInfo(frequency_ghz=frequencies[q], readout_error=readout_errors[q])
            for q in range(5)
        },
    )


def default_readout_model() -> ReadoutModel:
    """Calibrated so per-qubit half-separation/sigma gives 10-fold k-means
    fidelities inside the 0.95..0.995 target band, with no crosstalk."""
    specs = {
        0: QubitReadoutSpec((-1.10, 0.45), (2.4759, 1.6119)),
        1: QubitReadoutSpec((0.55, -0.30), (-0.0508, 3.1074)),
        2: QubitReadoutSpec((-0.20, 1.95), (3.2641, -0.05)),
        3: QubitReadoutSpec((1.15, 0.80), (3.7196, 4.4697)),
        4: QubitReadoutSpec((2.05, -1.20), (-2.1847, -0.4533)),
    }
    return ReadoutModel(device="synthetic-5q-chain", qubits=specs)


def crosstalk_demo_model() -> ReadoutModel:
    """The default model plus bidirectional coupling on pairs (1,2), (2,3)."""
    base = default_readout_model()
    return replace(
        base,
        crosstalk={(1, 2): 0.3, (2, 1): 0.3, (2, 3): 0.25, (3, 2): 0.25},
    )


# ---------------------------------------------------------------------------
# config (de)serialization
# ---------------------------------------------------------------------------


def model_to_dict(model: ReadoutModel) -> dict:
    return {
        "device": model.device,
        "qubits": {
            str(q): {
                "ground_center": list(spec.ground_center),
                "excited_center": list(spec.excited_center),
                "cluster_stddev": list(spec.cluster_stddev),
            }
            for q, spec in sorted(model.qubits.items())
        },
        "crosstalk": {
            f"{victim}-{aggressor}": kappa
            for (victim, aggressor), kappa in sorted(model.crosstalk.items())
        },
    }


def model_from_dict(payload: dict) -> ReadoutModel:
    try:
        qubits = {
            int(q): QubitReadoutSpec(
                ground_center=tuple(spec["ground_center"]),
                excited_center=tuple(spec["excited_center"]),
                cluster_stddev=tuple(spec.get("cluster_stddev", (1.0, 1.0))),
            )
            for q, spec in payload["qubits"].items()
        }
        crosstalk = {}
        for key, kappa in payload.get("crosstalk", {}).items():
            victim, _, aggressor = key.partition("-")
            crosstalk[(int(victim), int(aggressor))] = float(kappa)
        return ReadoutModel(
            device=str(payload.get("device", "")), qubits=qubits, crosstalk=crosstalk
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ConfigError(f"malformed readout model config: {exc}") from exc


def coupling_to_dict(coupling: CouplingMap) -> dict:
    return {
        "device": coupling.device,
        "edges": [list(edge) for edge in coupling.edges],
        "qubits": {
            str(q): {"frequency_ghz": info.frequency_ghz, "readout_error": info.readout_error}
            for q, info in sorted(coupling.qubits.items())
        },
    }


def coupling_from_dict(payload: dict) -> CouplingMap:
    try:
        return CouplingMap(
            device=str(payload.get("device", "")),
            edges=tuple(tuple(edge) for edge in payload["edges"]),
            qubits={
                int(q): QubitInfo(
                    frequency_ghz=float(info["frequency_ghz"]),
                    readout_error=float(info["readout_error"]),
                )
                for q, info in payload.get("qubits", {}).items()
            },
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ConfigError(f"malformed coupling map config: {exc}") from exc
