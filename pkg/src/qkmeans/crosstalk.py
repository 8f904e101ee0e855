"""Pearson-correlation crosstalk analysis for coupled qubit pairs.

For a coupled pair (a, b) the analysis builds 8 signal arrays — own
state {0, 1} x qubit {a, b} x feature {real, imag} — each the
concatenation of the neighbor-ground schedule followed by the
neighbor-excited schedule, labeled ``{state}_{qubit}_{real|imag}``.
Their full 8x8 correlation matrix is the heatmap grid.

The 8 *named* coefficients correlate, for each pair qubit q and each own
state j, q's feature X in the schedule where its neighbor is excited
(ES) against q's feature Y where the neighbor stays in ground (GS),
shots paired by index, for (X, Y) = (I, Q) and (Q, I):

    r_j(ES_q_X, GS_q_Y)

Row labels are pair-relative ("a" = first qubit of the couple, "b" =
second) so the 8 forms line up across pairs in the table block.

A pair is flagged when the largest finite named |r| reaches
``threshold`` or when either qubit's single-schedule vs all-schedule
mean fidelity differ by at least ``fidelity_gap``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError
from .iqdata import IQShotTable

FEATURE_NAMES = {"i": "real", "q": "imag"}
_NAMED_FORMS = (("i", "q"), ("q", "i"))


def pearson(a, b) -> float:
    """Sample Pearson correlation; NaN when either array has zero variance."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError("pearson needs two equal-length 1-D arrays")
    if x.size < 2:
        raise ValueError("pearson needs at least two samples")
    dx = x - x.mean()
    dy = y - y.mean()
    vx = float(np.sum(dx * dx))
    vy = float(np.sum(dy * dy))
    if vx == 0.0 or vy == 0.0:
        return float("nan")
    return float(np.clip(np.sum(dx * dy) / np.sqrt(vx * vy), -1.0, 1.0))


@dataclass(frozen=True)
class NamedCoefficient:
    """One Table-style coefficient r_j(ES_q_X, GS_q_Y)."""

    form: str
    qubit: int
    own_state: int
    es_feature: str
    gs_feature: str
    value: float


@dataclass(frozen=True)
class CrosstalkFlag:
    pair: tuple[int, int]
    evidence: tuple[str, ...]


@dataclass(frozen=True)
class CorrelationReport:
    """Per-pair analysis output.

    ``matrix`` is the 8x8 heatmap grid over ``array_labels`` (None when a
    report was reconstructed from a named-coefficient block alone).
    """

    pair: tuple[int, int]
    array_labels: tuple[str, ...]
    matrix: np.ndarray | None
    named_coefficients: tuple[NamedCoefficient, ...]

    def __post_init__(self) -> None:
        if self.matrix is not None:
            m = np.asarray(self.matrix, dtype=np.float64)
            if m.shape != (8, 8) or len(self.array_labels) != 8:
                raise ValueError("heatmap matrix must be 8x8 with 8 labels")
            if not np.array_equal(m, m.T, equal_nan=True):
                raise ValueError("heatmap matrix must be exactly symmetric")
            finite = m[np.isfinite(m)]
            if finite.size and (finite.min() < -1.0 or finite.max() > 1.0):
                raise ValueError("correlations must lie in [-1, 1]")
            if not np.allclose(np.diag(m)[np.isfinite(np.diag(m))], 1.0, atol=1e-12):
                raise ValueError("heatmap diagonal must be 1")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)

    def max_named_abs(self) -> float:
        """Largest finite |named coefficient|; NaN if none are finite."""
        values = np.asarray([c.value for c in self.named_coefficients])
        finite = values[np.isfinite(values)]
        return float(np.max(np.abs(finite))) if finite.size else float("nan")


def _schedule_for(pos: int, own_bit: int, neighbor_bit: int) -> str:
    # Rightmost schedule character is the first pair qubit's state bit.
    bits = ["", ""]
    bits[1 - pos] = str(own_bit)
    bits[pos] = str(neighbor_bit)
    return "".join(bits)


def form_label(pair_slot: str, own_state: int, es_feature: str, gs_feature: str) -> str:
    return (
        f"r{own_state}(ES_{pair_slot}_{es_feature.upper()}, "
        f"GS_{pair_slot}_{gs_feature.upper()})"
    )


def named_form_labels() -> tuple[str, ...]:
    """The 8 pair-relative coefficient labels in canonical row order."""
    labels = []
    for slot in ("a", "b"):
        for state in (0, 1):
            for es_feat, gs_feat in _NAMED_FORMS:
                labels.append(form_label(slot, state, es_feat, gs_feat))
    return tuple(labels)


def analyze_pair(table: IQShotTable, pair: tuple[int, int]) -> CorrelationReport:
    """Heatmap matrix and named coefficients for one coupled pair."""
    pair = (int(pair[0]), int(pair[1]))
    present = table.schedules_for(pair)
    missing = [s for s in ("00", "01", "10", "11") if s not in present]
    if missing:
        raise DataError(f"pair {pair} is missing schedules {missing}")
    counts = {
        (q, s): table.values(pair, q, s, "i").size
        for q in pair
        for s in ("00", "01", "10", "11")
    }
    if len(set(counts.values())) != 1:
        raise DataError(f"pair {pair} has unequal shot counts across schedules: {counts}")

    arrays: list[np.ndarray] = []
    labels: list[str] = []
    for own_state in (0, 1):
        for pos, qubit in enumerate(pair):
            for feature in ("i", "q"):
                ground = table.values(pair, qubit, _schedule_for(pos, own_state, 0), feature)
                excited = table.values(pair, qubit, _schedule_for(pos, own_state, 1), feature)
                arrays.append(np.concatenate([ground, excited]))
                labels.append(f"{own_state}_{qubit}_{FEATURE_NAMES[feature]}")

    matrix = np.eye(8)
    for r in range(8):
        for c in range(r + 1, 8):
            value = pearson(arrays[r], arrays[c])
            matrix[r, c] = value
            matrix[c, r] = value

    named: list[NamedCoefficient] = []
    for pos, (slot, qubit) in enumerate(zip(("a", "b"), pair)):
        for own_state in (0, 1):
            for es_feat, gs_feat in _NAMED_FORMS:
                es = table.values(pair, qubit, _schedule_for(pos, own_state, 1), es_feat)
                gs = table.values(pair, qubit, _schedule_for(pos, own_state, 0), gs_feat)
                named.append(
                    NamedCoefficient(
                        form=form_label(slot, own_state, es_feat, gs_feat),
                        qubit=qubit,
                        own_state=own_state,
                        es_feature=es_feat,
                        gs_feature=gs_feat,
                        value=pearson(es, gs),
                    )
                )
    return CorrelationReport(
        pair=pair,
        array_labels=tuple(labels),
        matrix=matrix,
        named_coefficients=tuple(named),
    )


def flag_crosstalk(
    reports: Sequence[CorrelationReport],
    fidelities: Mapping[tuple[tuple[int, int], int, str], float] | None = None,
    threshold: float = 0.1,
    fidelity_gap: float = 0.02,
) -> tuple[CrosstalkFlag, ...]:
    """Flag pairs by correlation magnitude or single-vs-both fidelity gap.

    ``fidelities`` maps (pair, qubit, "single"|"both") to a mean fidelity;
    pass None (or {}) to flag on correlations alone.
    """
    fidelities = dict(fidelities or {})
    report_pairs = [r.pair for r in reports]
    if fidelities:
        score_pairs = {key[0] for key in fidelities}
        if score_pairs != set(report_pairs):
            raise DataError(
                f"pair mismatch between correlation reports {sorted(report_pairs)} "
                f"and fidelity tables {sorted(score_pairs)}"
            )
    flags: list[CrosstalkFlag] = []
    for report in reports:
        evidence: list[str] = []
        peak = report.max_named_abs()
        if np.isfinite(peak) and peak >= threshold:
            evidence.append(f"max named |r| = {peak:.4f} >= threshold {threshold:g}")
        if fidelities:
            for qubit in report.pair:
                single = fidelities.get((report.pair, qubit, "single"))
                both = fidelities.get((report.pair, qubit, "both"))
                if single is None or both is None:
                    continue
                gap = abs(single - both)
                if gap >= fidelity_gap:
                    evidence.append(
                        f"qubit {qubit} single/both fidelity gap = {gap:.4f} "
                        f">= {fidelity_gap:g}"
                    )
        if evidence:
            flags.append(CrosstalkFlag(pair=report.pair, evidence=tuple(evidence)))
    return tuple(flags)


# ---------------------------------------------------------------------------
# text serialization (heatmap grids, named-coefficient block)
# ---------------------------------------------------------------------------


def heatmap_lines(report: CorrelationReport) -> list[str]:
    """Delimited 8x8 grid with axis labels, one header + 8 rows."""
    if report.matrix is None:
        raise ValueError("report has no heatmap matrix")
    lines = ["label," + ",".join(report.array_labels)]
    for label, row in zip(report.array_labels, report.matrix):
        lines.append(label + "," + ",".join(repr(float(v)) for v in row))
    return lines


def named_block_lines(reports: Sequence[CorrelationReport]) -> list[str]:
    """Table-shaped block: 8 form rows, one value column per pair."""
    header = "form," + ",".join(f"{a}-{b}" for a, b in (r.pair for r in reports))
    lines = [header]
    for row_idx, label in enumerate(named_form_labels()):
        values = []
        for report in reports:
            coeff = report.named_coefficients[row_idx]
            if coeff.form != label:
                raise ValueError("report coefficients out of canonical order")
            values.append(repr(float(coeff.value)))
        lines.append(f'"{label}",' + ",".join(values))
    return lines


def parse_named_block(lines: Sequence[str]) -> list[CorrelationReport]:
    """Rebuild named-only reports (matrix=None) from a coefficient block."""
    rows = [line.strip() for line in lines if line.strip() and not line.startswith("#")]
    if not rows:
        raise DataError("named-coefficient block is empty")
    header = rows[0].split(",")
    if header[0] != "form":
        raise DataError("named-coefficient block must start with a 'form' header")
    pairs: list[tuple[int, int]] = []
    for token in header[1:]:
        first, _, second = token.partition("-")
        try:
            pairs.append((int(first), int(second)))
        except ValueError as exc:
            raise DataError(f"bad pair column {token!r}") from exc
    expected = named_form_labels()
    if len(rows) != 1 + len(expected):
        raise DataError(f"expected {len(expected)} coefficient rows, got {len(rows) - 1}")
    values = np.empty((len(expected), len(pairs)))
    for r, line in enumerate(rows[1:]):
        label, _, rest = line.partition('",')
        label = label.lstrip('"')
        if label != expected[r]:
            raise DataError(f"row {r + 1}: expected form {expected[r]!r}, got {label!r}")
        parts = rest.split(",")
        if len(parts) != len(pairs):
            raise DataError(f"row {r + 1}: expected {len(pairs)} values")
        try:
            values[r] = [float(p) for p in parts]
        except ValueError as exc:
            raise DataError(f"row {r + 1}: malformed value ({exc})") from exc
    reports = []
    for c, pair in enumerate(pairs):
        named = []
        row = 0
        for slot, qubit in zip(("a", "b"), pair):
            for state in (0, 1):
                for es_feat, gs_feat in _NAMED_FORMS:
                    named.append(
                        NamedCoefficient(
                            form=form_label(slot, state, es_feat, gs_feat),
                            qubit=qubit,
                            own_state=state,
                            es_feature=es_feat,
                            gs_feature=gs_feat,
                            value=float(values[row, c]),
                        )
                    )
                    row += 1
        reports.append(
            CorrelationReport(
                pair=pair, array_labels=(), matrix=None, named_coefficients=tuple(named)
            )
        )
    return reports
