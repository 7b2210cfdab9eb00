"""Configuration sweeps: factor subsets, quorum, threshold, lag, window length.

Each sweep varies exactly one axis of a base configuration and reports one
row per grid point. Reports are deterministic for fixed inputs: grid order is
preserved, factor subsets are enumerated by size then lexicographically, and
infeasible grid points stay in the report as skipped rows so the sweep shape
always matches the grid.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations
from typing import Sequence

from .backtest import BacktestConfig, BacktestResult, rolling_backtest
from .errors import InvalidQuorum, LagTooLarge, TooManyFactors, WindowTooShort
from .matrix import (
    CriticalLabels,
    CriticalThreshold,
    FactorSelection,
    TemporalMatrix,
    apply_uniform_lag,
    label_critical,
)
from .recognizer import QuorumRule

MAX_SUBSET_FACTORS = 16

SWEEP_AXES = ("factor_subset", "quorum", "threshold", "lag", "row_length")


@dataclass(frozen=True)
class SweepSpec:
    """One sweep axis, its grid, and the base configuration.

    ``grid`` is a tuple of axis values: factor-name tuples for
    ``factor_subset`` (or None to enumerate all non-empty subsets of the
    selection), fractions for ``quorum``, incidence values for ``threshold``,
    row counts for ``lag`` and ``row_length``.
    """

    axis: str
    selection: FactorSelection
    config: BacktestConfig
    grid: tuple | None = None

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"axis must be one of {SWEEP_AXES}")
        if self.grid is not None:
            object.__setattr__(self, "grid", tuple(self.grid))
            if not self.grid:
                raise ValueError("grid must be non-empty")
        elif self.axis != "factor_subset":
            raise ValueError(f"axis {self.axis!r} requires an explicit grid")


@dataclass(frozen=True)
class SweepRow:
    """One grid point: configuration label plus the recognition counts."""

    configuration: str
    status: str  # "ok" | "skipped"
    x: int | None
    y: int | None
    p: float | None
    n_no_forecast: int | None
    note: str = ""


@dataclass(frozen=True)
class SweepReport:
    axis: str
    rows: tuple[SweepRow, ...]


def _ok_row(label: str, result: BacktestResult) -> SweepRow:
    return SweepRow(label, "ok", result.x, result.y, result.p, result.n_no_forecast)


def _skipped_row(label: str, note: str) -> SweepRow:
    return SweepRow(label, "skipped", None, None, None, None, note)


def enumerate_subsets(selection: FactorSelection) -> tuple[FactorSelection, ...]:
    """All non-empty subsets, size ascending then lexicographic by name."""
    if selection.n_factors > MAX_SUBSET_FACTORS:
        raise TooManyFactors(selection.n_factors, MAX_SUBSET_FACTORS)
    subsets = []
    for size in range(1, selection.n_factors + 1):
        for combo in combinations(selection.names, size):
            subsets.append(combo)
    subsets.sort(key=lambda names: (len(names), names))
    return tuple(FactorSelection(names) for names in subsets)


def subset_sweep(
    m: TemporalMatrix, labels: CriticalLabels, spec: SweepSpec
) -> SweepReport:
    """Evaluate every factor subset in the grid with the base configuration.

    More factors does not always mean higher precision: under a partial
    quorum an uninformative factor can vote otherwise-rejected years past
    the requirement, so supersets may score strictly worse.
    """
    if spec.grid is None:
        subsets = enumerate_subsets(spec.selection)
    else:
        subsets = tuple(FactorSelection(names) for names in spec.grid)
    rows = []
    for subset in subsets:
        subset.validate_against(m)
        result = rolling_backtest(m, labels, subset, spec.config)
        rows.append(_ok_row("+".join(subset.names), result))
    return SweepReport("factor_subset", tuple(rows))


def quorum_sweep(
    m: TemporalMatrix, labels: CriticalLabels, spec: SweepSpec
) -> SweepReport:
    """One row per quorum fraction; flagged counts are non-increasing in q."""
    rows = []
    for q in spec.grid:
        q = float(q)
        if not (0.0 < q <= 1.0):
            raise InvalidQuorum(q)
        cfg = replace(spec.config, rule=QuorumRule(q))
        result = rolling_backtest(m, labels, spec.selection, cfg)
        rows.append(_ok_row(repr(q), result))
    return SweepReport("quorum", tuple(rows))


def threshold_sensitivity(m: TemporalMatrix, spec: SweepSpec) -> SweepReport:
    """One row per critical threshold; relabels the series at each grid point.

    Thresholds yielding fewer than ``min_train_critical`` critical years are
    reported as skipped rows rather than dropped.
    """
    rows = []
    for value in spec.grid:
        threshold = CriticalThreshold(float(value), "selected")
        labels = label_critical(m, threshold)
        label = repr(threshold.value)
        if labels.n_critical < spec.config.min_train_critical:
            rows.append(
                _skipped_row(
                    label,
                    f"{labels.n_critical} critical years,"
                    f" {spec.config.min_train_critical} required",
                )
            )
            continue
        cfg = replace(spec.config, threshold=threshold)
        result = rolling_backtest(m, labels, spec.selection, cfg)
        rows.append(_ok_row(label, result))
    return SweepReport("threshold", tuple(rows))


def lag_sweep(m: TemporalMatrix, labels: CriticalLabels, spec: SweepSpec) -> SweepReport:
    """One row per lag, applied uniformly to all selected factors."""
    rows = []
    for lag in spec.grid:
        lag = int(lag)
        if lag >= m.n_years:
            raise LagTooLarge(lag, m.n_years)
        lagged = apply_uniform_lag(m, spec.selection.names, lag)
        lagged_labels = label_critical(lagged, labels.threshold)
        result = rolling_backtest(lagged, lagged_labels, spec.selection, spec.config)
        rows.append(_ok_row(str(lag), result))
    return SweepReport("lag", tuple(rows))


def row_length_sweep(
    m: TemporalMatrix, labels: CriticalLabels, spec: SweepSpec
) -> SweepReport:
    """One row per trailing-window length k, evaluated on the last k years.

    Grid values below ``min_train_years`` violate the grid contract and
    raise; windows longer than the series or holding too few critical years
    are reported as skipped rows.
    """
    rows = []
    for k in spec.grid:
        k = int(k)
        if k < spec.config.min_train_years:
            raise WindowTooShort(k, spec.config.min_train_years)
        label = str(k)
        if k > m.n_years:
            rows.append(_skipped_row(label, f"window exceeds {m.n_years}-year series"))
            continue
        window = m.suffix(k)
        window_labels = label_critical(window, labels.threshold)
        if window_labels.n_critical < spec.config.min_train_critical:
            rows.append(
                _skipped_row(
                    label,
                    f"{window_labels.n_critical} critical years,"
                    f" {spec.config.min_train_critical} required",
                )
            )
            continue
        result = rolling_backtest(window, window_labels, spec.selection, spec.config)
        rows.append(_ok_row(label, result))
    return SweepReport("row_length", tuple(rows))


def run_sweep(
    m: TemporalMatrix, labels: CriticalLabels | None, spec: SweepSpec
) -> SweepReport:
    """Dispatch on the sweep axis. ``labels`` is ignored for the threshold axis."""
    if spec.axis == "factor_subset":
        return subset_sweep(m, labels, spec)
    if spec.axis == "quorum":
        return quorum_sweep(m, labels, spec)
    if spec.axis == "threshold":
        return threshold_sensitivity(m, spec)
    if spec.axis == "lag":
        return lag_sweep(m, labels, spec)
    return row_length_sweep(m, labels, spec)
