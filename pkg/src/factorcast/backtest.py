"""Threshold selection and rolling-origin forecasting of critical years.

Real-time use means forecasting year t+1 from years 1..t only. A forecast is
issued only when the training window holds enough critical years to pin the
intervals down (at least two by default); otherwise the verdict is an
explicit ``no_forecast`` so backtest accounting stays auditable. Besides the
rolling mode, the backtest can replay the recognizer in-sample or in
leave-one-out mode for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal, Mapping

from .errors import InsufficientYears
from .matrix import (
    CriticalLabels,
    CriticalThreshold,
    FactorSelection,
    TemporalMatrix,
    label_critical,
)
from .recognizer import (
    QuorumRule,
    build_profile,
    membership_count,
    precision,
)

EvalMode = Literal["rolling", "leave_one_out", "in_sample"]

EVAL_MODES = ("rolling", "leave_one_out", "in_sample")


@dataclass(frozen=True)
class BacktestConfig:
    """One fixed recognition configuration for a whole backtest."""

    rule: QuorumRule
    threshold: CriticalThreshold
    min_train_years: int = 5
    min_train_critical: int = 2
    eval_mode: EvalMode = "rolling"
    widen_eps: float = 0.0

    def __post_init__(self):
        if self.min_train_years < 3:
            raise ValueError("min_train_years must be at least 3")
        if self.min_train_critical < 2:
            raise ValueError("min_train_critical must be at least 2")
        if self.eval_mode not in EVAL_MODES:
            raise ValueError(f"eval_mode must be one of {EVAL_MODES}")
        if self.widen_eps < 0:
            raise ValueError("widen_eps must be non-negative")


@dataclass(frozen=True)
class Verdict:
    """One per-year forecast: critical, non_critical, or no_forecast.

    ``no_forecast`` means the training prerequisites were unmet for that
    origin. ``truth`` is absent for genuinely future years.
    """

    year: int
    prediction: Literal["critical", "non_critical", "no_forecast"]
    membership: int | None = None
    truth: bool | None = None


@dataclass(frozen=True)
class BacktestResult:
    """Per-year verdicts plus x / y / p over issued critical predictions."""

    verdicts: tuple[Verdict, ...]
    x: int
    y: int
    p: float | None
    n_no_forecast: int

    @property
    def n_forecasts(self) -> int:
        return sum(1 for v in self.verdicts if v.prediction != "no_forecast")


def select_threshold(m: TemporalMatrix, min_critical: int = 2) -> CriticalThreshold:
    """Largest observed incidence value that still yields >= min_critical criticals.

    Candidate thresholds are the observed incidence values themselves, since
    labelings only change there. The most extreme qualifying line is chosen;
    an expert-given line can always be used instead.
    """
    if min_critical < 2:
        raise ValueError("min_critical must be at least 2")
    if m.n_years < min_critical:
        raise InsufficientYears(m.n_years, min_critical)
    for candidate in sorted(set(m.incidence), reverse=True):
        n_critical = sum(1 for v in m.incidence if v >= candidate)
        if n_critical >= min_critical:
            return CriticalThreshold(candidate, "selected")
    raise AssertionError("minimum incidence always qualifies")  # pragma: no cover


def forecast_next(
    train: TemporalMatrix,
    train_labels: CriticalLabels,
    selection: FactorSelection,
    rule: QuorumRule,
    next_factors: Mapping[str, float],
    *,
    min_train_critical: int = 2,
    widen_eps: float = 0.0,
    year: int | None = None,
) -> Verdict:
    """Forecast the year after the training window from its factor values.

    Issues ``no_forecast`` when the window has fewer than
    ``min_train_critical`` critical years; by default more than one critical
    year is required before any forecast is made.
    """
    if year is None:
        year = train.years[-1] + 1
    if train_labels.n_critical < min_train_critical:
        return Verdict(year, "no_forecast")
    profile = build_profile(train, train_labels, selection, widen_eps)
    count = membership_count(next_factors, profile)
    flagged = count >= rule.required(profile.n_factors)
    return Verdict(year, "critical" if flagged else "non_critical", count)


def _aggregate(verdicts: list[Verdict]) -> BacktestResult:
    x = sum(1 for v in verdicts if v.prediction == "critical" and v.truth is True)
    y = sum(1 for v in verdicts if v.prediction == "critical" and v.truth is False)
    n_no_forecast = sum(1 for v in verdicts if v.prediction == "no_forecast")
    return BacktestResult(tuple(verdicts), x, y, precision(x, y), n_no_forecast)


def rolling_backtest(
    m: TemporalMatrix,
    labels: CriticalLabels,
    selection: FactorSelection,
    cfg: BacktestConfig,
) -> BacktestResult:
    """Replay the recognizer over the series in the configured evaluation mode.

    rolling
        For every origin t from ``min_train_years`` to n-1, train on years
        1..t only and forecast year t+1. Future rows are never read, so
        verdicts are causal.
    in_sample
        Classify every year against the profile built from all critical
        years; agrees exactly with :func:`recognizer.evaluate_insample`.
    leave_one_out
        Classify each year against the profile built from all critical years
        except itself (when it is critical); equals in_sample for
        non-critical years.
    """
    if labels.years != m.years:
        raise ValueError("labels were built for a different set of years")
    if labels.threshold.value != cfg.threshold.value:
        raise ValueError("labels threshold differs from backtest config threshold")
    selection.validate_against(m)

    if cfg.eval_mode == "rolling":
        verdicts = _rolling_verdicts(m, labels, selection, cfg)
    elif cfg.eval_mode == "in_sample":
        verdicts = _insample_verdicts(m, labels, selection, cfg, leave_one_out=False)
    else:
        verdicts = _insample_verdicts(m, labels, selection, cfg, leave_one_out=True)
    return _aggregate(verdicts)


def _rolling_verdicts(
    m: TemporalMatrix,
    labels: CriticalLabels,
    selection: FactorSelection,
    cfg: BacktestConfig,
) -> list[Verdict]:
    verdicts = []
    for t in range(cfg.min_train_years, m.n_years):
        train = m.prefix(t)
        train_labels = label_critical(train, labels.threshold)
        verdict = forecast_next(
            train,
            train_labels,
            selection,
            cfg.rule,
            m.row_factors(t, selection.names),
            min_train_critical=cfg.min_train_critical,
            widen_eps=cfg.widen_eps,
            year=m.years[t],
        )
        verdicts.append(replace(verdict, truth=labels.is_critical[t]))
    return verdicts


def _insample_verdicts(
    m: TemporalMatrix,
    labels: CriticalLabels,
    selection: FactorSelection,
    cfg: BacktestConfig,
    leave_one_out: bool,
) -> list[Verdict]:
    # Zero criticals means no profile can be built: every year is an
    # explicit no_forecast rather than an error.
    if labels.n_critical == 0:
        return [
            Verdict(year, "no_forecast", truth=labels.is_critical[i])
            for i, year in enumerate(m.years)
        ]
    full_profile = build_profile(m, labels, selection, cfg.widen_eps)
    required = cfg.rule.required(full_profile.n_factors)
    verdicts = []
    for i, year in enumerate(m.years):
        profile = full_profile
        if leave_one_out and labels.is_critical[i]:
            if labels.n_critical == 1:
                verdicts.append(Verdict(year, "no_forecast", truth=True))
                continue
            flags = list(labels.is_critical)
            flags[i] = False
            held_out = CriticalLabels(labels.years, tuple(flags), labels.threshold)
            profile = build_profile(m, held_out, selection, cfg.widen_eps)
        count = membership_count(m.row_factors(i, selection.names), profile)
        prediction = "critical" if count >= required else "non_critical"
        verdicts.append(Verdict(year, prediction, count, labels.is_critical[i]))
    return verdicts
