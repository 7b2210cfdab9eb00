"""Interval-envelope recognition of critical years.

The rule is built in two steps. Training: for each selected factor, take the
closed [min, max] envelope of its values over the critical training years.
Recognition: a year is flagged critical when its values fall inside at least
a quorum of the envelopes. A flagged year that is truly critical counts
toward ``x``, a flagged non-critical ("false critical") year toward ``y``,
and recognition precision is ``p = x / (x + y)``.

All functions are pure; many (profile, rule) configurations can be evaluated
concurrently over the same matrix without coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import (
    DuplicateFactor,
    InvalidQuorum,
    LabelMismatch,
    MissingFactorValue,
    NoCriticalYears,
)
from .matrix import CriticalLabels, FactorSelection, TemporalMatrix


@dataclass(frozen=True)
class FactorInterval:
    """Closed value envelope of one factor over critical training years.

    Membership is ``lo - widen_eps <= v <= hi + widen_eps``; the optional
    symmetric widening guards degenerate point intervals against
    floating-point noise and defaults to zero.
    """

    factor: str
    lo: float
    hi: float
    widen_eps: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "widen_eps", float(self.widen_eps))
        if self.lo > self.hi:
            raise ValueError(f"interval for {self.factor!r} has lo > hi")
        if self.widen_eps < 0:
            raise ValueError("widen_eps must be non-negative")

    def contains(self, value: float) -> bool:
        return self.lo - self.widen_eps <= value <= self.hi + self.widen_eps

    def to_dict(self) -> dict:
        return {
            "factor": self.factor,
            "lo": self.lo,
            "hi": self.hi,
            "widen_eps": self.widen_eps,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "FactorInterval":
        return cls(
            factor=str(doc["factor"]),
            lo=float(doc["lo"]),
            hi=float(doc["hi"]),
            widen_eps=float(doc.get("widen_eps", 0.0)),
        )


@dataclass(frozen=True)
class IntervalProfile:
    """One interval per selected factor, trained on critical years."""

    intervals: tuple[FactorInterval, ...]
    n_critical_train: int

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))
        if not self.intervals:
            raise ValueError("profile must contain at least one interval")
        if self.n_critical_train < 1:
            raise ValueError("profile must be trained on at least one critical year")
        seen = set()
        for interval in self.intervals:
            if interval.factor in seen:
                raise DuplicateFactor(interval.factor)
            seen.add(interval.factor)

    @property
    def factor_names(self) -> tuple[str, ...]:
        return tuple(interval.factor for interval in self.intervals)

    @property
    def n_factors(self) -> int:
        return len(self.intervals)

    def to_dict(self) -> dict:
        return {
            "n_critical_train": self.n_critical_train,
            "intervals": [interval.to_dict() for interval in self.intervals],
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "IntervalProfile":
        return cls(
            intervals=tuple(FactorInterval.from_dict(d) for d in doc["intervals"]),
            n_critical_train=int(doc["n_critical_train"]),
        )


@dataclass(frozen=True)
class QuorumRule:
    """Flag a year when it hits at least ceil(q * F) of the F intervals.

    ``q = 1`` demands membership in every interval (the strict all-factors
    rule); smaller fractions such as 0.5..0.75 tolerate misses.
    """

    q: float

    def __post_init__(self):
        object.__setattr__(self, "q", float(self.q))
        if not (0.0 < self.q <= 1.0):
            raise InvalidQuorum(self.q)

    def required(self, n_factors: int) -> int:
        if n_factors < 1:
            raise ValueError("rule needs at least one factor")
        return math.ceil(self.q * n_factors)


@dataclass(frozen=True)
class RecognitionResult:
    """Flagged years plus the x / y / p recognition statistics.

    ``x`` counts flagged years that are truly critical, ``y`` the flagged
    "false critical" years; ``p = x / (x + y)`` is None (undefined, not an
    error) when nothing was flagged.
    """

    flagged_years: tuple[int, ...]
    x: int
    y: int
    p: float | None
    per_year_membership: dict[int, int]


def _check_labels(m: TemporalMatrix, labels: CriticalLabels) -> None:
    if labels.years != m.years:
        raise LabelMismatch()


def build_profile(
    m: TemporalMatrix,
    labels: CriticalLabels,
    selection: FactorSelection,
    widen_eps: float = 0.0,
) -> IntervalProfile:
    """Envelope each selected factor over the critical years of the labeling."""
    _check_labels(m, labels)
    selection.validate_against(m)
    critical_idx = [i for i, c in enumerate(labels.is_critical) if c]
    if not critical_idx:
        raise NoCriticalYears()
    intervals = []
    for name in selection.names:
        col = m.factor_values(name)
        values = [col[i] for i in critical_idx]
        intervals.append(FactorInterval(name, min(values), max(values), widen_eps))
    return IntervalProfile(tuple(intervals), len(critical_idx))


def membership_count(year_factors: Mapping[str, float], profile: IntervalProfile) -> int:
    """Number of profile intervals the year's factor values fall inside."""
    count = 0
    for interval in profile.intervals:
        try:
            value = year_factors[interval.factor]
        except KeyError:
            raise MissingFactorValue(interval.factor) from None
        if interval.contains(value):
            count += 1
    return count


def classify_year(
    year_factors: Mapping[str, float], profile: IntervalProfile, rule: QuorumRule
) -> bool:
    """True when the year meets the quorum of interval memberships."""
    return membership_count(year_factors, profile) >= rule.required(profile.n_factors)


def evaluate_insample(
    m: TemporalMatrix,
    labels: CriticalLabels,
    profile: IntervalProfile,
    rule: QuorumRule,
) -> RecognitionResult:
    """Classify every year of the matrix against a fixed profile and rule.

    The profile is usually built from the same (matrix, labels) pair but may
    come from a training subset; either way each year is scored by its
    interval memberships and the quorum.
    """
    _check_labels(m, labels)
    required = rule.required(profile.n_factors)
    flagged: list[int] = []
    memberships: dict[int, int] = {}
    x = 0
    y = 0
    for i, year in enumerate(m.years):
        count = membership_count(m.row_factors(i, profile.factor_names), profile)
        memberships[year] = count
        if count >= required:
            flagged.append(year)
            if labels.is_critical[i]:
                x += 1
            else:
                y += 1
    return RecognitionResult(tuple(flagged), x, y, precision(x, y), memberships)


def precision(x: int, y: int) -> float | None:
    """``x / (x + y)``, or None when nothing was flagged (undefined, not 0)."""
    if x < 0 or y < 0:
        raise ValueError("counts must be non-negative")
    if x + y == 0:
        return None
    return x / (x + y)
