"""Synthetic annual datasets with planted interval rules, plus a brute-force oracle.

The generator plants a per-factor value interval that critical years hit and
non-critical years miss, then optionally corrupts the picture: per-cell noise
flips interval membership, uninformative (adversarial) columns ignore
criticality entirely, a lag shifts the factor signal relative to the year it
describes, and a regime change breaks the factor-signal link before a chosen
year. Ground truth (true criticality, planted intervals, planted lag) is
returned alongside the matrix, so recognition quality can be measured against
a known answer. All output is synthetic; no real surveillance data is
involved.

Determinism: generation is a pure function of the spec. Randomness comes from
``random.Random(seed)`` (CPython's Mersenne Twister) with a fixed draw order:
planted intervals per factor, then the critical-year sample, then row-major
cell draws (incidence first, then each factor).

:func:`oracle_evaluate` re-derives intervals, memberships, and the x / y / p
counts with direct exhaustive loops, deliberately sharing no helper code with
the recognizer module, so the two paths cross-check each other.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import InvalidSpec, NoCriticalYears, UnknownFactor
from .matrix import CriticalLabels, FactorSelection, TemporalMatrix
from .recognizer import FactorInterval, QuorumRule, RecognitionResult

AMBIENT_LO = 0.0
AMBIENT_HI = 100.0
# Outside draws keep this distance from the planted interval so membership
# never hinges on float rounding.
EDGE_GAP = 1.0


@dataclass(frozen=True)
class PlantSpec:
    """Recipe for one synthetic dataset.

    Defaults mirror a realistic desk scale: a 30-year series with 8 factor
    columns. ``noise_prob`` is the per-cell chance that a factor value lands
    on the wrong side of its planted interval (critical years escape it,
    non-critical years enter it). The last ``n_adversarial`` factors carry no
    signal at all. ``lag_shift`` moves each informative factor's signal
    ``lag_shift`` rows later than the year it describes, and years before
    ``regime_change_year`` draw informative factors with no signal either.
    """

    n_years: int = 30
    n_factors: int = 8
    seed: int = 0
    critical_fraction: float = 0.3
    noise_prob: float = 0.0
    lag_shift: int = 0
    regime_change_year: int | None = None
    n_adversarial: int = 0
    intervals: tuple[tuple[float, float], ...] | None = None
    incidence_threshold: float = 10.0
    start_year: int = 1990

    def __post_init__(self):
        if self.intervals is not None:
            object.__setattr__(
                self,
                "intervals",
                tuple((float(lo), float(hi)) for lo, hi in self.intervals),
            )
        if self.n_years < 5:
            raise InvalidSpec(f"n_years must be at least 5, got {self.n_years}")
        if self.n_factors < 1:
            raise InvalidSpec("n_factors must be at least 1")
        if not (0.0 <= self.critical_fraction <= 1.0):
            raise InvalidSpec("critical_fraction must be in [0, 1]")
        if not (0.0 <= self.noise_prob <= 1.0):
            raise InvalidSpec("noise_prob must be in [0, 1]")
        if not (0 <= self.lag_shift < self.n_years):
            raise InvalidSpec("lag_shift must be in [0, n_years)")
        if not (0 <= self.n_adversarial <= self.n_factors):
            raise InvalidSpec("n_adversarial must be in [0, n_factors]")
        if not (math.isfinite(self.incidence_threshold) and self.incidence_threshold > 0):
            raise InvalidSpec("incidence_threshold must be finite and positive")
        if self.intervals is not None:
            if len(self.intervals) != self.n_factors:
                raise InvalidSpec("intervals must list one (lo, hi) pair per factor")
            for lo, hi in self.intervals:
                if not (lo <= hi):
                    raise InvalidSpec(f"planted interval has lo > hi: ({lo}, {hi})")
                if lo - EDGE_GAP < AMBIENT_LO or hi + EDGE_GAP > AMBIENT_HI:
                    raise InvalidSpec(
                        f"planted interval ({lo}, {hi}) leaves no room outside"
                        f" the ambient range [{AMBIENT_LO}, {AMBIENT_HI}]"
                    )

    @property
    def factor_names(self) -> tuple[str, ...]:
        return tuple(f"f{i + 1:02d}" for i in range(self.n_factors))


@dataclass(frozen=True)
class GroundTruth:
    """What the generator planted: criticality, intervals, lag."""

    years: tuple[int, ...]
    is_critical: tuple[bool, ...]
    intervals: tuple[FactorInterval, ...]
    lag_shift: int

    @property
    def critical_years(self) -> tuple[int, ...]:
        return tuple(y for y, c in zip(self.years, self.is_critical) if c)

    def to_csv(self) -> str:
        lines = ["year,is_critical"]
        lines.extend(
            f"{year},{1 if c else 0}" for year, c in zip(self.years, self.is_critical)
        )
        return "\n".join(lines) + "\n"


def _draw_inside(rng: random.Random, lo: float, hi: float) -> float:
    return rng.uniform(lo, hi)


def _draw_outside(rng: random.Random, lo: float, hi: float) -> float:
    left = (lo - EDGE_GAP) - AMBIENT_LO
    right = AMBIENT_HI - (hi + EDGE_GAP)
    u = rng.uniform(0.0, left + right)
    if u <= left:
        return AMBIENT_LO + u
    return (hi + EDGE_GAP) + (u - left)


def generate(spec: PlantSpec) -> tuple[TemporalMatrix, GroundTruth]:
    """Build the synthetic matrix and its ground truth from the spec."""
    rng = random.Random(spec.seed)
    n = spec.n_years
    names = spec.factor_names
    n_informative = spec.n_factors - spec.n_adversarial

    planted: list[tuple[float, float]] = []
    for j in range(spec.n_factors):
        if spec.intervals is not None:
            planted.append(spec.intervals[j])
        else:
            lo = rng.uniform(25.0, 45.0)
            hi = lo + rng.uniform(15.0, 30.0)
            planted.append((lo, hi))

    n_critical = min(n, max(0, round(spec.critical_fraction * n)))
    critical_idx = set(rng.sample(range(n), n_critical))
    is_critical = tuple(i in critical_idx for i in range(n))
    years = tuple(spec.start_year + i for i in range(n))

    def signal_is_critical(row: int) -> bool:
        # Factor cells carry the signal of the year lag_shift rows later;
        # rows whose signal year falls past the series behave non-critical.
        signal_row = row + spec.lag_shift
        return is_critical[signal_row] if signal_row < n else False

    def signal_in_old_regime(row: int) -> bool:
        if spec.regime_change_year is None:
            return False
        return spec.start_year + row + spec.lag_shift < spec.regime_change_year

    thr = spec.incidence_threshold
    incidence: list[float] = []
    columns: dict[str, list[float]] = {name: [] for name in names}
    for i in range(n):
        if is_critical[i]:
            incidence.append(rng.uniform(thr, 2.0 * thr))
        else:
            incidence.append(rng.uniform(0.0, 0.9 * thr))
        for j, name in enumerate(names):
            lo, hi = planted[j]
            if j >= n_informative or signal_in_old_regime(i):
                columns[name].append(rng.uniform(AMBIENT_LO, AMBIENT_HI))
                continue
            inside = signal_is_critical(i)
            if rng.random() < spec.noise_prob:
                inside = not inside
            value = _draw_inside(rng, lo, hi) if inside else _draw_outside(rng, lo, hi)
            columns[name].append(value)

    matrix = TemporalMatrix(years, tuple(incidence), names, columns)
    truth_intervals = tuple(
        FactorInterval(name, AMBIENT_LO, AMBIENT_HI)
        if j >= n_informative
        else FactorInterval(name, planted[j][0], planted[j][1])
        for j, name in enumerate(names)
    )
    truth = GroundTruth(years, is_critical, truth_intervals, spec.lag_shift)
    return matrix, truth


def oracle_evaluate(
    m: TemporalMatrix,
    labels: CriticalLabels,
    selection: FactorSelection,
    rule: QuorumRule,
    widen_eps: float = 0.0,
) -> RecognitionResult:
    """Brute-force re-derivation of the in-sample recognition result.

    Scans the matrix with plain loops: envelope bounds from the critical
    years, per-year membership counts, the quorum requirement, and the
    x / y / p tally. Intentionally calls none of the recognizer's functions
    so it can serve as an independent check of them.
    """
    if labels.years != m.years:
        raise ValueError("labels were built for a different set of years")
    names = tuple(selection.names)
    for name in names:
        if name not in m.columns:
            raise UnknownFactor(name)

    critical_rows = [i for i in range(len(m.years)) if labels.is_critical[i]]
    if not critical_rows:
        raise NoCriticalYears()

    bounds: dict[str, tuple[float, float]] = {}
    for name in names:
        column = m.columns[name]
        lo = hi = column[critical_rows[0]]
        for i in critical_rows[1:]:
            if column[i] < lo:
                lo = column[i]
            if column[i] > hi:
                hi = column[i]
        bounds[name] = (lo, hi)

    needed = math.ceil(rule.q * len(names))
    flagged: list[int] = []
    memberships: dict[int, int] = {}
    x = 0
    y = 0
    for i, year in enumerate(m.years):
        count = 0
        for name in names:
            value = m.columns[name][i]
            lo, hi = bounds[name]
            if lo - widen_eps <= value <= hi + widen_eps:
                count += 1
        memberships[year] = count
        if count >= needed:
            flagged.append(year)
            if labels.is_critical[i]:
                x += 1
            else:
                y += 1
    p = None if x + y == 0 else x / (x + y)
    return RecognitionResult(tuple(flagged), x, y, p, memberships)
