"""Annual data matrix: parsing, validation, labeling, and alignment.

The data model is a rectangular table of annual observations: one row per
year, one incidence column, and one or more named factor columns. Years are
arbitrary strictly increasing integer keys; incidence and factor values are
finite reals. All recognition logic downstream consumes this matrix plus the
boolean critical labeling derived from an incidence threshold.

Everything here is a pure function over immutable values: transforms return
new matrices and never mutate their inputs, so values are safe to share
across concurrent evaluations.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, Sequence

from .errors import (
    DuplicateFactor,
    DuplicateYear,
    EmptySelection,
    InvalidThreshold,
    LagTooLarge,
    MatrixError,
    MissingCell,
    NoFactors,
    NonNumericCell,
    TooFewRows,
    UnknownFactor,
)

# Parsing requires at least this many year rows; derived matrices (lagged or
# windowed views) may legitimately be shorter.
MIN_PARSE_YEARS = 3


def _format_value(v: float) -> str:
    """Shortest decimal string that round-trips to the same float."""
    return repr(float(v))


@dataclass(frozen=True)
class TemporalMatrix:
    """Years x (incidence + factors) table of annual observations.

    Invariants checked at construction: years strictly increasing, at least
    one year and one factor, every cell present and finite, incidence
    non-negative.
    """

    years: tuple[int, ...]
    incidence: tuple[float, ...]
    factor_names: tuple[str, ...]
    columns: Mapping[str, tuple[float, ...]]

    def __post_init__(self):
        object.__setattr__(self, "years", tuple(int(y) for y in self.years))
        object.__setattr__(self, "incidence", tuple(float(v) for v in self.incidence))
        object.__setattr__(self, "factor_names", tuple(self.factor_names))
        object.__setattr__(
            self,
            "columns",
            {name: tuple(float(v) for v in col) for name, col in self.columns.items()},
        )
        self._validate()

    def _validate(self) -> None:
        if len(self.years) < 1:
            raise MatrixError("matrix must contain at least one year row")
        for a, b in zip(self.years, self.years[1:]):
            if a == b:
                raise DuplicateYear(a)
            if a > b:
                raise MatrixError("years must be strictly increasing")
        if not self.factor_names:
            raise NoFactors()
        seen = set()
        for name in self.factor_names:
            if name in seen:
                raise DuplicateFactor(name)
            seen.add(name)
        if set(self.columns) != seen:
            raise MatrixError("factor columns do not match factor names")
        n = len(self.years)
        if len(self.incidence) != n:
            raise MatrixError("incidence column length does not match years")
        for year, v in zip(self.years, self.incidence):
            if not math.isfinite(v):
                raise MatrixError(f"non-finite incidence for year {year}")
            if v < 0:
                raise MatrixError(f"negative incidence for year {year}")
        for name in self.factor_names:
            col = self.columns[name]
            if len(col) != n:
                raise MatrixError(f"factor column {name!r} length does not match years")
            for year, v in zip(self.years, col):
                if not math.isfinite(v):
                    raise MatrixError(f"non-finite value for factor {name!r}, year {year}")

    @property
    def n_years(self) -> int:
        return len(self.years)

    @property
    def n_factors(self) -> int:
        return len(self.factor_names)

    def year_index(self, year: int) -> int:
        try:
            return self.years.index(year)
        except ValueError:
            raise MatrixError(f"year {year} not in matrix") from None

    def factor_values(self, name: str) -> tuple[float, ...]:
        try:
            return self.columns[name]
        except KeyError:
            raise UnknownFactor(name) from None

    def row_factors(self, index: int, names: Sequence[str] | None = None) -> dict[str, float]:
        """Factor values of one year row, keyed by factor name."""
        use = self.factor_names if names is None else tuple(names)
        return {name: self.factor_values(name)[index] for name in use}

    def window(self, start: int, stop: int) -> "TemporalMatrix":
        """Row slice [start, stop); factors unchanged."""
        if not (0 <= start < stop <= self.n_years):
            raise MatrixError(f"invalid window [{start}, {stop}) for {self.n_years} years")
        return TemporalMatrix(
            years=self.years[start:stop],
            incidence=self.incidence[start:stop],
            factor_names=self.factor_names,
            columns={name: col[start:stop] for name, col in self.columns.items()},
        )

    def prefix(self, n_rows: int) -> "TemporalMatrix":
        return self.window(0, n_rows)

    def suffix(self, n_rows: int) -> "TemporalMatrix":
        return self.window(self.n_years - n_rows, self.n_years)

    def to_csv(self) -> str:
        """Serialize back to the canonical CSV format.

        Numerals are re-emitted as shortest round-trip decimals, so
        ``parse_matrix(m.to_csv()) == m`` exactly.
        """
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["year", "incidence", *self.factor_names])
        for i, year in enumerate(self.years):
            row = [str(year), _format_value(self.incidence[i])]
            row.extend(_format_value(self.columns[name][i]) for name in self.factor_names)
            writer.writerow(row)
        return out.getvalue()


@dataclass(frozen=True)
class CriticalThreshold:
    """The extreme incidence line; years at or above it are critical."""

    value: float
    source: Literal["expert", "selected"] = "expert"

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        if not math.isfinite(self.value):
            raise InvalidThreshold(self.value)
        if self.source not in ("expert", "selected"):
            raise MatrixError(f"threshold source must be 'expert' or 'selected', got {self.source!r}")


@dataclass(frozen=True)
class CriticalLabels:
    """Per-year boolean criticality derived from a threshold."""

    years: tuple[int, ...]
    is_critical: tuple[bool, ...]
    threshold: CriticalThreshold

    def __post_init__(self):
        object.__setattr__(self, "years", tuple(int(y) for y in self.years))
        object.__setattr__(self, "is_critical", tuple(bool(b) for b in self.is_critical))
        if len(self.years) != len(self.is_critical):
            raise MatrixError("labels length does not match years")

    @property
    def n_critical(self) -> int:
        return sum(self.is_critical)

    @property
    def n_noncritical(self) -> int:
        return len(self.years) - self.n_critical

    @property
    def critical_years(self) -> tuple[int, ...]:
        return tuple(y for y, c in zip(self.years, self.is_critical) if c)

    def for_year(self, year: int) -> bool:
        try:
            return self.is_critical[self.years.index(year)]
        except ValueError:
            raise MatrixError(f"year {year} not in labeling") from None


@dataclass(frozen=True)
class FactorSelection:
    """Ordered, duplicate-free subset of a matrix's factor columns."""

    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if not self.names:
            raise EmptySelection()
        seen = set()
        for name in self.names:
            if name in seen:
                raise DuplicateFactor(name)
            seen.add(name)

    @property
    def n_factors(self) -> int:
        return len(self.names)

    def validate_against(self, m: TemporalMatrix) -> None:
        for name in self.names:
            if name not in m.columns:
                raise UnknownFactor(name)

    @classmethod
    def all_of(cls, m: TemporalMatrix) -> "FactorSelection":
        return cls(m.factor_names)


def parse_matrix(text: str) -> TemporalMatrix:
    """Parse the canonical CSV format into a validated matrix.

    Format: UTF-8, comma-separated, header ``year,incidence,<factor>...``,
    decimal point ``.``, one row per year. Row order is normalized to
    increasing year. Row numbers in errors count the header as row 1.
    """
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader]
    while rows and rows[-1] == []:
        rows.pop()
    if not rows:
        raise MatrixError("empty document")
    header = [cell.strip() for cell in rows[0]]
    if len(header) < 2 or header[0] != "year" or header[1] != "incidence":
        raise MatrixError("header must start with 'year,incidence'")
    factor_names = header[2:]
    if not factor_names:
        raise NoFactors()
    if any(not name for name in factor_names):
        raise MatrixError("factor names must be non-empty")

    parsed: list[tuple[int, float, list[float]]] = []
    for lineno, raw in enumerate(rows[1:], start=2):
        cells = [cell.strip() for cell in raw]
        if len(cells) < len(header):
            raise MissingCell(lineno, header[len(cells)])
        if len(cells) > len(header):
            raise MatrixError(f"row {lineno} has {len(cells)} cells, expected {len(header)}")
        if cells[0] == "":
            raise MissingCell(lineno, "year")
        try:
            year = int(cells[0])
        except ValueError:
            raise NonNumericCell(lineno, "year", cells[0]) from None
        values: list[float] = []
        for column, cell in zip(header[1:], cells[1:]):
            if cell == "":
                raise MissingCell(lineno, column)
            try:
                v = float(cell)
            except ValueError:
                raise NonNumericCell(lineno, column, cell) from None
            if not math.isfinite(v):
                raise NonNumericCell(lineno, column, cell)
            values.append(v)
        parsed.append((year, values[0], values[1:]))

    if len(parsed) < MIN_PARSE_YEARS:
        raise TooFewRows(len(parsed), MIN_PARSE_YEARS)

    parsed.sort(key=lambda item: item[0])
    for (a, _, _), (b, _, _) in zip(parsed, parsed[1:]):
        if a == b:
            raise DuplicateYear(a)

    years = tuple(item[0] for item in parsed)
    incidence = tuple(item[1] for item in parsed)
    columns = {
        name: tuple(item[2][j] for item in parsed) for j, name in enumerate(factor_names)
    }
    return TemporalMatrix(years, incidence, tuple(factor_names), columns)


def label_critical(m: TemporalMatrix, threshold: CriticalThreshold) -> CriticalLabels:
    """Flag each year whose incidence is at or above the threshold.

    Boundary equality counts as critical. Zero critical years is a legal
    labeling; operations that need criticals enforce their own minimums.
    """
    flags = tuple(v >= threshold.value for v in m.incidence)
    return CriticalLabels(m.years, flags, threshold)


def select_factors(m: TemporalMatrix, selection: FactorSelection) -> TemporalMatrix:
    """Project the matrix onto the selected factor columns."""
    selection.validate_against(m)
    return TemporalMatrix(
        years=m.years,
        incidence=m.incidence,
        factor_names=selection.names,
        columns={name: m.columns[name] for name in selection.names},
    )


def apply_lag(m: TemporalMatrix, factor: str, lag: int) -> TemporalMatrix:
    """Pair incidence of year t with the named factor's value from year t - lag.

    Lag counts rows (years, for a gap-free annual series). The first ``lag``
    rows, which lack a lagged value, are dropped; other factors are taken at
    year t. ``lag = 0`` is the identity.
    """
    return apply_uniform_lag(m, (factor,), lag)


def apply_uniform_lag(m: TemporalMatrix, factors: Iterable[str], lag: int) -> TemporalMatrix:
    """Apply one lag to several factor columns at once, dropping ``lag`` rows once."""
    names = tuple(factors)
    for name in names:
        if name not in m.columns:
            raise UnknownFactor(name)
    if lag < 0:
        raise ValueError("lag must be non-negative")
    if lag >= m.n_years:
        raise LagTooLarge(lag, m.n_years)
    if lag == 0:
        return m
    lagged = set(names)
    n = m.n_years
    return TemporalMatrix(
        years=m.years[lag:],
        incidence=m.incidence[lag:],
        factor_names=m.factor_names,
        columns={
            name: (col[: n - lag] if name in lagged else col[lag:])
            for name, col in m.columns.items()
        },
    )
