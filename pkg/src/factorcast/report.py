"""Deterministic report documents and their text / json / plot_csv renderings.

A report document carries the structured result plus run metadata (input
digest, configuration echo, tool version) already projected into three
byte-stable forms: aligned text tables, a canonical JSON body, and a
two-column (configuration, p) CSV for external plotting. Undefined precision
renders as ``undefined`` in text, ``null`` in JSON, and an empty cell in
plot_csv. Rendering the same document twice yields identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Mapping

from .backtest import BacktestResult
from .errors import ProfileError
from .matrix import CriticalLabels, TemporalMatrix
from .recognizer import IntervalProfile, QuorumRule, RecognitionResult
from .sweeps import SweepReport

PROFILE_FORMAT = "factorcast-profile"
PROFILE_VERSION = 1


def format_number(v: float) -> str:
    """Shortest decimal string that round-trips to the same float."""
    return repr(float(v))


def _cell(v) -> str:
    if v is None:
        return "undefined"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return format_number(v)
    return str(v)


@dataclass(frozen=True)
class ReportTable:
    title: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class ReportDocument:
    kind: str
    metadata: dict
    tables: tuple[ReportTable, ...]
    payload: dict
    plot_rows: tuple[tuple[str, float | None], ...]


def fit_report(
    metadata: Mapping,
    m: TemporalMatrix,
    labels: CriticalLabels,
    profile: IntervalProfile,
    rule: QuorumRule,
    result: RecognitionResult,
) -> ReportDocument:
    required = rule.required(profile.n_factors)
    profile_table = ReportTable(
        title=f"interval profile ({profile.n_critical_train} critical training years)",
        columns=("factor", "lo", "hi", "widen_eps"),
        rows=tuple(
            (iv.factor, _cell(iv.lo), _cell(iv.hi), _cell(iv.widen_eps))
            for iv in profile.intervals
        ),
    )
    flagged = set(result.flagged_years)
    year_table = ReportTable(
        title=f"per-year recognition (quorum requires {required} of {profile.n_factors})",
        columns=("year", "incidence", "critical", "membership", "flagged"),
        rows=tuple(
            (
                str(year),
                _cell(m.incidence[i]),
                _cell(labels.is_critical[i]),
                str(result.per_year_membership[year]),
                _cell(year in flagged),
            )
            for i, year in enumerate(m.years)
        ),
    )
    summary = ReportTable(
        title="recognition summary",
        columns=("x", "y", "p"),
        rows=((str(result.x), str(result.y), _cell(result.p)),),
    )
    payload = {
        "profile": profile.to_dict(),
        "quorum": rule.q,
        "required": required,
        "per_year": [
            {
                "year": year,
                "incidence": m.incidence[i],
                "critical": labels.is_critical[i],
                "membership": result.per_year_membership[year],
                "flagged": year in flagged,
            }
            for i, year in enumerate(m.years)
        ],
        "flagged_years": list(result.flagged_years),
        "x": result.x,
        "y": result.y,
        "p": result.p,
    }
    label = f"q={format_number(rule.q)}"
    return ReportDocument(
        kind="fit",
        metadata=dict(metadata),
        tables=(profile_table, year_table, summary),
        payload=payload,
        plot_rows=((label, result.p),),
    )


def classify_report(
    metadata: Mapping,
    profile: IntervalProfile,
    rule: QuorumRule,
    rows: tuple[tuple[int, int], ...],
) -> ReportDocument:
    """``rows`` holds (year, membership) pairs for the classified input rows."""
    required = rule.required(profile.n_factors)
    table = ReportTable(
        title=f"classification (quorum requires {required} of {profile.n_factors})",
        columns=("year", "membership", "prediction"),
        rows=tuple(
            (str(year), str(count), "critical" if count >= required else "non_critical")
            for year, count in rows
        ),
    )
    payload = {
        "quorum": rule.q,
        "required": required,
        "predictions": [
            {
                "year": year,
                "membership": count,
                "prediction": "critical" if count >= required else "non_critical",
            }
            for year, count in rows
        ],
    }
    n_critical = sum(1 for _, count in rows if count >= required)
    payload["n_predicted_critical"] = n_critical
    return ReportDocument(
        kind="classify",
        metadata=dict(metadata),
        tables=(table,),
        payload=payload,
        plot_rows=(),
    )


def backtest_report(metadata: Mapping, result: BacktestResult, rule: QuorumRule) -> ReportDocument:
    verdicts = ReportTable(
        title="verdicts",
        columns=("year", "prediction", "membership", "truth"),
        rows=tuple(
            (
                str(v.year),
                v.prediction,
                _cell(v.membership) if v.membership is not None else "-",
                _cell(v.truth) if v.truth is not None else "-",
            )
            for v in result.verdicts
        ),
    )
    summary = ReportTable(
        title="backtest summary",
        columns=("x", "y", "p", "no_forecast"),
        rows=((str(result.x), str(result.y), _cell(result.p), str(result.n_no_forecast)),),
    )
    payload = {
        "verdicts": [
            {
                "year": v.year,
                "prediction": v.prediction,
                "membership": v.membership,
                "truth": v.truth,
            }
            for v in result.verdicts
        ],
        "x": result.x,
        "y": result.y,
        "p": result.p,
        "n_no_forecast": result.n_no_forecast,
    }
    label = f"q={format_number(rule.q)}"
    return ReportDocument(
        kind="backtest",
        metadata=dict(metadata),
        tables=(verdicts, summary),
        payload=payload,
        plot_rows=((label, result.p),),
    )


def sweep_report_document(metadata: Mapping, report: SweepReport) -> ReportDocument:
    table = ReportTable(
        title=f"{report.axis} sweep",
        columns=("configuration", "status", "x", "y", "p", "no_forecast", "note"),
        rows=tuple(
            (
                row.configuration,
                row.status,
                _cell(row.x) if row.x is not None else "-",
                _cell(row.y) if row.y is not None else "-",
                _cell(row.p) if not (row.status == "skipped") else "-",
                _cell(row.n_no_forecast) if row.n_no_forecast is not None else "-",
                row.note,
            )
            for row in report.rows
        ),
    )
    payload = {
        "axis": report.axis,
        "rows": [
            {
                "configuration": row.configuration,
                "status": row.status,
                "x": row.x,
                "y": row.y,
                "p": row.p,
                "n_no_forecast": row.n_no_forecast,
                "note": row.note,
            }
            for row in report.rows
        ],
    }
    return ReportDocument(
        kind="sweep",
        metadata=dict(metadata),
        tables=(table,),
        payload=payload,
        plot_rows=tuple((row.configuration, row.p) for row in report.rows),
    )


def _render_text(doc: ReportDocument) -> str:
    lines = [f"factorcast {doc.kind} report"]
    lines.append("=" * len(lines[0]))
    for key, value in doc.metadata.items():
        lines.append(f"{key}: {_cell(value)}")
    for table in doc.tables:
        lines.append("")
        lines.append(table.title)
        widths = [len(col) for col in table.columns]
        for row in table.rows:
            for i, cell in enumerate(row):
                widths[i] = max(widths[i], len(cell))
        lines.append("  ".join(col.ljust(w) for col, w in zip(table.columns, widths)).rstrip())
        lines.append("  ".join("-" * w for w in widths))
        for row in table.rows:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _render_json(doc: ReportDocument) -> str:
    body = {"report": doc.kind, "metadata": doc.metadata, "result": doc.payload}
    return json.dumps(body, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def _render_plot_csv(doc: ReportDocument) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["configuration", "p"])
    for label, p in doc.plot_rows:
        writer.writerow([label, "" if p is None else format_number(p)])
    return out.getvalue()


REPORT_FORMATS = ("text", "json", "plot_csv")


def emit_report(doc: ReportDocument, format: str = "text") -> str:
    """Render the document byte-deterministically in the requested format."""
    if format == "text":
        return _render_text(doc)
    if format == "json":
        return _render_json(doc)
    if format == "plot_csv":
        return _render_plot_csv(doc)
    raise ValueError(f"format must be one of {REPORT_FORMATS}")


def profile_to_json(profile: IntervalProfile, rule: QuorumRule) -> str:
    """Persist a trained profile plus its quorum so classify can skip retraining."""
    doc = {
        "format": PROFILE_FORMAT,
        "version": PROFILE_VERSION,
        "quorum": rule.q,
        "profile": profile.to_dict(),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def profile_from_json(text: str) -> tuple[IntervalProfile, QuorumRule]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProfileError(f"profile document is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != PROFILE_FORMAT:
        raise ProfileError("not a factorcast profile document")
    if doc.get("version") != PROFILE_VERSION:
        raise ProfileError(f"unsupported profile version {doc.get('version')!r}")
    try:
        profile = IntervalProfile.from_dict(doc["profile"])
        rule = QuorumRule(float(doc["quorum"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ProfileError(f"malformed profile document: {exc}") from None
    return profile, rule
