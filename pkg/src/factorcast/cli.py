"""Command line front end.

Subcommands: ``fit`` (build a profile and score it in-sample), ``classify``
(apply a saved profile to new factor rows), ``backtest`` (rolling / leave-one-
out / in-sample replay), ``sweep`` (vary one configuration axis), and
``synth`` (write a synthetic dataset plus its ground truth). Reports go to
stdout unless ``--output`` names a file; no subcommand writes anywhere else.

Exit codes: 0 success, 1 usage error, 2 data or validation error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import os
import sys
from pathlib import Path

from . import __version__
from .backtest import BacktestConfig, rolling_backtest, select_threshold
from .errors import (
    FactorcastError,
    InsufficientCriticalYears,
    MatrixError,
    MissingFactorValue,
    NonNumericCell,
)
from .matrix import (
    CriticalThreshold,
    FactorSelection,
    TemporalMatrix,
    apply_uniform_lag,
    label_critical,
    parse_matrix,
)
from .recognizer import QuorumRule, build_profile, evaluate_insample, membership_count
from .report import (
    REPORT_FORMATS,
    backtest_report,
    classify_report,
    emit_report,
    fit_report,
    profile_from_json,
    profile_to_json,
    sweep_report_document,
)
from .sweeps import SWEEP_AXES, SweepSpec, run_sweep
from .synth import PlantSpec, generate


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit 1 (2 is for data errors)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _quorum(text: str) -> float:
    """Fraction in (0, 1]; percent input such as '75%' is normalized."""
    raw = text.strip()
    try:
        if raw.endswith("%"):
            value = float(raw[:-1]) / 100.0
        else:
            value = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid quorum {text!r}") from None
    if not (0.0 < value <= 1.0):
        raise argparse.ArgumentTypeError(f"quorum must be in (0, 1], got {text!r}")
    return value


def _positive_int(minimum: int):
    def convert(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"value must be at least {minimum}")
        return value

    return convert


def _nonnegative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("value must be non-negative")
    return value


def _add_threshold_flags(sub: argparse.ArgumentParser, required: bool) -> None:
    group = sub.add_mutually_exclusive_group(required=required)
    group.add_argument("--threshold", type=float, help="expert critical incidence line")
    group.add_argument(
        "--select-threshold",
        action="store_true",
        help="pick the largest observed incidence yielding at least --min-critical criticals",
    )


def _add_common_flags(sub: argparse.ArgumentParser, min_critical_floor: int) -> None:
    sub.add_argument("--input", required=True, help="input CSV (year,incidence,<factor>...)")
    sub.add_argument(
        "--min-critical",
        type=_positive_int(min_critical_floor),
        default=2,
        help="minimum critical years the labeling must yield (default 2)",
    )
    sub.add_argument(
        "--quorum",
        type=_quorum,
        default=0.75,
        help="fraction of factor intervals a year must hit; accepts 0.75 or 75%% (default 0.75)",
    )
    sub.add_argument("--factors", help="comma-separated factor columns (default: all)")
    sub.add_argument(
        "--lag",
        type=_positive_int(0),
        default=0,
        help="shift selected factors this many years earlier before analysis (default 0)",
    )
    sub.add_argument(
        "--widen-eps",
        type=_nonnegative_float,
        default=0.0,
        help="symmetric interval widening (default 0)",
    )
    sub.add_argument("--format", choices=REPORT_FORMATS, default="text")
    sub.add_argument("--output", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="factorcast",
        description="Interval-envelope recognition and forecasting of critical years",
    )
    parser.add_argument("--version", action="version", version=f"factorcast {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    fit = commands.add_parser("fit", help="build an interval profile and score it in-sample")
    _add_common_flags(fit, min_critical_floor=1)
    _add_threshold_flags(fit, required=True)
    fit.add_argument("--save-profile", help="persist the profile as JSON for classify")
    fit.set_defaults(func=cmd_fit)

    classify = commands.add_parser("classify", help="apply a saved profile to new factor rows")
    classify.add_argument("--input", required=True, help="CSV of year plus factor columns")
    classify.add_argument("--profile", required=True, help="profile JSON written by fit")
    classify.add_argument("--format", choices=REPORT_FORMATS, default="text")
    classify.add_argument("--output", help="write the report here instead of stdout")
    classify.set_defaults(func=cmd_classify)

    backtest = commands.add_parser("backtest", help="replay recognition over the series")
    _add_common_flags(backtest, min_critical_floor=2)
    _add_threshold_flags(backtest, required=True)
    backtest.add_argument(
        "--mode",
        choices=("rolling", "leave_one_out", "in_sample"),
        default="rolling",
    )
    backtest.add_argument(
        "--min-train-years",
        type=_positive_int(3),
        default=5,
        help="years required before the first rolling forecast (default 5)",
    )
    backtest.set_defaults(func=cmd_backtest)

    sweep = commands.add_parser("sweep", help="vary one configuration axis over a grid")
    _add_common_flags(sweep, min_critical_floor=2)
    _add_threshold_flags(sweep, required=False)
    sweep.add_argument("--axis", choices=SWEEP_AXES, required=True)
    sweep.add_argument(
        "--grid",
        required=True,
        help=(
            "comma-separated grid values; for factor_subset use 'all' or"
            " '+'-joined subsets such as a,a+b"
        ),
    )
    sweep.add_argument(
        "--mode",
        choices=("rolling", "leave_one_out", "in_sample"),
        default="in_sample",
    )
    sweep.add_argument("--min-train-years", type=_positive_int(3), default=5)
    sweep.set_defaults(func=cmd_sweep)

    synth = commands.add_parser("synth", help="write a synthetic dataset and its ground truth")
    synth.add_argument("--output", required=True, help="dataset CSV path")
    synth.add_argument(
        "--truth-output",
        help="ground-truth CSV path (default: dataset path with _truth suffix)",
    )
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--years", type=_positive_int(5), default=30)
    synth.add_argument("--factors", type=_positive_int(1), default=8)
    synth.add_argument("--critical-fraction", type=_nonnegative_float, default=0.3)
    synth.add_argument("--noise", type=_nonnegative_float, default=0.0)
    synth.add_argument("--lag-shift", type=_positive_int(0), default=0)
    synth.add_argument("--regime-change-year", type=int, default=None)
    synth.add_argument("--adversarial", type=_positive_int(0), default=0)
    synth.add_argument("--threshold", type=float, default=10.0, help="incidence threshold")
    synth.add_argument("--start-year", type=int, default=1990)
    synth.set_defaults(func=cmd_synth)

    return parser


def _read_input(path: str) -> tuple[str, TemporalMatrix]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise MatrixError(f"cannot read input {path!r}: {exc}") from None
    digest = hashlib.sha256(raw).hexdigest()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MatrixError(f"input {path!r} is not UTF-8: {exc}") from None
    return digest, parse_matrix(text)


def _selection(args, m: TemporalMatrix) -> FactorSelection:
    if args.factors:
        names = tuple(name.strip() for name in args.factors.split(","))
        selection = FactorSelection(names)
        selection.validate_against(m)
        return selection
    return FactorSelection.all_of(m)


def _resolve_threshold(args, m: TemporalMatrix) -> CriticalThreshold:
    if args.select_threshold:
        return select_threshold(m, args.min_critical)
    return CriticalThreshold(args.threshold, "expert")


def _base_metadata(args, command: str, digest: str) -> dict:
    return {
        "tool": "factorcast",
        "version": __version__,
        "command": command,
        "input": os.path.basename(args.input),
        "input_sha256": digest,
    }


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="")


def cmd_fit(args) -> int:
    digest, m = _read_input(args.input)
    selection = _selection(args, m)
    if args.lag:
        m = apply_uniform_lag(m, selection.names, args.lag)
    threshold = _resolve_threshold(args, m)
    labels = label_critical(m, threshold)
    if labels.n_critical < args.min_critical:
        raise InsufficientCriticalYears(labels.n_critical, args.min_critical)
    rule = QuorumRule(args.quorum)
    profile = build_profile(m, labels, selection, args.widen_eps)
    result = evaluate_insample(m, labels, profile, rule)

    metadata = _base_metadata(args, "fit", digest)
    metadata.update(
        threshold=threshold.value,
        threshold_source=threshold.source,
        quorum=rule.q,
        factors=",".join(selection.names),
        lag=args.lag,
        widen_eps=args.widen_eps,
        min_critical=args.min_critical,
    )
    doc = fit_report(metadata, m, labels, profile, rule, result)
    _write_output(emit_report(doc, args.format), args.output)
    if args.save_profile:
        Path(args.save_profile).write_text(
            profile_to_json(profile, rule), encoding="utf-8", newline=""
        )
    return 0


def _parse_factor_rows(text: str, wanted: tuple[str, ...]) -> tuple[tuple[int, dict], ...]:
    """Rows of (year, factor values) from a relaxed CSV: year plus factor columns.

    An ``incidence`` column, if present, is ignored; extra columns are too.
    """
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader]
    while rows and rows[-1] == []:
        rows.pop()
    if not rows:
        raise MatrixError("empty document")
    header = [cell.strip() for cell in rows[0]]
    if not header or header[0] != "year":
        raise MatrixError("header must start with 'year'")
    positions = {}
    for name in wanted:
        try:
            positions[name] = header.index(name)
        except ValueError:
            raise MissingFactorValue(name) from None
    out = []
    for lineno, raw in enumerate(rows[1:], start=2):
        cells = [cell.strip() for cell in raw]
        if len(cells) != len(header):
            raise MatrixError(f"row {lineno} has {len(cells)} cells, expected {len(header)}")
        try:
            year = int(cells[0])
        except ValueError:
            raise NonNumericCell(lineno, "year", cells[0]) from None
        values = {}
        for name, idx in positions.items():
            try:
                values[name] = float(cells[idx])
            except ValueError:
                raise NonNumericCell(lineno, header[idx], cells[idx]) from None
        out.append((year, values))
    return tuple(out)


def cmd_classify(args) -> int:
    try:
        profile_text = Path(args.profile).read_text(encoding="utf-8")
    except OSError as exc:
        raise MatrixError(f"cannot read profile {args.profile!r}: {exc}") from None
    profile, rule = profile_from_json(profile_text)

    try:
        raw = Path(args.input).read_bytes()
    except OSError as exc:
        raise MatrixError(f"cannot read input {args.input!r}: {exc}") from None
    digest = hashlib.sha256(raw).hexdigest()
    rows = _parse_factor_rows(raw.decode("utf-8"), profile.factor_names)
    scored = tuple((year, membership_count(values, profile)) for year, values in rows)
    metadata = _base_metadata(args, "classify", digest)
    metadata.update(
        profile=os.path.basename(args.profile),
        quorum=rule.q,
        factors=",".join(profile.factor_names),
    )
    doc = classify_report(metadata, profile, rule, scored)
    _write_output(emit_report(doc, args.format), args.output)
    return 0


def cmd_backtest(args) -> int:
    digest, m = _read_input(args.input)
    selection = _selection(args, m)
    if args.lag:
        m = apply_uniform_lag(m, selection.names, args.lag)
    threshold = _resolve_threshold(args, m)
    labels = label_critical(m, threshold)
    rule = QuorumRule(args.quorum)
    cfg = BacktestConfig(
        rule=rule,
        threshold=threshold,
        min_train_years=args.min_train_years,
        min_train_critical=args.min_critical,
        eval_mode=args.mode,
        widen_eps=args.widen_eps,
    )
    result = rolling_backtest(m, labels, selection, cfg)

    metadata = _base_metadata(args, "backtest", digest)
    metadata.update(
        threshold=threshold.value,
        threshold_source=threshold.source,
        quorum=rule.q,
        factors=",".join(selection.names),
        lag=args.lag,
        mode=args.mode,
        min_train_years=args.min_train_years,
        min_critical=args.min_critical,
        widen_eps=args.widen_eps,
    )
    doc = backtest_report(metadata, result, rule)
    _write_output(emit_report(doc, args.format), args.output)
    return 0


def _parse_grid(args, parser_error) -> tuple | None:
    raw = args.grid.strip()
    if args.axis == "factor_subset":
        if raw == "all":
            return None
        return tuple(tuple(part.split("+")) for part in raw.split(","))
    values = [part.strip() for part in raw.split(",") if part.strip()]
    if not values:
        parser_error("empty --grid")
    try:
        if args.axis in ("lag", "row_length"):
            return tuple(int(v) for v in values)
        return tuple(float(v) for v in values)
    except ValueError:
        parser_error(f"invalid --grid value in {raw!r}")


def cmd_sweep(args) -> int:
    digest, m = _read_input(args.input)
    selection = _selection(args, m)
    if args.lag:
        m = apply_uniform_lag(m, selection.names, args.lag)
    grid = args.grid_values
    rule = QuorumRule(args.quorum)

    if args.axis == "threshold":
        # The axis varies the threshold itself; the config echoes grid[0].
        threshold = CriticalThreshold(float(grid[0]), "selected")
        labels = None
    else:
        threshold = _resolve_threshold(args, m)
        labels = label_critical(m, threshold)

    cfg = BacktestConfig(
        rule=rule,
        threshold=threshold,
        min_train_years=args.min_train_years,
        min_train_critical=args.min_critical,
        eval_mode=args.mode,
        widen_eps=args.widen_eps,
    )
    spec = SweepSpec(axis=args.axis, selection=selection, config=cfg, grid=grid)
    report = run_sweep(m, labels, spec)

    metadata = _base_metadata(args, "sweep", digest)
    metadata.update(
        axis=args.axis,
        grid=args.grid,
        quorum=rule.q,
        factors=",".join(selection.names),
        lag=args.lag,
        mode=args.mode,
        min_critical=args.min_critical,
    )
    if args.axis != "threshold":
        metadata.update(threshold=threshold.value, threshold_source=threshold.source)
    doc = sweep_report_document(metadata, report)
    _write_output(emit_report(doc, args.format), args.output)
    return 0


def cmd_synth(args) -> int:
    spec = PlantSpec(
        n_years=args.years,
        n_factors=args.factors,
        seed=args.seed,
        critical_fraction=args.critical_fraction,
        noise_prob=args.noise,
        lag_shift=args.lag_shift,
        regime_change_year=args.regime_change_year,
        n_adversarial=args.adversarial,
        incidence_threshold=args.threshold,
        start_year=args.start_year,
    )
    matrix, truth = generate(spec)
    output = Path(args.output)
    truth_path = (
        Path(args.truth_output)
        if args.truth_output
        else output.with_name(output.stem + "_truth.csv")
    )
    output.write_text(matrix.to_csv(), encoding="utf-8", newline="")
    truth_path.write_text(truth.to_csv(), encoding="utf-8", newline="")
    sys.stdout.write(
        f"wrote {matrix.n_years} years x {matrix.n_factors} factors to {output}"
        f" (ground truth: {truth_path})\n"
    )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep":
        args.grid_values = _parse_grid(args, parser.error)
        if args.axis != "threshold" and args.threshold is None and not args.select_threshold:
            parser.error("one of --threshold or --select-threshold is required for this axis")
    if args.command == "fit" and args.select_threshold and args.min_critical < 2:
        parser.error("--select-threshold requires --min-critical of at least 2")
    try:
        return args.func(args)
    except FactorcastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
