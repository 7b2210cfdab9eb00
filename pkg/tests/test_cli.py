"""CLI behavior: exit codes, determinism, and committed golden outputs.

Regenerate the golden files after an intentional output change with::

    REGEN_GOLDEN=1 pytest tests/test_cli.py

and review the diff before committing.
"""

import json
import os

import pytest

from factorcast.cli import main

from _support import GOLDEN, GOLDEN_CASES, run_cli_to_file, setup_cli_workdir

REGEN = os.environ.get("REGEN_GOLDEN") == "1"


@pytest.fixture
def workdir(tmp_path, capsys):
    path = setup_cli_workdir(tmp_path)
    capsys.readouterr()
    return path


def we_args(workdir, *extra):
    return ["--input", str(workdir / "worked_example.csv"), *extra]


class TestGolden:
    @pytest.mark.parametrize("name,argv_for", GOLDEN_CASES, ids=[c[0] for c in GOLDEN_CASES])
    def test_matches_golden_and_reruns_identically(self, workdir, name, argv_for):
        argv = argv_for(workdir)
        first = run_cli_to_file(argv, workdir / f"first_{name}")
        second = run_cli_to_file(argv, workdir / f"second_{name}")
        assert first == second
        golden_path = GOLDEN / name
        if REGEN:
            golden_path.write_bytes(first)
        assert first == golden_path.read_bytes()

    def test_profile_document_matches_golden(self, workdir):
        produced = (workdir / "profile.json").read_bytes()
        golden_path = GOLDEN / "profile.json"
        if REGEN:
            golden_path.write_bytes(produced)
        assert produced == golden_path.read_bytes()

    def test_synth_files_match_golden(self, workdir):
        out = workdir / "synthetic_small.csv"
        argv = [
            "synth",
            "--seed", "7",
            "--years", "10",
            "--factors", "3",
            "--output", str(out),
        ]
        assert main(argv) == 0
        data = out.read_bytes()
        truth = (workdir / "synthetic_small_truth.csv").read_bytes()
        for name, produced in (("synth.csv", data), ("synth_truth.csv", truth)):
            golden_path = GOLDEN / name
            if REGEN:
                golden_path.write_bytes(produced)
            assert produced == golden_path.read_bytes()


class TestBehavior:
    def test_fit_reports_worked_example_counts(self, workdir, capsys):
        code = main(
            ["fit", *we_args(workdir, "--threshold", "8", "--quorum", "1.0", "--format", "json")]
        )
        assert code == 0
        body = json.loads(capsys.readouterr().out)
        assert body["result"]["x"] == 3
        assert body["result"]["y"] == 1
        assert body["result"]["p"] == 0.75

    def test_percent_quorum_normalized(self, workdir, capsys):
        base = ["fit", *we_args(workdir, "--threshold", "8", "--format", "json")]
        assert main([*base, "--quorum", "75%"]) == 0
        with_percent = capsys.readouterr().out
        assert main([*base, "--quorum", "0.75"]) == 0
        with_fraction = capsys.readouterr().out
        assert with_percent == with_fraction

    def test_classify_round_trip(self, workdir, capsys):
        code = main(
            [
                "classify",
                "--input", str(workdir / "worked_example.csv"),
                "--profile", str(workdir / "profile.json"),
                "--format", "json",
            ]
        )
        assert code == 0
        body = json.loads(capsys.readouterr().out)
        predictions = {row["year"]: row["prediction"] for row in body["result"]["predictions"]}
        assert predictions[2001] == "critical"
        assert predictions[2002] == "non_critical"
        assert predictions[2006] == "critical"

    def test_classify_accepts_factor_only_csv(self, workdir, tmp_path, capsys):
        rows = tmp_path / "rows.csv"
        rows.write_text("year,may_temp\n2031,6.5\n2032,1.0\n", encoding="utf-8")
        code = main(
            [
                "classify",
                "--input", str(rows),
                "--profile", str(workdir / "profile.json"),
                "--format", "json",
            ]
        )
        assert code == 0
        body = json.loads(capsys.readouterr().out)
        predictions = {row["year"]: row["prediction"] for row in body["result"]["predictions"]}
        assert predictions == {2031: "critical", 2032: "non_critical"}

    def test_synth_twice_is_identical(self, tmp_path, capsys):
        args = ["synth", "--seed", "7", "--years", "30", "--factors", "8"]
        assert main([*args, "--output", str(tmp_path / "a.csv")]) == 0
        assert main([*args, "--output", str(tmp_path / "b.csv")]) == 0
        capsys.readouterr()
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a_truth.csv").read_bytes() == (tmp_path / "b_truth.csv").read_bytes()

    def test_lag_flag_drops_leading_rows(self, workdir, capsys):
        assert (
            main(
                [
                    "fit",
                    *we_args(
                        workdir,
                        "--threshold", "8",
                        "--quorum", "1.0",
                        "--lag", "1",
                        "--format", "json",
                    ),
                ]
            )
            == 0
        )
        body = json.loads(capsys.readouterr().out)
        assert body["metadata"]["lag"] == 1
        assert len(body["result"]["per_year"]) == 5


class TestExitCodes:
    def test_usage_error_is_one(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["fit"])  # missing --input and threshold flags
        assert err.value.code == 1

    def test_unknown_subcommand_is_one(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == 1

    def test_bad_quorum_is_usage_error(self, workdir, capsys):
        with pytest.raises(SystemExit) as err:
            main(["fit", *we_args(workdir, "--threshold", "8", "--quorum", "2.0")])
        assert err.value.code == 1

    def test_data_error_is_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("year,incidence,f\n1990,1,2\n1990,3,4\n1991,5,6\n")
        assert main(["fit", "--input", str(bad), "--threshold", "1"]) == 2
        assert "duplicate year" in capsys.readouterr().err

    def test_missing_file_is_two(self, tmp_path, capsys):
        assert main(["fit", "--input", str(tmp_path / "nope.csv"), "--threshold", "1"]) == 2

    def test_insufficient_criticals_is_two(self, workdir, capsys):
        code = main(["fit", *we_args(workdir, "--threshold", "99", "--min-critical", "2")])
        assert code == 2
        assert "critical years" in capsys.readouterr().err

    def test_sweep_requires_threshold_for_non_threshold_axes(self, workdir, capsys):
        with pytest.raises(SystemExit) as err:
            main(["sweep", *we_args(workdir, "--axis", "quorum", "--grid", "0.5,1.0")])
        assert err.value.code == 1
