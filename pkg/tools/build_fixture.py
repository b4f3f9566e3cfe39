#!/usr/bin/env python3
"""Rebuild the bundled market fixture and the golden render files.

Calibrates the canonical automobile-market ground truth, regenerates its
survey sample, and freezes everything the test suite compares against:

* ``src/cvmkit/data/market_truth.json``  — the calibrated ground truth
* ``src/cvmkit/data/market_survey.csv``  — the generated survey sample
* ``tests/golden/profile_*.txt``         — rendered profile tables
* ``tests/golden/report.txt``            — full text report (CLI `report`)

Everything here is deterministic, so rerunning the script after an algorithm
change either reproduces the files byte-for-byte or shows exactly what
drifted.  Run from the repository root::

    python3 tools/build_fixture.py
"""

from __future__ import annotations

import sys
from pathlib import Path

from click.testing import CliRunner

from cvmkit.analytics import profile_table
from cvmkit.cli import main as cli_main
from cvmkit.datasets import automobile_tree
from cvmkit.regression import fit_hierarchy
from cvmkit.rendering import render_profile_table
from cvmkit.simulate import (
    calibrate_to_tables,
    canonical_targets,
    generate_market,
    save_truth,
)
from cvmkit.survey import split_by_supplier, write_survey

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "src" / "cvmkit" / "data"
GOLDEN = REPO / "tests" / "golden"


def main() -> int:
    tree = automobile_tree()
    print("calibrating canonical targets ...")
    truth = calibrate_to_tables(canonical_targets(tree))
    sample = generate_market(truth)

    DATA.mkdir(parents=True, exist_ok=True)
    save_truth(truth, DATA / "market_truth.json")
    write_survey(sample, DATA / "market_survey.csv")
    print(f"wrote {DATA / 'market_truth.json'}")
    print(f"wrote {DATA / 'market_survey.csv'}  ({len(sample)} respondents)")

    own, competitors = split_by_supplier(sample)
    hierarchy = fit_hierarchy(sample, tree)
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for parent in ("worth_what_paid_for", "quality", "delivery_process"):
        table = profile_table(hierarchy, own, competitors, parent)
        path = GOLDEN / f"profile_{parent}.txt"
        path.write_text(render_profile_table(table), encoding="utf-8")
        print(f"wrote {path}")

    runner = CliRunner()
    result = runner.invoke(
        cli_main,
        [
            "report",
            "--tree", str(DATA / "automobile.tree"),
            "--survey", str(DATA / "market_survey.csv"),
            "--own", "our_co",
            "--target-loyalty", "0.80",
        ],
    )
    if result.exit_code != 0:
        print("report command failed:", result.output, file=sys.stderr)
        return 1
    (GOLDEN / "report.txt").write_text(result.output, encoding="utf-8")
    print(f"wrote {GOLDEN / 'report.txt'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
