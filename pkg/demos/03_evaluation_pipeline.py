#!/usr/bin/env python3
"""End-to-end file pipeline: generate fixtures, attack, report, curves.

Everything below is also reachable from the command line:

    hardlabel generate mlp-model --dim 8 --samples 200 --seed 3 --out model.json
    hardlabel generate gaussian-dataset --dim 8 --samples 40 --seed 3 --out data.csv
    hardlabel attack --model model.json --data data.csv --epsilon 0.25 \
        --budget 2000 --algo hierarchical --mode full-budget --out results.json
    hardlabel report --results results.json --epsilon 0.25 \
        --out report.json --curves curve.csv --curve-kind adbd_vs_iterations
"""

import json
import tempfile
from pathlib import Path

from hardlabel import (
    RunConfig,
    cmd_attack,
    cmd_report,
    make_mlp_fixture,
    sample_gaussian_blobs,
    save_dataset,
    save_model,
)
from hardlabel.fixtures import examples_from_arrays


def main():
    workdir = Path(tempfile.mkdtemp(prefix="hardlabel-demo-"))
    model_path = workdir / "model.json"
    data_path = workdir / "data.csv"
    results_path = workdir / "results.json"
    report_path = workdir / "report.json"
    curve_path = workdir / "curve.csv"

    print(f"writing fixtures under {workdir}")
    save_model(make_mlp_fixture(8, n_train=200, separation=0.5, seed=3), model_path)
    feats, labels, _ = sample_gaussian_blobs(8, 40, 2, 0.5, seed=3)
    save_dataset(examples_from_arrays(feats, labels), data_path)

    records = cmd_attack(
        RunConfig(
            model_path=str(model_path),
            data_path=str(data_path),
            out_path=str(results_path),
            epsilon=0.25,
            budget=2000,
            algo="hierarchical",
            mode="full-budget",
        )
    )
    flagged = sum(r.misclassified_clean for r in records)
    print(f"attacked {len(records)} examples ({flagged} misclassified clean)")

    cmd_report(
        str(results_path),
        epsilon=0.25,
        out_path=str(report_path),
        curves_path=str(curve_path),
        curve_kind="adbd_vs_iterations",
    )
    print("\nreport.json:")
    print(json.dumps(json.loads(report_path.read_text()), indent=2))
    print("\nfirst curve rows:")
    for line in curve_path.read_text().splitlines()[:6]:
        print(f"  {line}")


if __name__ == "__main__":
    main()
