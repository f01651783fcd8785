import json
import math
import subprocess
import sys

import numpy as np
import pytest

from hardlabel import (
    ConfigError,
    EmptyInput,
    Example,
    ResultRecord,
    RunConfig,
    cmd_attack,
    cmd_report,
    filter_correctly_classified,
    load_results,
    make_linear_model,
    make_mlp_fixture,
    run_attack,
    sample_gaussian_blobs,
    save_dataset,
    save_model,
    write_results,
)
from hardlabel.fixtures import examples_from_arrays
from hardlabel.harness import RecordMetricsView
from hardlabel.metrics import evaluation_report


@pytest.fixture(scope="module")
def linear_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("linear")
    model_path = root / "model.json"
    data_path = root / "data.csv"
    save_model(make_linear_model([1.0, 1.0], 1.0), model_path)
    data_path.write_text("0,0.2,0.2\n1,0.9,0.9\n0,0.8,0.8\n")  # last row mislabelled
    return str(model_path), str(data_path), root


@pytest.fixture(scope="module")
def mlp_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("mlp")
    model_path = root / "model.json"
    data_path = root / "data.csv"
    save_model(make_mlp_fixture(8, n_train=200, separation=0.5, seed=3), model_path)
    feats, labels, _ = sample_gaussian_blobs(8, 24, 2, 0.5, seed=3)
    save_dataset(examples_from_arrays(feats, labels), data_path)
    return str(model_path), str(data_path), root


def _config(model, data, out, **kw):
    base = dict(
        model_path=model,
        data_path=data,
        out_path=str(out),
        epsilon=0.35,
        budget=500,
        tol=1e-3,
        algo="hierarchical",
        mode="early-stop",
    )
    base.update(kw)
    return RunConfig(**base)


def test_attack_writes_one_record_per_example_in_order(linear_files):
    model, data, root = linear_files
    records = cmd_attack(_config(model, data, root / "out.json"))
    assert [r.example_index for r in records] == [0, 1, 2]
    assert all(r.queries_used <= 500 for r in records)


def test_misclassified_clean_is_flagged_success(linear_files):
    model, data, root = linear_files
    records = cmd_attack(_config(model, data, root / "out2.json"))
    flagged = records[2]
    assert flagged.misclassified_clean
    assert flagged.r_best == 0.0 and flagged.success
    assert flagged.queries_used == 1
    assert not records[0].misclassified_clean


def test_deterministic_files_across_runs_and_parallelism(mlp_files):
    model, data, root = mlp_files
    blobs = []
    for algo in ("hierarchical", "naive"):
        for tag, parallelism in (("a", 1), ("b", 8), ("c", 1)):
            out = root / f"{algo}-{tag}.json"
            cmd_attack(_config(model, data, out, algo=algo, parallelism=parallelism))
            blobs.append(out.read_bytes())
        assert blobs[-3] == blobs[-2] == blobs[-1]


def test_random_baseline_seeded_determinism(mlp_files):
    model, data, root = mlp_files
    outs = []
    for tag in ("a", "b"):
        out = root / f"base-{tag}.json"
        cmd_attack(_config(model, data, out, algo="random-baseline", seed=7))
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    out3 = root / "base-c.json"
    cmd_attack(_config(model, data, out3, algo="random-baseline", seed=8))
    assert out3.read_bytes() != outs[0]


def test_empty_dataset_yields_empty_results_file(linear_files, tmp_path):
    model, _, _ = linear_files
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    out = tmp_path / "out.json"
    records = cmd_attack(_config(model, str(empty), out))
    assert records == []
    assert json.loads(out.read_text()) == []


def test_budget_ceiling_holds(mlp_files):
    model, data, root = mlp_files
    records = cmd_attack(
        _config(model, data, root / "tight.json", budget=30, mode="full-budget")
    )
    assert all(r.queries_used <= 30 for r in records)
    assert any(r.queries_used == 30 for r in records)  # the cap actually bites


def test_record_round_trip_encodes_infinity_as_null(tmp_path):
    rec = ResultRecord(
        example_index=0,
        clean_label=1,
        predicted_label=1,
        queries_used=12,
        r_best=None,
        linf_distortion=None,
        success=False,
        history=[(1, None), (12, None)],
    )
    path = tmp_path / "r.json"
    write_results([rec], path)
    raw = json.loads(path.read_text())
    assert raw[0]["r_best"] is None
    assert raw[0]["history"][1] == [12, None]
    again = load_results(path)[0]
    assert again == rec


def test_report_aggregation_from_file(tmp_path):
    recs = [
        ResultRecord(i, 0, 0, q, 0.1 * math.sqrt(4), 0.1, True, [[1, None], [q, 0.2]])
        for i, q in enumerate((40, 47, 234))
    ]
    path = tmp_path / "r.json"
    write_results(recs, path)
    report = cmd_report(str(path), epsilon=0.3, out_path=str(tmp_path / "rep.json"))
    assert report.asr == 1.0
    assert report.avg_queries == 107.0
    assert report.median_queries == 47.0
    doc = json.loads((tmp_path / "rep.json").read_text())
    assert doc["asr"] == 1.0 and doc["failures_capped"] == 0


def test_report_capped_failure_arithmetic(tmp_path):
    dim_root = math.sqrt(4)
    recs = [
        ResultRecord(0, 0, 0, 10, 0.02 * dim_root, 0.02, True, [[10, 0.02 * dim_root]]),
        ResultRecord(1, 0, 0, 11, 0.04 * dim_root, 0.04, True, [[11, 0.04 * dim_root]]),
        ResultRecord(2, 0, 0, 12, None, None, False, [[12, None]]),
    ]
    path = tmp_path / "r.json"
    write_results(recs, path)
    report = cmd_report(str(path), epsilon=0.05, cap=1.0)
    assert report.adbd == pytest.approx(0.35333333333333333)
    assert report.failures_capped == 1


def test_report_empty_results_raises(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("[]\n")
    with pytest.raises(EmptyInput):
        cmd_report(str(path), epsilon=0.3)


def test_filter_consistency(mlp_files, tmp_path):
    model, data, root = mlp_files
    records = cmd_attack(_config(model, data, root / "filter.json"))
    kept = filter_correctly_classified(records)
    assert all(not r.misclassified_clean for r in kept)
    direct = evaluation_report([RecordMetricsView(r) for r in kept], 0.35)
    rewritten = tmp_path / "kept.json"
    write_results(kept, rewritten)
    via_file = cmd_report(str(rewritten), epsilon=0.35)
    assert direct == via_file


def test_record_metrics_view_matches_attack_result(mlp_files):
    from hardlabel import HardLabelOracle, StoppingRule, load_dataset, load_model
    from hardlabel.search import rays_hierarchical

    model_path, data_path, _ = mlp_files
    model = load_model(model_path)
    ex = load_dataset(data_path)[0]
    oracle = HardLabelOracle(model, budget=500)
    result = rays_hierarchical(oracle, ex, 1e-3, StoppingRule(budget=500))
    record = ResultRecord.from_attack(0, ex, result, epsilon=0.35)
    view = RecordMetricsView(record)
    assert view.linf_distortion == result.linf_distortion
    assert view.linf_history() == result.linf_history()  # bitwise round trip


def test_config_validation(linear_files):
    model, data, root = linear_files
    bad = _config(model, data, root / "x.json")
    bad.epsilon = 1.5
    with pytest.raises(ConfigError):
        run_attack(bad)
    bad = _config(model, data, root / "x.json")
    bad.tol = 0.5  # tol must stay below epsilon
    with pytest.raises(ConfigError):
        run_attack(bad)
    bad = _config(model, data, root / "x.json", algo="gradient")
    with pytest.raises(ConfigError):
        run_attack(bad)


def test_dimension_and_label_checks(linear_files, tmp_path):
    model, _, _ = linear_files
    wide = tmp_path / "wide.csv"
    wide.write_text("0,0.2,0.2,0.2\n")
    with pytest.raises(ConfigError):
        run_attack(_config(model, str(wide), tmp_path / "o.json"))
    high = tmp_path / "high.csv"
    high.write_text("7,0.2,0.2\n")
    with pytest.raises(ConfigError):
        run_attack(_config(model, str(high), tmp_path / "o.json"))


def _cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "hardlabel.cli", *args],
        capture_output=True,
        text=True,
    )


def test_cli_end_to_end(tmp_path):
    model = tmp_path / "model.json"
    data = tmp_path / "data.csv"
    results = tmp_path / "results.json"
    report = tmp_path / "report.json"
    curves = tmp_path / "curves.csv"
    assert _cli("generate", "linear-model", "--dim", "2", "--weights", "1,1",
                "--threshold", "1", "--out", str(model)).returncode == 0
    assert _cli("generate", "gaussian-dataset", "--dim", "2", "--samples", "12",
                "--separation", "0.6", "--seed", "1", "--out", str(data)).returncode == 0
    run = _cli("attack", "--model", str(model), "--data", str(data),
               "--epsilon", "0.3", "--budget", "200", "--algo", "hierarchical",
               "--mode", "early-stop", "--out", str(results))
    assert run.returncode == 0, run.stderr
    rep = _cli("report", "--results", str(results), "--epsilon", "0.3",
               "--out", str(report), "--curves", str(curves))
    assert rep.returncode == 0, rep.stderr
    doc = json.loads(report.read_text())
    assert set(doc) == {
        "n_examples", "asr", "avg_queries", "median_queries",
        "adbd", "robust_accuracy", "failures_capped",
    }
    assert curves.read_text().startswith("query_count,value")


def test_cli_generate_is_reproducible(tmp_path):
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / f"{tag}.csv"
        assert _cli("generate", "gaussian-dataset", "--dim", "4", "--samples", "9",
                    "--seed", "5", "--out", str(out)).returncode == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_cli_failure_emits_machine_readable_error(tmp_path):
    run = _cli("attack", "--model", str(tmp_path / "missing.json"),
               "--data", str(tmp_path / "missing.csv"), "--epsilon", "0.3",
               "--out", str(tmp_path / "o.json"))
    assert run.returncode == 1
    err = json.loads(run.stderr.strip().splitlines()[-1])
    assert err["error"] == "ParseError"
    assert "missing.json" in err["message"]


def test_cli_bad_config_exits_nonzero(tmp_path):
    model = tmp_path / "m.json"
    data = tmp_path / "d.csv"
    _cli("generate", "linear-model", "--dim", "2", "--out", str(model))
    data.write_text("0,0.2,0.2\n")
    run = _cli("attack", "--model", str(model), "--data", str(data),
               "--epsilon", "2.0", "--out", str(tmp_path / "o.json"))
    assert run.returncode == 1
    assert json.loads(run.stderr.strip())["error"] == "ConfigError"
