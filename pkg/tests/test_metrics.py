import math

import numpy as np
import pytest

from hardlabel import (
    EmptyInput,
    MissingHistory,
    NoSuccesses,
    adbd,
    attack_success_rate,
    build_curves,
    evaluation_report,
    query_stats,
    robust_accuracy,
)


class FakeResult:
    """Minimal record satisfying the metrics input contract."""

    def __init__(self, linf, queries=10, history=None):
        self.linf_distortion = linf
        self.queries_used = queries
        self._history = history

    def linf_history(self):
        if self._history is None:
            return [(1, self.linf_distortion)]
        return self._history


def test_asr_arithmetic():
    results = [FakeResult(0.01)] * 998 + [FakeResult(math.inf)] * 2
    assert attack_success_rate(results, 0.031) == 0.998
    assert attack_success_rate([FakeResult(0.0)] * 5, 0.3) == 1.0


def test_asr_boundary_is_inclusive():
    assert attack_success_rate([FakeResult(0.3)], 0.3) == 1.0
    assert attack_success_rate([FakeResult(0.300001)], 0.3) == 0.0


def test_asr_empty_input():
    with pytest.raises(EmptyInput):
        attack_success_rate([], 0.3)


def test_query_stats_aggregation():
    results = [FakeResult(0.1, q) for q in (40, 47, 234)]
    avg, med = query_stats(results, 0.3)
    assert avg == 107.0
    assert med == 47.0


def test_query_stats_singleton_and_even_median():
    assert query_stats([FakeResult(0.0, 1)], 0.3) == (1.0, 1.0)
    results = [FakeResult(0.1, q) for q in (10, 20, 30, 40)]
    assert query_stats(results, 0.3)[1] == 25.0


def test_query_stats_ignores_failures():
    results = [FakeResult(0.1, 10), FakeResult(math.inf, 9999)]
    assert query_stats(results, 0.3) == (10.0, 10.0)
    with pytest.raises(NoSuccesses):
        query_stats([FakeResult(math.inf, 5)], 0.3)


def test_adbd_equals_mean_distortion_when_all_succeed_uncapped():
    values = [0.02, 0.11, 0.07, 0.2]
    results = [FakeResult(v) for v in values]
    assert adbd(results, cap=1.0) == math.fsum(values) / len(values)


def test_adbd_arithmetic():
    assert adbd([FakeResult(0.1)] * 4) == pytest.approx(0.1)
    mixed = [FakeResult(0.02), FakeResult(0.04), FakeResult(math.inf)]
    assert adbd(mixed, cap=1.0) == pytest.approx((0.02 + 0.04 + 1.0) / 3)
    with pytest.raises(EmptyInput):
        adbd([])
    with pytest.raises(ValueError):
        adbd([FakeResult(0.1)], cap=0.0)


def test_report_fields():
    mixed = [
        FakeResult(0.02, 40),
        FakeResult(0.04, 47),
        FakeResult(math.inf, 10000),
    ]
    report = evaluation_report(mixed, epsilon=0.05, cap=1.0)
    assert report.n_examples == 3
    assert report.asr == pytest.approx(2 / 3)
    assert report.avg_queries == 43.5
    assert report.median_queries == 43.5
    assert report.adbd == pytest.approx(0.35333333333333333)
    assert report.failures_capped == 1
    assert report.asr + report.robust_accuracy == 1.0


def test_report_with_zero_successes_has_null_queries():
    report = evaluation_report([FakeResult(math.inf, 100)], epsilon=0.1)
    assert report.asr == 0.0
    assert report.avg_queries is None and report.median_queries is None
    d = report.to_dict()
    assert d["avg_queries"] is None


def test_asr_curve_single_success():
    res = [FakeResult(0.1, history=[(1, math.inf), (47, 0.1)])]
    curve = build_curves(res, "asr_vs_queries", epsilon=0.3)
    assert curve.points == [(47, 1.0)]


def test_asr_curve_two_examples():
    res = [
        FakeResult(0.1, history=[(1, math.inf), (10, 0.1)]),
        FakeResult(0.2, history=[(1, math.inf), (12, 0.5), (30, 0.2)]),
    ]
    curve = build_curves(res, "asr_vs_queries", epsilon=0.3)
    assert curve.points == [(10, 0.5), (30, 1.0)]


def test_asr_curve_counts_first_success_checkpoint():
    # later checkpoints below epsilon must not move the first-success time
    res = [FakeResult(0.05, history=[(1, math.inf), (20, 0.25), (40, 0.05)])]
    curve = build_curves(res, "asr_vs_queries", epsilon=0.3)
    assert curve.points[0][0] == 20


def test_adbd_curve_is_non_increasing_and_padded():
    res = [
        FakeResult(0.1, history=[(1, math.inf), (12, 0.4), (25, 0.1)]),
        FakeResult(0.3, history=[(1, math.inf), (14, 0.3)]),
    ]
    curve = build_curves(res, "adbd_vs_iterations", cap=1.0)
    xs = [p[0] for p in curve.points]
    vs = [p[1] for p in curve.points]
    assert xs == [0, 1, 2]
    assert vs[0] == 1.0  # both capped before any search
    assert all(a >= b for a, b in zip(vs, vs[1:]))
    assert vs[2] == pytest.approx((0.1 + 0.3) / 2)


def test_robacc_curve_complements_success():
    res = [
        FakeResult(0.1, history=[(1, math.inf), (12, 0.1)]),
        FakeResult(math.inf, history=[(1, math.inf)]),
    ]
    curve = build_curves(res, "robacc_vs_iterations", epsilon=0.3)
    assert curve.points == [(0, 1.0), (1, 0.5)]


def test_curves_require_history_and_valid_kind():
    with pytest.raises(MissingHistory):
        build_curves([FakeResult(0.1, history=[])], "asr_vs_queries", epsilon=0.3)
    with pytest.raises(ValueError):
        build_curves([FakeResult(0.1)], "nonsense")
    with pytest.raises(ValueError):
        build_curves([FakeResult(0.1)], "asr_vs_queries")  # epsilon missing


def test_curve_csv_round_trip(tmp_path):
    res = [FakeResult(0.1, history=[(1, math.inf), (47, 0.1)])]
    curve = build_curves(res, "asr_vs_queries", epsilon=0.3)
    path = tmp_path / "curve.csv"
    curve.write_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "query_count,value"
    assert lines[1] == "47,1.0"


def _random_results(rng, n):
    out = []
    for _ in range(n):
        roll = rng.random()
        if roll < 0.15:
            linf = math.inf
        elif roll < 0.25:
            linf = 0.0
        else:
            linf = float(rng.uniform(0.0, 1.2))
        out.append(FakeResult(linf, queries=int(rng.integers(1, 5000))))
    return out


def test_metric_identities_fuzz():
    rng = np.random.default_rng(123)
    for _ in range(200):
        results = _random_results(rng, int(rng.integers(1, 40)))
        eps = float(rng.uniform(0.01, 1.0))
        asr = attack_success_rate(results, eps)
        assert asr + robust_accuracy(results, eps) == 1.0
        # asr is non-decreasing in epsilon
        eps2 = eps + float(rng.uniform(0.0, 0.5))
        assert attack_success_rate(results, eps2) >= asr
        # adbd does not care about ordering
        shuffled = list(results)
        rng.shuffle(shuffled)
        assert adbd(shuffled) == adbd(results)
        # adbd dominates the mean distortion over successes
        succ = [r.linf_distortion for r in results if r.linf_distortion <= eps]
        if succ:
            assert adbd(results) >= float(np.mean(succ)) - 1e-12
