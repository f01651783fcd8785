"""Aggregate per-example attack outcomes into evaluation quantities.

All functions are pure and take any records that expose `linf_distortion`
(a float, possibly infinite), `queries_used`, and, for curves, a
`linf_history()` list of (query_count, linf_value) checkpoints.
AttackResult satisfies this directly; the harness adapts result files.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, MissingHistory, NoSuccesses

DEFAULT_CAP = 1.0

CURVE_KINDS = ("asr_vs_queries", "adbd_vs_iterations", "robacc_vs_iterations")


@dataclass
class EvaluationReport:
    """Headline numbers for one attack run over a dataset."""

    n_examples: int
    asr: float
    avg_queries: float | None
    median_queries: float | None
    adbd: float
    robust_accuracy: float
    failures_capped: int

    def to_dict(self):
        return {
            "n_examples": self.n_examples,
            "asr": self.asr,
            "avg_queries": self.avg_queries,
            "median_queries": self.median_queries,
            "adbd": self.adbd,
            "robust_accuracy": self.robust_accuracy,
            "failures_capped": self.failures_capped,
        }


@dataclass
class CurveSeries:
    """An ordered (x, value) series for one convergence plot."""

    kind: str
    points: list

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("query_count,value\n")
            for x, v in self.points:
                fh.write(f"{x},{v!r}\n")


def attack_success_rate(results, epsilon):
    """Fraction of results whose best L-infinity distortion is <= epsilon."""
    if not results:
        raise EmptyInput("no results")
    hits = sum(1 for r in results if r.linf_distortion <= epsilon)
    return hits / len(results)


def query_stats(results, epsilon):
    """(mean, median) of queries over successful attacks only.

    Medians of even-length lists are the mean of the two central values.
    """
    queries = [r.queries_used for r in results if r.linf_distortion <= epsilon]
    if not queries:
        raise NoSuccesses(f"no attack succeeded at epsilon={epsilon}")
    return float(np.mean(queries)), float(np.median(queries))


def adbd(results, cap=DEFAULT_CAP):
    """Mean best boundary distance over all results, failures counted as cap.

    Uses an exactly-rounded sum, so the value is independent of result
    ordering down to the last bit.
    """
    if not results:
        raise EmptyInput("no results")
    if cap <= 0:
        raise ValueError("cap must be positive")
    return math.fsum(min(r.linf_distortion, cap) for r in results) / len(results)


def robust_accuracy(results, epsilon):
    """Fraction the attack failed to flip within epsilon; complement of ASR."""
    return 1.0 - attack_success_rate(results, epsilon)


def evaluation_report(results, epsilon, cap=DEFAULT_CAP):
    asr = attack_success_rate(results, epsilon)
    try:
        avg_q, med_q = query_stats(results, epsilon)
    except NoSuccesses:
        avg_q = med_q = None
    return EvaluationReport(
        n_examples=len(results),
        asr=asr,
        avg_queries=avg_q,
        median_queries=med_q,
        adbd=adbd(results, cap),
        robust_accuracy=1.0 - asr,
        failures_capped=sum(1 for r in results if math.isinf(r.linf_distortion)),
    )


def _histories(results):
    if not results:
        raise EmptyInput("no results")
    hists = []
    for r in results:
        h = r.linf_history()
        if not h:
            raise MissingHistory("result carries no checkpoint history")
        hists.append(h)
    return hists


def _first_success_query(history, epsilon):
    for q, v in history:
        if v <= epsilon:
            return q
    return None


def build_curves(results, kind, epsilon=None, cap=DEFAULT_CAP):
    """Convergence series from per-checkpoint histories.

    asr_vs_queries: at query q, the fraction of examples whose first
    success happened at <= q queries. The iteration curves report, after t
    radius searches, the mean capped distance (adbd_vs_iterations) or the
    surviving fraction (robacc_vs_iterations) across examples.
    """
    if kind not in CURVE_KINDS:
        raise ValueError(f"kind must be one of {CURVE_KINDS}")
    hists = _histories(results)
    n = len(hists)
    if kind == "asr_vs_queries":
        if epsilon is None:
            raise ValueError("asr_vs_queries needs epsilon")
        times = sorted(
            q for q in (_first_success_query(h, epsilon) for h in hists) if q is not None
        )
        points = []
        seen = 0
        for q in times:
            seen += 1
            if points and points[-1][0] == q:
                points[-1] = (q, seen / n)
            else:
                points.append((q, seen / n))
        return CurveSeries(kind=kind, points=points)
    if kind == "robacc_vs_iterations" and epsilon is None:
        raise ValueError("robacc_vs_iterations needs epsilon")
    max_t = max(len(h) for h in hists)
    points = []
    for t in range(max_t):
        values = [h[min(t, len(h) - 1)][1] for h in hists]
        if kind == "adbd_vs_iterations":
            points.append((t, float(np.mean([min(v, cap) for v in values]))))
        else:
            points.append((t, 1.0 - sum(1 for v in values if v <= epsilon) / n))
    return CurveSeries(kind=kind, points=points)
