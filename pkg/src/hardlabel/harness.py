"""Batch attack runner and result/report file handling.

Runs an attack over every example of a dataset (optionally in parallel,
one oracle per example), writes records in input order so files are
byte-stable, and turns result files back into evaluation reports and
curve CSVs.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import ConfigError, EmptyInput, ParseError
from .metrics import DEFAULT_CAP, build_curves, evaluation_report
from .oracle import HardLabelOracle, load_dataset, load_model
from .search import (
    StoppingRule,
    random_vertex_baseline,
    rays_hierarchical,
    rays_naive,
)

ALGOS = ("naive", "hierarchical", "random-baseline")
MODES = ("early-stop", "full-budget")

RECORD_FIELDS = (
    "example_index",
    "clean_label",
    "predicted_label",
    "queries_used",
    "r_best",
    "linf_distortion",
    "success",
    "history",
)


@dataclass
class RunConfig:
    model_path: str
    data_path: str
    out_path: str
    epsilon: float
    budget: int = 10000
    tol: float = 1e-3
    algo: str = "hierarchical"
    mode: str = "early-stop"
    seed: int = 0
    parallelism: int = 1

    def validate(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ConfigError("epsilon must be in (0, 1]")
        if self.budget < 1:
            raise ConfigError("budget must be >= 1")
        if not 0.0 < self.tol < self.epsilon:
            raise ConfigError("tol must satisfy 0 < tol < epsilon")
        if self.algo not in ALGOS:
            raise ConfigError(f"algo must be one of {ALGOS}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")


@dataclass
class ResultRecord:
    """One attacked example as stored in the results file.

    Infinite radii are stored as None (JSON null), both for the final
    radius and inside history checkpoints.
    """

    example_index: int
    clean_label: int
    predicted_label: int
    queries_used: int
    r_best: float | None
    linf_distortion: float | None
    success: bool
    history: list

    @classmethod
    def from_attack(cls, index, example, result, epsilon):
        finite = not math.isinf(result.r_best)
        linf = result.linf_distortion if finite else None
        return cls(
            example_index=index,
            clean_label=example.label,
            predicted_label=result.initial_label,
            queries_used=result.queries_used,
            r_best=result.r_best if finite else None,
            linf_distortion=linf,
            success=finite and linf <= epsilon,
            history=[
                (q, None if math.isinf(r) else r) for q, r in result.history
            ],
        )

    def to_obj(self):
        return {
            "example_index": self.example_index,
            "clean_label": self.clean_label,
            "predicted_label": self.predicted_label,
            "queries_used": self.queries_used,
            "r_best": self.r_best,
            "linf_distortion": self.linf_distortion,
            "success": self.success,
            "history": [[q, r] for q, r in self.history],
        }

    @classmethod
    def from_obj(cls, obj):
        try:
            return cls(
                example_index=int(obj["example_index"]),
                clean_label=int(obj["clean_label"]),
                predicted_label=int(obj["predicted_label"]),
                queries_used=int(obj["queries_used"]),
                r_best=None if obj["r_best"] is None else float(obj["r_best"]),
                linf_distortion=(
                    None
                    if obj["linf_distortion"] is None
                    else float(obj["linf_distortion"])
                ),
                success=bool(obj["success"]),
                history=[
                    (int(q), None if r is None else float(r))
                    for q, r in obj["history"]
                ],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed result record: {exc}") from exc

    @property
    def misclassified_clean(self):
        return self.predicted_label != self.clean_label


class RecordMetricsView:
    """Adapter giving stored records the metric-facing float interface."""

    def __init__(self, record):
        self._rec = record
        self.queries_used = record.queries_used
        self.linf_distortion = (
            math.inf if record.linf_distortion is None else record.linf_distortion
        )

    def linf_history(self):
        rec = self._rec
        if rec.r_best is None or rec.r_best == 0.0:
            # never found a finite radius, or succeeded at the clean gate:
            # checkpoints are all infinite or all zero, no scaling needed
            return [
                (q, math.inf if r is None else r) for q, r in rec.history
            ]
        dim = round((rec.r_best / rec.linf_distortion) ** 2)
        root = math.sqrt(dim)
        return [
            (q, math.inf if r is None else r / root) for q, r in rec.history
        ]


def _attack_one(model, example, index, config):
    oracle = HardLabelOracle(model, budget=config.budget)
    early = config.epsilon if config.mode == "early-stop" else None
    stop = StoppingRule(budget=config.budget, early_stop=early)
    if config.algo == "naive":
        result = rays_naive(oracle, example, config.tol, stop)
    elif config.algo == "hierarchical":
        result = rays_hierarchical(oracle, example, config.tol, stop)
    else:
        result = random_vertex_baseline(
            oracle, example, config.tol, stop, seed=[config.seed, index]
        )
    return ResultRecord.from_attack(index, example, result, config.epsilon)


def run_attack(config):
    """Attack every dataset example; returns records in input order."""
    config.validate()
    model = load_model(config.model_path)
    examples = load_dataset(config.data_path)
    for i, ex in enumerate(examples):
        if ex.dim != model.dim:
            raise ConfigError(
                f"example {i} has dim {ex.dim}, model expects {model.dim}"
            )
        if ex.label >= model.class_count:
            raise ConfigError(
                f"example {i} label {ex.label} outside {model.class_count} classes"
            )
    if config.parallelism == 1 or not examples:
        return [
            _attack_one(model, ex, i, config) for i, ex in enumerate(examples)
        ]
    with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
        futures = [
            pool.submit(_attack_one, model, ex, i, config)
            for i, ex in enumerate(examples)
        ]
        return [f.result() for f in futures]


def write_results(records, path):
    with open(path, "w") as fh:
        json.dump([r.to_obj() for r in records], fh, indent=2)
        fh.write("\n")


def load_results(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot parse results file {path}: {exc}") from exc
    if not isinstance(doc, list):
        raise ParseError(f"results file {path} must hold a JSON array")
    return [ResultRecord.from_obj(o) for o in doc]


def cmd_attack(config):
    """Run the configured attack and write the results file."""
    records = run_attack(config)
    write_results(records, config.out_path)
    return records


def cmd_report(
    results_path,
    epsilon,
    cap=DEFAULT_CAP,
    out_path=None,
    curves_path=None,
    curve_kind="asr_vs_queries",
):
    """Aggregate a results file into a report (and optionally a curve CSV)."""
    records = load_results(results_path)
    if not records:
        raise EmptyInput(f"results file {results_path} holds no records")
    views = [RecordMetricsView(r) for r in records]
    report = evaluation_report(views, epsilon, cap)
    if out_path:
        with open(out_path, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    if curves_path:
        series = build_curves(views, curve_kind, epsilon=epsilon, cap=cap)
        series.write_csv(curves_path)
    return report


def filter_correctly_classified(records):
    """Drop records flagged as misclassified by the clean model."""
    return [r for r in records if not r.misclassified_clean]
