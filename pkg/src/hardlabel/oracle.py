"""Hard-label query interface: weight-file models, datasets, and the counted oracle.

The oracle is the only place that touches the model during an attack. It
clips every queried point into the [0, 1] box, counts every call, and
enforces the query budget, so search code never has to think about any of
the three.
"""

import json
import math

import numpy as np

from .errors import (
    BudgetExhausted,
    DimensionMismatch,
    ParseError,
    RangeError,
    ShapeError,
)

MODEL_KINDS = ("linear", "mlp")


class Example:
    """A data point in [0, 1]^dim with its ground-truth label."""

    __slots__ = ("features", "label")

    def __init__(self, features, label):
        feats = np.asarray(features, dtype=float)
        if feats.ndim != 1 or feats.size < 1:
            raise ValueError("features must be a 1-D vector with dim >= 1")
        if np.any(feats < 0.0) or np.any(feats > 1.0):
            raise RangeError("features must lie in [0, 1]")
        label = int(label)
        if label < 0:
            raise ValueError("label must be a non-negative class index")
        feats.flags.writeable = False
        self.features = feats
        self.label = label

    @property
    def dim(self):
        return self.features.size

    def __repr__(self):
        return f"Example(dim={self.dim}, label={self.label})"


class ClassifierModel:
    """A dense feedforward classifier loaded from plain weight matrices.

    kind "linear" is a single affine layer; kind "mlp" applies a rectifier
    between consecutive affine layers. Prediction is the argmax of the raw
    final-layer scores, the lowest class index winning ties. Weights are
    frozen after construction so a model can be shared across concurrent
    attack runs.
    """

    def __init__(self, kind, weights, biases):
        if kind not in MODEL_KINDS:
            raise ParseError(f"unknown model kind {kind!r}")
        if len(weights) != len(biases) or not weights:
            raise ShapeError("need one bias vector per weight matrix")
        if kind == "linear" and len(weights) != 1:
            raise ShapeError("linear models have exactly one layer")
        self.kind = kind
        self.weights = []
        self.biases = []
        width = None
        for i, (w, b) in enumerate(zip(weights, biases)):
            w = np.asarray(w, dtype=float)
            b = np.asarray(b, dtype=float)
            if w.ndim != 2 or b.ndim != 1:
                raise ShapeError(f"layer {i}: weights must be a matrix, bias a vector")
            if w.shape[0] != b.size:
                raise ShapeError(
                    f"layer {i}: {w.shape[0]} output rows but {b.size} bias entries"
                )
            if width is not None and w.shape[1] != width:
                raise ShapeError(
                    f"layer {i}: expects input width {w.shape[1]} after width {width}"
                )
            width = w.shape[0]
            w.flags.writeable = False
            b.flags.writeable = False
            self.weights.append(w)
            self.biases.append(b)

    @property
    def dim(self):
        return self.weights[0].shape[1]

    @property
    def class_count(self):
        return self.weights[-1].shape[0]

    def scores(self, points):
        """Raw final-layer scores for one point (dim,) or a batch (n, dim)."""
        a = np.asarray(points, dtype=float)
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            a = a @ w.T + b
            if i < last:
                np.maximum(a, 0.0, out=a)
        return a

    def predict(self, point):
        """Predicted class of a single point (no clipping, no counting)."""
        return int(np.argmax(self.scores(point)))

    def predict_batch(self, points):
        return np.argmax(self.scores(points), axis=1)


class HardLabelOracle:
    """Query-counted hard-label view of a classifier.

    Every predict call clips the point into [0, 1] coordinate-wise, burns
    exactly one unit of budget, and returns only the predicted class. Once
    query_count reaches the budget no further call succeeds. One oracle
    belongs to exactly one attack run; the underlying model may be shared.
    """

    def __init__(self, model, budget=None):
        if budget is not None and budget < 1:
            raise ValueError("budget must be a positive integer or None")
        self.model = model
        self.budget = budget
        self.query_count = 0

    @property
    def remaining(self):
        if self.budget is None:
            return math.inf
        return self.budget - self.query_count

    def tighten_budget(self, budget):
        """Lower the budget to at most `budget` queries in total."""
        if self.budget is None or budget < self.budget:
            self.budget = budget

    def predict(self, point):
        point = np.asarray(point, dtype=float)
        if point.shape != (self.model.dim,):
            raise DimensionMismatch(
                f"point has shape {point.shape}, model input width is {self.model.dim}"
            )
        if self.budget is not None and self.query_count >= self.budget:
            raise BudgetExhausted(f"budget of {self.budget} queries consumed")
        self.query_count += 1
        return self.model.predict(np.clip(point, 0.0, 1.0))

    def is_adversarial(self, point, label):
        return self.predict(point) != label


def load_model(path):
    """Load and validate a model from its JSON weight file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot parse model file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "kind" not in doc or "layers" not in doc:
        raise ParseError(f"model file {path} needs 'kind' and 'layers' keys")
    layers = doc["layers"]
    if not isinstance(layers, list) or not layers:
        raise ParseError(f"model file {path}: 'layers' must be a non-empty list")
    weights, biases = [], []
    for i, layer in enumerate(layers):
        if not isinstance(layer, dict) or "weights" not in layer or "bias" not in layer:
            raise ParseError(f"model file {path}: layer {i} needs 'weights' and 'bias'")
        try:
            w = np.array(layer["weights"], dtype=float)
            b = np.array(layer["bias"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"model file {path}: layer {i} is not numeric") from exc
        if w.ndim != 2:
            raise ParseError(f"model file {path}: layer {i} weights must be a matrix")
        weights.append(w)
        biases.append(b)
    return ClassifierModel(doc["kind"], weights, biases)


def save_model(model, path):
    """Write a model back out in the JSON weight-file format."""
    doc = {
        "kind": model.kind,
        "layers": [
            {"weights": w.tolist(), "bias": b.tolist()}
            for w, b in zip(model.weights, model.biases)
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_dataset(path):
    """Load examples from a header-less CSV of `label,feat1,...,featD` rows.

    Row order is preserved. An empty file is a valid empty dataset.
    """
    examples = []
    dim = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if len(cells) < 2:
                raise ParseError(f"{path}:{lineno}: need a label and at least one feature")
            try:
                label = int(cells[0])
                feats = [float(c) for c in cells[1:]]
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-numeric cell") from exc
            if label < 0:
                raise ParseError(f"{path}:{lineno}: negative label {label}")
            if dim is None:
                dim = len(feats)
            elif len(feats) != dim:
                raise ParseError(
                    f"{path}:{lineno}: row has {len(feats)} features, expected {dim}"
                )
            if any(f < 0.0 or f > 1.0 for f in feats):
                raise RangeError(f"{path}:{lineno}: feature outside [0, 1]")
            examples.append(Example(feats, label))
    return examples


def save_dataset(examples, path):
    """Write examples in the dataset CSV format (label, then features)."""
    with open(path, "w") as fh:
        for ex in examples:
            cells = [str(ex.label)] + [repr(float(v)) for v in ex.features]
            fh.write(",".join(cells) + "\n")
