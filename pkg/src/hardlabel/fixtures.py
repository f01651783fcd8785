"""Synthetic fixtures: linear models with known geometry, Gaussian-blob
datasets, and small dense-ReLU models fitted to them.

Everything here is seeded and deterministic so harness runs and tests can
be reproduced byte for byte. The linear fixtures exist because their
boundary radii have closed forms; the Gaussian/MLP fixtures give a target
whose boundaries are only reachable through queries.
"""

import math

import numpy as np

from .oracle import ClassifierModel, Example


def make_linear_model(weights, threshold):
    """Two-class model predicting class 1 iff weights . x >= threshold.

    Scores are (0, w.x - t), so the argmax tie rule sends exact boundary
    points to class 0.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size < 1:
        raise ValueError("weights must be a 1-D vector")
    rows = np.vstack([np.zeros_like(w), w])
    return ClassifierModel("linear", [rows], [np.array([0.0, -float(threshold)])])


def linear_crossing_radius(weights, threshold, example, d):
    """Exact radius where the unclipped ray from the example crosses w.x = t.

    Returns infinity when the ray is parallel to the hyperplane or the
    crossing lies behind the example. Ignores box clipping, so it only
    matches queried radii when the crossing happens before any coordinate
    saturates.
    """
    w = np.asarray(weights, dtype=float)
    d = np.asarray(d, dtype=float)
    slope = float(w @ d)
    if slope == 0.0:
        return math.inf
    r = (float(threshold) - float(w @ example.features)) * float(
        np.linalg.norm(d)
    ) / slope
    return r if r > 0 else math.inf


def linear_linf_margin(weights, threshold, x):
    """Smallest L-infinity perturbation moving x onto the hyperplane w.x = t."""
    w = np.asarray(weights, dtype=float)
    return abs(float(w @ np.asarray(x, dtype=float)) - float(threshold)) / float(
        np.abs(w).sum()
    )


def sample_gaussian_blobs(dim, n, classes=2, separation=0.5, seed=0, sigma=None):
    """Class-labelled Gaussian clouds inside the unit box.

    Class means sit at 0.5 +/- (separation / 2) along seeded positive-orthant
    unit directions; for two classes they are antipodal along one axis.
    Samples are clipped into [0, 1]. Returns (features, labels, means).
    """
    if dim < 1 or n < 0 or classes < 2:
        raise ValueError("need dim >= 1, n >= 0, classes >= 2")
    if sigma is None:
        sigma = separation / 8.0
    rng = np.random.default_rng(seed)
    if classes == 2:
        u = np.abs(rng.standard_normal(dim))
        u /= np.linalg.norm(u)
        axes = np.vstack([-u, u])
    else:
        axes = np.abs(rng.standard_normal((classes, dim)))
        axes /= np.linalg.norm(axes, axis=1, keepdims=True)
        axes -= axes.mean(axis=0)
        axes /= np.maximum(np.linalg.norm(axes, axis=1, keepdims=True), 1e-12)
    means = 0.5 + (separation / 2.0) * axes
    labels = rng.integers(0, classes, size=n)
    feats = means[labels] + sigma * rng.standard_normal((n, dim))
    np.clip(feats, 0.0, 1.0, out=feats)
    return feats, labels, means


def train_mlp_classifier(
    features, labels, classes, hidden, seed=0, lr=0.05, margin=0.1, max_epochs=200
):
    """Fit a one-hidden-layer rectifier net with a perceptron-style loop.

    Each pass visits the samples in a seeded random order and, whenever the
    true-class score fails to beat the best rival by `margin`, nudges both
    layers along the score difference. Stops after a clean pass or
    max_epochs.
    """
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels)
    n, dim = X.shape
    rng = np.random.default_rng(seed)
    w1 = rng.standard_normal((hidden, dim)) / math.sqrt(dim)
    b1 = np.zeros(hidden)
    w2 = rng.standard_normal((classes, hidden)) / math.sqrt(hidden)
    b2 = np.zeros(classes)
    for _ in range(max_epochs):
        violations = 0
        for i in rng.permutation(n):
            x, yi = X[i], int(y[i])
            z = w1 @ x + b1
            h = np.maximum(z, 0.0)
            s = w2 @ h + b2
            s_rival = np.copy(s)
            s_rival[yi] = -np.inf
            rival = int(np.argmax(s_rival))
            if s[yi] - s[rival] >= margin:
                continue
            violations += 1
            back = (w2[yi] - w2[rival]) * (z > 0)
            w2[yi] += lr * h
            w2[rival] -= lr * h
            b2[yi] += lr
            b2[rival] -= lr
            w1 += lr * np.outer(back, x)
            b1 += lr * back
        if violations == 0:
            break
    return ClassifierModel("mlp", [w1, w2], [b1, b2])


def make_mlp_fixture(
    dim,
    n_train=400,
    classes=2,
    hidden=None,
    separation=0.5,
    seed=0,
    min_accuracy=0.95,
):
    """Gaussian-blob-trained MLP whose training accuracy is >= min_accuracy.

    If a separation turns out too small to fit cleanly, it is grown by 50%
    and the fixture regenerated, keeping the whole procedure a pure
    function of its arguments.
    """
    if hidden is None:
        hidden = max(8, dim)
    sep = separation
    for _ in range(6):
        X, y, _ = sample_gaussian_blobs(dim, n_train, classes, sep, seed)
        model = train_mlp_classifier(X, y, classes, hidden, seed)
        if (model.predict_batch(X) == y).mean() >= min_accuracy:
            return model
        sep *= 1.5
    raise RuntimeError(
        f"could not fit an mlp fixture at dim={dim} even at separation={sep}"
    )


def make_ripple_linear_mlp(dim, seed=0, noise_units=None, margin=None):
    """Random two-class MLP paired with a probe whose rays single-cross.

    The decision score is a random linear function carried exactly through
    pass-through rectifier units (their inputs stay non-negative on the
    box) plus a rectifier ripple whose directional slope stays well below
    the probe's score margin. The probe sits at the box center, so along
    any sign ray every coordinate saturates at once and the clipped path
    is one straight segment ending frozen at a corner. On that segment the
    score is either strictly monotone (exactly one crossing, or none) or
    too flat to ever bridge the margin (none). Dense-scan audits of the
    query-efficient search are therefore meaningful on every vertex
    direction.

    Returns (model, example); the example scores exactly `margin` units
    from the boundary and is classified 0.
    """
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(dim)
    u /= np.linalg.norm(u)
    if u.sum() < 0:
        u = -u  # keep the all-ones seed direction on the crossing side
    if noise_units is None:
        noise_units = dim
    if margin is None:
        margin = float(rng.uniform(0.05, 0.15))
    # flat-ray variation bound: (2 * ripple) * sqrt(dim) / 2 = 0.0075 << 0.05
    ripple = 0.3 * 0.05 / (2.0 * math.sqrt(dim))
    wn = rng.standard_normal((noise_units, dim))
    wn /= np.linalg.norm(wn, axis=1, keepdims=True)
    bn = rng.uniform(-0.7, 0.2, noise_units)
    cn = rng.choice([-1.0, 1.0], noise_units) * ripple / noise_units
    w1 = np.vstack([np.eye(dim), wn])
    b1 = np.concatenate([np.zeros(dim), bn])
    x = np.full(dim, 0.5)
    phi_x = float(cn @ np.maximum(wn @ x + bn, 0.0))
    threshold = float(u @ x) + phi_x + margin
    w2 = np.vstack([np.zeros(dim + noise_units), np.concatenate([u, cn])])
    b2 = np.array([0.0, -threshold])
    model = ClassifierModel("mlp", [w1, w2], [b1, b2])
    return model, Example(x, 0)


def examples_from_arrays(features, labels):
    return [Example(f, int(l)) for f, l in zip(features, labels)]


def model_accuracy(model, examples):
    if not examples:
        raise ValueError("no examples")
    feats = np.stack([ex.features for ex in examples])
    labels = np.array([ex.label for ex in examples])
    return float((model.predict_batch(feats) == labels).mean())


def nearest_other_class_distance(examples):
    """Per-example L-infinity distance to the closest differently-labelled
    example; the data-geometry margin used to pick fixture epsilons."""
    feats = np.stack([ex.features for ex in examples])
    labels = np.array([ex.label for ex in examples])
    out = np.empty(len(examples))
    for i in range(len(examples)):
        rivals = feats[labels != labels[i]]
        if rivals.size == 0:
            out[i] = math.inf
            continue
        out[i] = np.abs(rivals - feats[i]).max(axis=1).min()
    return out
