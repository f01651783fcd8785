"""Discrete ray search for the closest decision boundary.

All searches work on sign vectors d in {-1, +1}^dim, the directions that
point at the vertices of the L-infinity ball around the clean example. The
boundary radius along a direction is measured in L2 units along the
normalized ray; dividing by sqrt(dim) converts it to the L-infinity
distortion of the perturbation.

The searches are deterministic (the random-vertex baseline only through its
seed) and expose no tuning knobs beyond the query budget, the binary-search
tolerance, and the success threshold epsilon.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExhausted

DEFAULT_TOL = 1e-3


def all_ones_direction(dim):
    """The starting direction of every deterministic search."""
    return np.ones(dim, dtype=float)


def is_sign_direction(d):
    d = np.asarray(d)
    return d.ndim == 1 and d.size >= 1 and bool(np.all(np.abs(d) == 1.0))


class BlockPartition:
    """Contiguous index blocks of a dim-vector at a given stage.

    Stage s cuts the flattened index range into min(2**s, dim) blocks whose
    sizes differ by at most one, any remainder going one-per-leading-block.
    Once 2**s >= dim every block is a singleton. Blocks are numbered
    1..block_count.
    """

    def __init__(self, dim, stage):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if stage < 0:
            raise ValueError("stage must be >= 0")
        self.dim = dim
        self.stage = stage
        self.block_count = dim if stage >= dim.bit_length() else min(2**stage, dim)

    def block(self, k):
        """Index slice of block k (1-indexed)."""
        if not 1 <= k <= self.block_count:
            raise IndexError(
                f"block {k} out of range for {self.block_count}-block partition"
            )
        base, extra = divmod(self.dim, self.block_count)
        start = (k - 1) * base + min(k - 1, extra)
        size = base + (1 if k - 1 < extra else 0)
        return slice(start, start + size)

    def blocks(self):
        return [self.block(k) for k in range(1, self.block_count + 1)]


def flip_block(d, partition, k):
    """Copy of d with every sign in block k of the partition negated."""
    sl = partition.block(k)
    out = np.array(d, dtype=float)
    out[sl] = -out[sl]
    return out


@dataclass
class StoppingRule:
    """When an attack run ends.

    budget caps oracle queries; early_stop, if set, ends the run as soon as
    the best L-infinity distortion reaches it; sweep_convergence ends the
    run after a full pass over all single-coordinate flips without an
    update. An unlimited budget requires sweep_convergence, otherwise the
    run has no guaranteed end.
    """

    budget: int | None = 10000
    early_stop: float | None = None
    sweep_convergence: bool = False

    def __post_init__(self):
        if self.budget is not None and self.budget < 1:
            raise ValueError("budget must be >= 1 or None")
        if self.early_stop is not None and self.early_stop <= 0:
            raise ValueError("early_stop must be positive when set")
        if self.budget is None and not self.sweep_convergence:
            raise ValueError("unlimited budget requires sweep_convergence")


@dataclass
class AttackState:
    """Mutable best-so-far state of a running attack."""

    d_best: np.ndarray
    r_best: float = math.inf
    queries_used: int = 0
    history: list = field(default_factory=list)

    def checkpoint(self, oracle):
        if self.history and oracle.query_count == self.queries_used:
            return  # nothing was spent since the last checkpoint
        self.queries_used = oracle.query_count
        self.history.append((self.queries_used, self.r_best))

    def update(self, r_tmp, d_tmp):
        """Adopt a candidate on strict improvement; ties keep the incumbent."""
        if r_tmp < self.r_best:
            self.r_best = r_tmp
            self.d_best = d_tmp
            return True
        return False


@dataclass
class AttackResult:
    """Final outcome of one attack run."""

    d_best: np.ndarray
    r_best: float
    queries_used: int
    initial_label: int
    history: list

    @property
    def dim(self):
        return self.d_best.size

    @property
    def linf_distortion(self):
        """Best L-infinity distortion found; for sign directions r/sqrt(dim)."""
        if math.isinf(self.r_best):
            return math.inf
        return self.r_best / math.sqrt(self.dim)

    def success_at(self, epsilon):
        return self.linf_distortion <= epsilon

    def linf_history(self):
        """History checkpoints with radii converted to L-infinity units."""
        root = math.sqrt(self.dim)
        return [
            (q, r if math.isinf(r) else r / root) for q, r in self.history
        ]


def dbr_search(oracle, example, d, r_best=math.inf, tol=DEFAULT_TOL):
    """Boundary radius along direction d, or infinity if it cannot beat r_best.

    A single fast check at radius min(r_best, ||d||_2) decides whether the
    direction is worth a binary search at all: if the model still predicts
    the true label there, no radius below r_best exists along this ray and
    the search is skipped for the cost of one query. Otherwise the crossing
    is bracketed on [0, min(r_best, ||d||_2)], keeping `end` adversarial and
    `start` non-adversarial, until the bracket is narrower than tol.

    The returned radius, when finite, always points at a queried adversarial
    example. A budget exhausted mid-search propagates; callers discard the
    partial search.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    norm = float(np.linalg.norm(d))
    unit = np.asarray(d, dtype=float) / norm
    x = example.features
    y = example.label
    end = min(r_best, norm)
    if oracle.predict(x + end * unit) == y:
        return math.inf
    start = 0.0
    while end - start > tol:
        mid = (start + end) / 2.0
        if oracle.predict(x + mid * unit) == y:
            start = mid
        else:
            end = mid
    return end


def _check_stop(stop, oracle):
    if oracle.query_count != 0:
        raise ValueError("attacks need a fresh oracle (query_count 0)")
    if stop.budget is not None:
        oracle.tighten_budget(stop.budget)


def _clean_gate(oracle, example, state):
    """First query: the clean prediction. Misclassified inputs succeed at once."""
    initial_label = oracle.predict(example.features)
    if initial_label != example.label:
        state.r_best = 0.0
    state.checkpoint(oracle)
    return initial_label


def _finalize(state, initial_label):
    return AttackResult(
        d_best=state.d_best,
        r_best=state.r_best,
        queries_used=state.queries_used,
        initial_label=initial_label,
        history=state.history,
    )


def _hit_early_stop(state, stop):
    if stop.early_stop is None or math.isinf(state.r_best):
        return False
    return state.r_best / math.sqrt(state.d_best.size) <= stop.early_stop


def _try_direction(oracle, example, state, d_tmp, tol, stop):
    """One dbr_search against the current best. Returns (improved, stop_now)."""
    r_tmp = dbr_search(oracle, example, d_tmp, state.r_best, tol)
    improved = state.update(r_tmp, d_tmp)
    state.checkpoint(oracle)
    return improved, improved and _hit_early_stop(state, stop)


def rays_naive(oracle, example, tol=DEFAULT_TOL, stop=None):
    """Greedy single-coordinate sign search for the closest boundary.

    After the clean-prediction gate the starting all-ones direction is
    measured once, then coordinates are flipped one at a time in cyclic
    sweeps, keeping a flip only when it strictly shrinks the best radius.
    With enough budget the returned direction is locally optimal: no single
    flip improves it.
    """
    stop = stop or StoppingRule()
    _check_stop(stop, oracle)
    dim = example.dim
    state = AttackState(d_best=all_ones_direction(dim))
    initial_label = _clean_gate(oracle, example, state)
    if initial_label != example.label:
        return _finalize(state, initial_label)
    try:
        _, stop_now = _try_direction(oracle, example, state, state.d_best, tol, stop)
        if stop_now:
            return _finalize(state, initial_label)
        while True:
            swept_update = False
            for k in range(dim):
                d_tmp = state.d_best.copy()
                d_tmp[k] = -d_tmp[k]
                improved, stop_now = _try_direction(
                    oracle, example, state, d_tmp, tol, stop
                )
                swept_update = swept_update or improved
                if stop_now:
                    return _finalize(state, initial_label)
            if stop.sweep_convergence and not swept_update:
                break
    except BudgetExhausted:
        state.checkpoint(oracle)
    return _finalize(state, initial_label)


def rays_hierarchical(oracle, example, tol=DEFAULT_TOL, stop=None):
    """Block-hierarchical sign search: coarse flips first, single flips last.

    Stage s flips whole blocks of a min(2**s, dim)-block partition; after
    all blocks of a stage the next stage halves the block size. Once blocks
    are singletons every further stage is exactly a naive sweep, so with
    enough budget the result inherits the naive search's local optimality.
    """
    stop = stop or StoppingRule()
    _check_stop(stop, oracle)
    dim = example.dim
    state = AttackState(d_best=all_ones_direction(dim))
    initial_label = _clean_gate(oracle, example, state)
    if initial_label != example.label:
        return _finalize(state, initial_label)
    try:
        _, stop_now = _try_direction(oracle, example, state, state.d_best, tol, stop)
        if stop_now:
            return _finalize(state, initial_label)
        stage = 0
        while True:
            part = BlockPartition(dim, stage)
            swept_update = False
            for k in range(1, part.block_count + 1):
                d_tmp = flip_block(state.d_best, part, k)
                improved, stop_now = _try_direction(
                    oracle, example, state, d_tmp, tol, stop
                )
                swept_update = swept_update or improved
                if stop_now:
                    return _finalize(state, initial_label)
            if (
                stop.sweep_convergence
                and part.block_count == dim
                and not swept_update
            ):
                break
            if part.block_count < dim:
                stage += 1
    except BudgetExhausted:
        state.checkpoint(oracle)
    return _finalize(state, initial_label)


def random_vertex_baseline(oracle, example, tol=DEFAULT_TOL, stop=None, seed=0):
    """Baseline that samples uniform sign directions instead of searching.

    Shares the clean-prediction gate, the fast-check-plus-binary-search
    radius measurement, and the stopping rules with the greedy searches.
    Deterministic for a fixed seed. Under sweep_convergence it stops after
    dim consecutive samples without an update, mirroring a fruitless sweep.
    """
    stop = stop or StoppingRule()
    _check_stop(stop, oracle)
    dim = example.dim
    rng = np.random.default_rng(seed)
    state = AttackState(d_best=all_ones_direction(dim))
    initial_label = _clean_gate(oracle, example, state)
    if initial_label != example.label:
        return _finalize(state, initial_label)
    stale = 0
    try:
        while True:
            d_tmp = rng.integers(0, 2, size=dim).astype(float) * 2.0 - 1.0
            improved, stop_now = _try_direction(
                oracle, example, state, d_tmp, tol, stop
            )
            if stop_now:
                return _finalize(state, initial_label)
            stale = 0 if improved else stale + 1
            if stop.sweep_convergence and stale >= dim:
                break
    except BudgetExhausted:
        state.checkpoint(oracle)
    return _finalize(state, initial_label)


def brute_force_radius(model, example, d, resolution=0.01):
    """Reference boundary radius by dense scan plus bisection refinement.

    Scans radii 0..||d||_2 in `resolution` steps against the raw model (no
    query counting), takes the first adversarial point, and refines the
    bracket down to resolution / 2**20. Returns infinity when no scanned
    point is adversarial. Only affordable at small dim; used to verify the
    query-efficient search, never by it.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    d = np.asarray(d, dtype=float)
    norm = float(np.linalg.norm(d))
    unit = d / norm
    x = example.features
    y = example.label
    steps = int(math.ceil(norm / resolution))
    radii = np.minimum(np.arange(steps + 1) * resolution, norm)
    points = np.clip(x[None, :] + radii[:, None] * unit[None, :], 0.0, 1.0)
    adversarial = model.predict_batch(points) != y
    if not adversarial.any():
        return math.inf
    first = int(np.argmax(adversarial))
    if first == 0:
        return 0.0
    lo = float(radii[first - 1])
    hi = float(radii[first])
    target = resolution / 2**20
    while hi - lo > target:
        mid = (lo + hi) / 2.0
        if model.predict(np.clip(x + mid * unit, 0.0, 1.0)) == y:
            lo = mid
        else:
            hi = mid
    return hi
