#!/usr/bin/env python3
"""Compare the three attack strategies on a 16-dim Gaussian MLP target.

All three see the model only through its top-1 label. The hierarchical
search flips big sign blocks first, the naive search flips one coordinate
at a time, and the random baseline just samples vertex directions. Success
means finding a boundary within epsilon in the L-infinity norm, where
epsilon is the median distance between opposite-class examples.

Expect the naive sweep to stall on roughly half the examples: when the
best direction is far from the all-ones seed, no single-coordinate flip
produces an adversarial corner, so the greedy sweep never finds a finite
radius to improve on. Flipping whole blocks is what gets the hierarchical
search across that gap.
"""

import numpy as np

from hardlabel import (
    HardLabelOracle,
    StoppingRule,
    attack_success_rate,
    make_mlp_fixture,
    nearest_other_class_distance,
    query_stats,
    random_vertex_baseline,
    rays_hierarchical,
    rays_naive,
    sample_gaussian_blobs,
)
from hardlabel.fixtures import examples_from_arrays
from hardlabel.metrics import adbd

DIM, SEPARATION, SEED, BUDGET = 16, 0.5, 1, 10000


def run(attack_name, attack, examples, model, epsilon):
    results = []
    for i, ex in enumerate(examples):
        oracle = HardLabelOracle(model, budget=BUDGET)
        stop = StoppingRule(budget=BUDGET, early_stop=epsilon)
        if attack is random_vertex_baseline:
            results.append(attack(oracle, ex, 1e-3, stop, seed=[SEED, i]))
        else:
            results.append(attack(oracle, ex, 1e-3, stop))
    asr = attack_success_rate(results, epsilon)
    avg_q, med_q = query_stats(results, epsilon)
    print(
        f"{attack_name:<22} ASR {asr:6.3f}   avg queries {avg_q:7.1f}   "
        f"median {med_q:6.1f}   ADBD {adbd(results):.4f}"
    )


def main():
    model = make_mlp_fixture(DIM, n_train=400, separation=SEPARATION, seed=SEED)
    feats, labels, _ = sample_gaussian_blobs(DIM, 260, 2, SEPARATION, SEED)
    pool = examples_from_arrays(feats, labels)
    examples = [ex for ex in pool if model.predict(ex.features) == ex.label][:200]
    epsilon = float(np.median(nearest_other_class_distance(examples)))
    print(f"{len(examples)} correctly classified examples, epsilon {epsilon:.4f}\n")

    run("hierarchical search", rays_hierarchical, examples, model, epsilon)
    run("naive sweep", rays_naive, examples, model, epsilon)
    run("random baseline", random_vertex_baseline, examples, model, epsilon)


if __name__ == "__main__":
    main()
