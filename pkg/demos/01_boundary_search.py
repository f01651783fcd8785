#!/usr/bin/env python3
"""Walk through the boundary-radius search on a model we can solve by hand.

The target is a two-class linear model: class 1 whenever x1 + x2 >= 1.
From x = (0.2, 0.2) the closest boundary point along the all-ones ray is
0.6 / sqrt(2) away, so we can watch the query-efficient search land on the
exact answer, and watch the fast check discard hopeless rays for one query.
"""

import math

import numpy as np

from hardlabel import (
    Example,
    HardLabelOracle,
    StoppingRule,
    brute_force_radius,
    dbr_search,
    make_linear_model,
    rays_naive,
)


def main():
    model = make_linear_model([1.0, 1.0], 1.0)
    example = Example([0.2, 0.2], 0)
    analytic = 0.6 / math.sqrt(2)

    print("=== binary search along a promising ray ===")
    oracle = HardLabelOracle(model)
    r = dbr_search(oracle, example, np.array([1.0, 1.0]), tol=1e-4)
    print(f"found radius      {r:.6f}")
    print(f"closed form       {analytic:.6f}")
    print(f"queries spent     {oracle.query_count}")

    print("\n=== the fast check drops a hopeless ray for one query ===")
    oracle = HardLabelOracle(model)
    r = dbr_search(oracle, example, np.array([-1.0, -1.0]), tol=1e-4)
    print(f"radius            {r}  (ray saturates at (0,0), still class 0)")
    print(f"queries spent     {oracle.query_count}")

    print("\n=== and also drops rays that cannot beat the current best ===")
    oracle = HardLabelOracle(model)
    r = dbr_search(oracle, example, np.array([1.0, 1.0]), r_best=0.3, tol=1e-4)
    print(f"radius            {r}  (the point at r=0.3 is still class 0)")
    print(f"queries spent     {oracle.query_count}")

    print("\n=== the greedy sweep converges to a locally optimal vertex ===")
    oracle = HardLabelOracle(model)
    result = rays_naive(
        oracle, example, 1e-3, StoppingRule(budget=None, sweep_convergence=True)
    )
    print(f"direction         {result.d_best}")
    print(f"radius            {result.r_best:.6f}")
    print(f"linf distortion   {result.linf_distortion:.6f}")
    print(f"queries           {result.queries_used}")
    for k in range(2):
        flipped = result.d_best.copy()
        flipped[k] = -flipped[k]
        print(
            f"flip coord {k}      brute-force radius "
            f"{brute_force_radius(model, example, flipped, 0.01)}"
        )


if __name__ == "__main__":
    main()
