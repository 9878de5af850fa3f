"""Tour of the multi-objective quality indicators on tiny worked examples.

Every number printed here can be checked by hand: the fronts are small
enough to sketch and reason about directly.  All indicators assume
minimization.

Usage:  python3 demos/indicator_tour.py
"""

import numpy as np

from sasbt.indicators import (
    DistinctnessPolicy,
    distinct_critical,
    generational_distance,
    hypervolume,
    non_dominated_filter,
    normalize,
    spread,
)


def main() -> None:
    print("== hypervolume (dominated area below the reference point) ==")
    ref = np.array([1.0, 1.0])
    single = np.array([[0.5, 0.5]])
    print(f"  one point {single[0]} vs reference {ref}: "
          f"{hypervolume(single, ref)}  (a 0.5 x 0.5 square = 0.25)")
    pair = np.array([[0.25, 0.75], [0.75, 0.25]])
    print(f"  two trade-off points {pair.tolist()}: "
          f"{hypervolume(pair, ref)}  (two squares minus their overlap = 0.3125)")
    cube = np.array([[0.5, 0.5, 0.5]])
    print(f"  three objectives {cube[0]} vs (1,1,1): "
          f"{hypervolume(cube, np.ones(3))}  (a 0.5^3 cube = 0.125)")

    print("\n== non-dominated filter ==")
    pts = np.array([[1.0, 4.0], [2.0, 2.0], [3.0, 3.0], [4.0, 1.0], [2.5, 2.0]])
    front = non_dominated_filter(pts)
    print(f"  from {pts.tolist()}")
    print(f"  keep {front.tolist()}")
    print("  ((3,3) and (2.5,2) both lose to (2,2))")

    print("\n== generational distance (how far a front sits from a target) ==")
    target = np.array([[0.0, 1.0], [1.0, 0.0]])
    near = np.array([[0.1, 1.0], [1.0, 0.1]])
    print(f"  front {near.tolist()} vs target {target.tolist()}: "
          f"{generational_distance(near, target):.3f}  (every point is 0.1 away)")
    print(f"  the target against itself: "
          f"{generational_distance(target, target)}")

    print("\n== spread (gap uniformity along a two-objective front) ==")
    extremes = np.array([[0.0, 1.0], [1.0, 0.0]])
    even = np.column_stack([np.linspace(0, 1, 5), np.linspace(1, 0, 5)])
    clustered = np.array([[0.0, 1.0], [0.05, 0.95], [0.1, 0.9], [1.0, 0.0]])
    print(f"  five evenly spaced points: {spread(even, extremes)}  "
          f"(perfectly uniform, touching both extremes)")
    print(f"  same ends but clustered low: {spread(clustered, extremes):.3f}  "
          f"(bigger = less uniform)")

    print("\n== normalization (shared scale before scoring) ==")
    bounds = np.array([[0.0, 10.0], [2.0, 4.0]])
    raw = np.array([[5.0, 3.0], [12.0, 1.0]])
    print(f"  {raw.tolist()} with ranges {bounds.tolist()} -> "
          f"{normalize(raw, bounds).tolist()}  (overshoot clamps to [0, 1])")

    print("\n== counting distinct critical scenarios ==")
    genomes = np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [1.0, 2.0, 4.0]])
    print(f"  {genomes.tolist()}")
    print(f"  any-difference: {distinct_critical(genomes)}  "
          f"(exact duplicates collapse)")
    close = np.array([[0.0, 0.0], [0.001, 0.0]])
    policy = DistinctnessPolicy(mode="thresholded", min_vars=1, epsilon=0.01)
    print(f"  {close.tolist()} with a 0.01 tolerance: "
          f"{distinct_critical(close, policy)}  "
          f"(a 0.001 wiggle is not a new scenario)")
    spread_out = np.array([[0.0, 0.0], [0.5, 0.0], [0.5, 0.5]])
    strict = DistinctnessPolicy(mode="thresholded", min_vars=2, epsilon=0.01)
    print(f"  {spread_out.tolist()} requiring two variables to move: "
          f"{distinct_critical(spread_out, strict)}  "
          f"(the middle point differs from both ends in one variable only)")


if __name__ == "__main__":
    main()
