#!/usr/bin/env python3
"""Three ways to answer an underdetermined system.

With more unknowns than equations there is a whole affine space of
solutions.  solve_basic picks one supported on part of the unknowns (fast,
solution norm depends on luck), solve_min_norm picks the shortest one, and
the pseudoinverse is the textbook reference for that shortest solution.
"""

import numpy as np

from mixfactor import gen_condition, solve_basic, solve_min_norm


def main():
    rng = np.random.default_rng(11)
    m, n = 40, 200
    a = gen_condition(m, n, kappa=1e4, rng=rng.spawn(1)[0]).a
    b = rng.standard_normal(m)

    basic = solve_basic(a, b, method="rurv-ros-basic", rng=rng.spawn(1)[0])
    shortest = solve_min_norm(a, b, rng=rng.spawn(1)[0])
    reference = np.linalg.pinv(a) @ b

    print(f"system: {m} equations, {n} unknowns, condition 1e4\n")
    rows = [
        ("rurv-ros-basic", basic.x, basic.residual_norm),
        ("rvlu-minnorm", shortest.x, shortest.residual_norm),
        ("pseudoinverse", reference, np.linalg.norm(a @ reference - b)),
    ]
    print(f"{'method':>16} {'residual':>10} {'norm of x':>10}")
    for name, x, res in rows:
        print(f"{name:>16} {res:10.2e} {np.linalg.norm(x):10.4f}")

    gap = np.linalg.norm(shortest.x - reference) / np.linalg.norm(reference)
    print(f"\nmin-norm vs pseudoinverse: relative difference {gap:.2e}")
    print("all residuals are at roundoff; only the solution lengths differ")


if __name__ == "__main__":
    main()
