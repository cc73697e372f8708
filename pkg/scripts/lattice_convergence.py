#!/usr/bin/env python3
"""Lattice-oracle convergence study against the closed-form kernels.

Prints the deviation of the N-slice Monte Carlo kernel from the closed
form for D = 3 and D = 4 and the fitted order in 1/N.
"""

import argparse
import time

from pseudoheat.geometry import HoricyclicPoint, geodesic_distance
from pseudoheat.kernels import EvalParams, kernel
from pseudoheat.lattice import LatticeSpec, convergence_order, lattice_kernel


def study(dim: int, tau: float, n_list, samples: int, seed: int) -> float:
    if dim == 3:
        q1, q2 = HoricyclicPoint(1.0, (0.0,)), HoricyclicPoint(1.2, (0.3,))
    else:
        q1, q2 = HoricyclicPoint(1.0, (0.0, 0.0)), HoricyclicPoint(1.2, (0.3, -0.2))
    params = EvalParams(dim, tau)
    closed = kernel(params, geodesic_distance(q1, q2)).value
    print(f"D={dim}, tau={tau}, closed value {closed:.8g}")
    devs = []
    for n in n_list:
        t0 = time.time()
        value, err = lattice_kernel(params, q1, q2, LatticeSpec(n, samples=samples, seed=seed))
        dev = value / closed - 1.0
        devs.append((n, dev))
        print(
            f"  N={n:3d}: lattice {value:.8g} +- {err:.2g}   rel dev {dev:+.4%}"
            f"   ({time.time() - t0:.1f}s)"
        )
    order = convergence_order(devs)
    print(f"  fitted order in 1/N: {order:.3f}")
    return order


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tau", type=float, default=0.25)
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--n", type=str, default="4,8,16,32")
    args = ap.parse_args()
    n_list = [int(v) for v in args.n.split(",")]
    for dim in (3, 4):
        study(dim, args.tau, n_list, args.samples, args.seed)


if __name__ == "__main__":
    main()
