"""L1 distance to the exact distribution under per-gate Pauli noise, WS graphs with N=4 and N=8."""

from __future__ import annotations

import argparse

import numpy as np

from qwalknet.analysis import l1_distance
from qwalknet.circuit import build_walk_circuit
from qwalknet.decompose import decompose_to_basis
from qwalknet.graph import generate_ws
from qwalknet.sim import NoiseModel, counts_to_probs, simulate, simulate_noisy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", default="0,0.0005,0.001,0.003,0.01")
    ap.add_argument("--shots", type=int, default=4000)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--t-max", type=int, default=2)
    args = ap.parse_args()

    eps_grid = [float(e) for e in args.eps.split(",")]
    print("N,t,basis_gates," + ",".join(f"eps={e:g}" for e in eps_grid))
    for n, graph_seed in ((4, 1), (8, 1)):
        g = generate_ws(n, 2, 0.2, graph_seed)
        for t in range(1, args.t_max + 1):
            c = decompose_to_basis(build_walk_circuit(g, t))
            exact = simulate(c).node_probs
            row = []
            for eps in eps_grid:
                vals = [l1_distance(counts_to_probs(simulate_noisy(c, NoiseModel(eps), args.shots, s), n), exact)
                        for s in range(args.seeds)]
                row.append(f"{np.mean(vals):.4f}")
            print(f"{n},{t},{len(c)}," + ",".join(row))


if __name__ == "__main__":
    main()
