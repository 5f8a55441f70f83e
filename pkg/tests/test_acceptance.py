"""Acceptance run: one test per criterion, each printing a PASS/FAIL line."""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from qwalknet import oracle
from qwalknet.analysis import (
    PUBLISHED_N_FITS,
    PUBLISHED_T_FITS,
    compare_circuit_vs_oracle,
    fit_power_law,
    l1_distance,
    run_n_scaling,
    run_t_scaling,
)
from qwalknet.circuit import Circuit, build_shift, build_walk_circuit
from qwalknet.decompose import decompose_to_basis, resource_report
from qwalknet.graph import (
    GraphParams,
    complete_graph,
    cycle_graph,
    generate_ba,
    generate_er,
    generate_ws,
    path_graph,
)
from qwalknet.sim import NoiseModel, counts_to_probs, sample, simulate, simulate_noisy

N_GRID = [8, 16, 24, 32, 48, 64]
T_GRID = [1, 2, 3, 4, 6, 8]


@pytest.fixture
def report(capsys):
    def _report(tag: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {tag}: {detail}")
        assert ok, f"{tag}: {detail}"

    return _report


@pytest.fixture
def note(capsys):
    def _note(text: str) -> None:
        with capsys.disabled():
            print(f"    {text}")

    return _note


def test_c1_oracle_equivalence(report, er10):
    start = time.perf_counter()
    cmp_ = compare_circuit_vs_oracle(er10, 4)
    elapsed = time.perf_counter() - start
    ok = max(cmp_.l1) < 1e-9 and elapsed < 10
    report("C1 oracle equivalence", ok,
           "L1 at t=1..4 = " + ", ".join(f"{v:.1e}" for v in cmp_.l1) + f" (< 1e-9), {elapsed:.2f}s (< 10s)")


def test_c2_width_law(report):
    expected = {4: 4, 8: 6, 10: 8, 16: 8, 33: 12, 64: 12}
    widths = {}
    for n in expected:
        for g in (cycle_graph(n), generate_er(n, 0.6, seed=n)):
            widths.setdefault(n, set()).add(build_walk_circuit(g, 1).width)
    ok = all(widths[n] == {w} for n, w in expected.items())
    report("C2 width law", ok, ", ".join(f"N={n}:{sorted(widths[n])}" for n in expected) + " == 2*ceil(log2 N)")


def test_c3_shift_cost(report):
    rows = []
    ok = True
    for n_nodes in (4, 8, 10, 16, 33, 64):
        n = math.ceil(math.log2(n_nodes))
        alone = resource_report(Circuit(2 * n, tuple(build_shift(n)))).cx_count
        g = cycle_graph(n_nodes)
        per_step = (resource_report(build_walk_circuit(g, 2)).basis_counts["CX"]
                    - resource_report(build_walk_circuit(g, 1)).basis_counts["CX"])
        coin_only = per_step - alone
        ok &= alone == 3 * n
        rows.append(f"N={n_nodes}:{alone}")
        assert coin_only > 0
    report("C3 shift cost law", ok, "CX per shift " + ", ".join(rows) + " == 3*ceil(log2 N)")


@pytest.mark.parametrize(
    "params",
    [GraphParams("ER", 8, 0, p=0.4), GraphParams("WS", 8, 0, k=4, beta=0.5), GraphParams("BA", 8, 0, m=4)],
    ids=["ER", "WS", "BA"],
)
def test_c4_n_scaling(report, note, params):
    start = time.perf_counter()
    res = run_n_scaling(params, N_GRID, t=1, seeds_per_point=3)
    elapsed = time.perf_counter() - start
    a, sa, b, sb = PUBLISHED_N_FITS[params.model]
    note(f"mean depth {[int(d) for d in res.mean_depth]} over N={N_GRID}")
    note(f"published: {a}({sa}) N^{b:.2f}({round(sb * 100)}); prefactors come from a vendor optimizer "
         "and are not reproducible")
    ok = 1.6 <= res.fit.b <= 2.4 and elapsed < 600 and not res.failures
    report(f"C4 N-scaling {params.model}", ok,
           f"exponent {res.fit.b:.3f} +- {res.fit.stderr_b:.3f} in [1.6, 2.4], a={res.fit.a:.2f}, {elapsed:.1f}s")


def test_c5_t_scaling(report, note):
    res = run_t_scaling(GraphParams("ER", 32, 0, p=0.4), 32, T_GRID, seeds_per_point=3)
    per_seed = {}
    for r in res.records:
        per_seed.setdefault(r.seed, {})[r.t] = r.depth_basis
    affine = True
    for depths in per_seed.values():
        d = [depths[t] for t in T_GRID]
        step = d[1] - d[0]
        affine &= all(depths[t] == d[0] + (t - 1) * step for t in T_GRID)
    d1, step = res.mean_depth[0], res.mean_depth[1] - res.mean_depth[0]
    a, sa, b, sb = PUBLISHED_T_FITS["ER"]
    note(f"depth(t) = {d1 - step:.0f} + {step:.0f} t; increments "
         f"{[int(x) for x in np.diff(res.mean_depth) / np.diff(T_GRID)]}")
    note(f"published: {a}({sa}) t^{b:.2f}({round(sb * 100)}), not targeted")
    note(f"an affine law d0 + t*D fitted on t in {T_GRID} has exponent < 1 whenever d0 > 0; "
         f"here d0/D = {(d1 - step) / step:.3f}")
    ok = affine and 0.95 <= res.fit.b <= 1.05
    report("C5 t-scaling", ok, f"affine={affine}, exponent {res.fit.b:.4f} in [0.95, 1.05]")


def test_c6_regular_stationarity(report):
    worst = 0.0
    for g in (cycle_graph(8), complete_graph(8)):
        for t in range(11):
            p_circ = simulate(build_walk_circuit(g, t)).node_probs
            p_exact = oracle.node_probabilities(oracle.evolve(g, t), g)
            worst = max(worst, np.abs(p_circ - 1 / 8).max(), np.abs(p_exact - 1 / 8).max())
    report("C6 regular stationarity", worst < 1e-10, f"C8, K8, t=0..10: max |P_i - 1/N| = {worst:.1e} (< 1e-10)")


def test_c7_operator_properties(report):
    graphs = [path_graph(2), cycle_graph(4), complete_graph(4), cycle_graph(7), complete_graph(8), path_graph(9),
              generate_er(10, 0.3, 42), generate_ws(8, 2, 0.2, 1), generate_ws(8, 4, 0.5, 0),
              generate_ba(12, 2, 0), generate_er(16, 0.3, 3), generate_ws(16, 4, 0.3, 2), generate_ba(16, 3, 5)]
    worst = 0.0
    for g in graphs:
        ops = oracle.walk_operators(g)
        eye = np.eye(ops.dim)
        for m in (ops.coin, ops.shift):
            worst = max(worst, np.abs(m @ m - eye).max(), np.abs(m.conj().T @ m - eye).max())
    report("C7 operator properties", worst < 1e-12, f"{len(graphs)} graphs, max deviation {worst:.1e} (< 1e-12)")


def test_c8_metric_and_fit(report):
    cases = [([0.3, 0.7], [0.3, 0.7], 0.0), ([1, 0], [0, 1], 1.0), ([0.75, 0.25], [0.25, 0.75], 0.5)]
    l1_err = max(abs(l1_distance(p, q) - v) for p, q, v in cases)
    xs = np.array(N_GRID, dtype=float)
    f = fit_power_law(xs, 40 * xs**1.9)
    fit_err = max(abs(f.a / 40 - 1), abs(f.b / 1.9 - 1))
    report("C8 metric & fit", l1_err < 1e-12 and fit_err < 1e-9,
           f"l1 hand cases err {l1_err:.1e} (< 1e-12), fit rel err {fit_err:.1e} (< 1e-9)")


def test_c9_sampling(report, note, er10):
    res = simulate(build_walk_circuit(er10, 2))
    emp = counts_to_probs(sample(res, 10**6, seed=2024), 10)
    l1_shots = l1_distance(emp, res.node_probs)

    g = generate_ws(8, 2, 0.2, 1)
    basis = decompose_to_basis(build_walk_circuit(g, 1))
    identical = all(simulate_noisy(basis, NoiseModel(0.0), 5000, s) == sample(simulate(basis), 5000, s)
                    for s in range(3))

    exact = simulate(basis).node_probs
    eps_grid = [0.0, 1e-3, 1e-2, 5e-2]
    mean_l1 = []
    for eps in eps_grid:
        vals = [l1_distance(counts_to_probs(simulate_noisy(basis, NoiseModel(eps), 2000, s), 8), exact)
                for s in range(10)]
        mean_l1.append(float(np.mean(vals)))
    monotone = all(b > a for a, b in zip(mean_l1, mean_l1[1:]))
    note("mean L1 over 10 seeds vs epsilon: " + ", ".join(f"{e:g}:{v:.4f}" for e, v in zip(eps_grid, mean_l1)))
    note("hardware L1 values such as 0.2160 (N=8, t=1) reflect uncharacterised device noise and are not targets")
    ok = l1_shots <= 0.005 and identical and monotone
    report("C9 sampling", ok, f"1e6-shot L1 {l1_shots:.5f} (<= 0.005), eps=0 bit-identical={identical}, "
           f"L1 monotone in eps={monotone}")
