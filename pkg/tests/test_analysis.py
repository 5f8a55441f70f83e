from __future__ import annotations

import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from qwalknet.analysis import (
    compare_circuit_vs_oracle,
    emit_histogram_svg,
    fit_power_law,
    l1_distance,
    run_n_scaling,
    run_t_scaling,
    write_scaling_csv,
)
from qwalknet.graph import GenerationError, GraphParams, complete_graph, cycle_graph, generate_ws
from qwalknet.oracle import OracleSizeError


@pytest.mark.parametrize(
    "p,q,expected",
    [([0.2, 0.3, 0.5], [0.2, 0.3, 0.5], 0.0), ([1, 0], [0, 1], 1.0), ([0.75, 0.25], [0.25, 0.75], 0.5)],
)
def test_l1_hand_cases(p, q, expected):
    assert abs(l1_distance(p, q) - expected) < 1e-12


def test_l1_length_mismatch():
    with pytest.raises(ValueError):
        l1_distance([1, 0], [1, 0, 0])


def _simplex(k):
    return st.lists(st.floats(0.0, 1.0), min_size=k, max_size=k).filter(lambda v: sum(v) > 1e-6).map(
        lambda v: np.array(v) / sum(v))


@given(data=st.data(), k=st.integers(2, 12))
def test_l1_is_metric(data, k):
    p, q, r = (data.draw(_simplex(k)) for _ in range(3))
    assert l1_distance(p, q) == pytest.approx(l1_distance(q, p), abs=1e-12)
    assert l1_distance(p, p) < 1e-12
    assert l1_distance(p, r) <= l1_distance(p, q) + l1_distance(q, r) + 1e-12
    assert 0.0 <= l1_distance(p, q) <= 1.0 + 1e-12


def test_fit_exact_law():
    xs = np.array([8, 16, 24, 32, 48, 64], dtype=float)
    f = fit_power_law(xs, 40 * xs**1.9)
    assert abs(f.a / 40 - 1) < 1e-9 and abs(f.b / 1.9 - 1) < 1e-9
    assert f.stderr_b < 1e-9 and f.r_squared == pytest.approx(1.0)


def test_fit_constant():
    assert abs(fit_power_law([1, 2, 3, 4], [7, 7, 7, 7]).b) < 1e-12


@pytest.mark.parametrize("xs,ys", [([1, 2], [1, 2]), ([1, 2, -3], [1, 2, 3]), ([1, 2, 3], [1, 0, 3])])
def test_fit_rejects(xs, ys):
    with pytest.raises(ValueError):
        fit_power_law(xs, ys)


@given(a=st.floats(0.1, 1e4), b=st.floats(-3, 3), n=st.integers(3, 10))
def test_fit_recovers_synthetic(a, b, n):
    xs = np.geomspace(2, 200, n)
    f = fit_power_law(xs, a * xs**b)
    assert f.a == pytest.approx(a, rel=1e-9)
    assert f.b == pytest.approx(b, rel=1e-9, abs=1e-12)


def test_fit_noisy_has_positive_stderr():
    rng = np.random.default_rng(0)
    xs = np.arange(1, 11, dtype=float)
    f = fit_power_law(xs, 3 * xs**1.5 * np.exp(rng.normal(0, 0.05, xs.size)))
    assert f.stderr_a > 0 and f.stderr_b > 0 and 0 < f.r_squared < 1


def test_n_scaling_small_grid():
    res = run_n_scaling(GraphParams("ER", 8, 0, p=0.5), [8, 16, 32], t=1, seeds_per_point=2)
    assert len(res.records) == 6 and res.xs == [8.0, 16.0, 32.0]
    assert all(r.width == 2 * math.ceil(math.log2(r.n_nodes)) for r in res.records)
    assert 1.0 < res.fit.b < 3.0


def test_n_scaling_records_failures(monkeypatch):
    import qwalknet.analysis as an

    real = an.generate

    def flaky(params):
        if params.n == 16:
            raise GenerationError("forced")
        return real(params)

    monkeypatch.setattr(an, "generate", flaky)
    res = run_n_scaling(GraphParams("ER", 8, 0, p=0.5), [8, 12, 16, 24], t=1, seeds_per_point=2)
    assert [f[0] for f in res.failures] == [16, 16]
    assert res.xs == [8.0, 12.0, 24.0]


def test_n_scaling_too_few_points():
    with pytest.raises(ValueError, match="at least 3"):
        run_n_scaling(GraphParams("ER", 8, 0, p=0.0001), [8, 16, 32], t=1, seeds_per_point=1)


def test_n_scaling_rejects_small_n():
    with pytest.raises(ValueError):
        run_n_scaling(GraphParams("BA", 8, 0, m=2), [2, 8, 16], t=1)


def test_t_scaling_affine():
    res = run_t_scaling(GraphParams("WS", 8, 1, k=2, beta=0.2), 16, [1, 2, 3, 4], seeds_per_point=1)
    inc = np.diff(res.mean_depth)
    assert (inc == inc[0]).all()


def test_t_scaling_needs_two_points():
    with pytest.raises(ValueError):
        run_t_scaling(GraphParams("ER", 8, 0, p=0.4), 16, [2], seeds_per_point=1)


def test_scaling_csv_deterministic(tmp_path):
    params = GraphParams("BA", 8, 2, m=2)
    paths = []
    for name in ("a.csv", "b.csv"):
        res = run_n_scaling(params, [8, 12, 16], t=1, seeds_per_point=2)
        write_scaling_csv(res.records, tmp_path / name)
        paths.append((tmp_path / name).read_bytes())
    assert paths[0] == paths[1]
    assert paths[0].startswith(b"model,n,t,seed,width,depth_basis,cx_count\n")


def test_compare_er10(er10):
    cmp_ = compare_circuit_vs_oracle(er10, 4)
    assert cmp_.ts == [1, 2, 3, 4] and max(cmp_.l1) < 1e-9


@pytest.mark.parametrize("g", [cycle_graph(8), complete_graph(6)])
def test_compare_regular_uniform(g):
    cmp_ = compare_circuit_vs_oracle(g, 3)
    for pe, pc in zip(cmp_.exact, cmp_.circuit):
        assert np.allclose(pe, 1 / g.n_nodes, atol=1e-12) and np.allclose(pc, 1 / g.n_nodes, atol=1e-12)
    assert max(cmp_.l1) < 1e-12


def test_compare_ws8_rows():
    cmp_ = compare_circuit_vs_oracle(generate_ws(8, 2, 0.2, 1), 4, shots=2000, seed=1)
    rows = list(cmp_.rows())
    assert len(rows) == 32
    assert all(len(r.split(",")) == 5 and r.split(",")[4] for r in rows)


def test_compare_limits():
    with pytest.raises(OracleSizeError):
        compare_circuit_vs_oracle(cycle_graph(17), 2)
    with pytest.raises(ValueError):
        compare_circuit_vs_oracle(cycle_graph(8), 9)


def _bars(path):
    ns = {"s": "http://www.w3.org/2000/svg"}
    return [r for r in ET.parse(path).getroot().findall("s:rect", ns) if r.get("class") == "bar"]


def test_svg_identical_series(tmp_path):
    v = [0.1, 0.4, 0.5]
    emit_histogram_svg([("a", v), ("b", v)], tmp_path / "h.svg")
    bars = _bars(tmp_path / "h.svg")
    by = {(b.get("data-series"), b.get("data-index")): b.get("height") for b in bars}
    assert all(by[("0", str(i))] == by[("1", str(i))] for i in range(3))


def test_svg_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_histogram_svg([], tmp_path / "h.svg")
    with pytest.raises(ValueError):
        emit_histogram_svg([("a", [])], tmp_path / "h.svg")


def test_svg_er10_groups(tmp_path, er10):
    cmp_ = compare_circuit_vs_oracle(er10, 1)
    for name in ("a.svg", "b.svg"):
        emit_histogram_svg([("exact", cmp_.exact[0]), ("circuit", cmp_.circuit[0])], tmp_path / name, "t=1")
    assert len(_bars(tmp_path / "a.svg")) == 20
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
