"""Distribution distances, power-law fits, and the depth/agreement experiments."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from html import escape
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from . import oracle
from .circuit import build_walk_circuit
from .decompose import resource_report
from .graph import Graph, GraphError, GraphParams, generate
from .sim import counts_to_probs, sample, simulate

__all__ = [
    "PUBLISHED_N_FITS",
    "PUBLISHED_T_FITS",
    "FitResult",
    "ScalingRecord",
    "ScalingResult",
    "Comparison",
    "l1_distance",
    "fit_power_law",
    "run_n_scaling",
    "run_t_scaling",
    "compare_circuit_vs_oracle",
    "emit_histogram_svg",
    "write_scaling_csv",
    "write_comparison_csv",
    "write_fit_summary_csv",
]

log = logging.getLogger(__name__)

# Reported fits, as (prefactor, stderr, exponent, stderr); printed next to ours, never asserted.
PUBLISHED_N_FITS = {"ER": (38, 12, 1.91, 0.07), "WS": (41, 8, 1.86, 0.04), "BA": (38, 12, 1.90, 0.07)}
PUBLISHED_T_FITS = {"ER": (8969, 669, 0.86, 0.01), "WS": (8841, 743, 0.88, 0.02), "BA": (8841, 743, 0.88, 0.02)}


def l1_distance(p: Sequence[float], q: Sequence[float], atol: float = 1e-6) -> float:
    """Total variation distance ``0.5 * sum |p - q|``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    for name, v in (("p", p), ("q", q)):
        if (v < -atol).any() or abs(v.sum() - 1.0) > atol:
            raise ValueError(f"{name} is not a probability vector (sum={v.sum()!r})")
    return float(0.5 * np.abs(p - q).sum())


@dataclass(frozen=True)
class FitResult:
    """``y = a * x**b`` fitted by least squares in log-log space."""

    a: float
    b: float
    stderr_a: float
    stderr_b: float
    r_squared: float
    n_points: int

    def __call__(self, x):
        return self.a * np.asarray(x, dtype=float) ** self.b

    def describe(self) -> str:
        return f"{self.a:.4g}(+-{self.stderr_a:.2g}) * x^{self.b:.4f}(+-{self.stderr_b:.2g}), R^2={self.r_squared:.5f}"


def fit_power_law(xs: Sequence[float], ys: Sequence[float]) -> FitResult:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape:
        raise ValueError("xs and ys differ in length")
    if x.size < 3:
        raise ValueError(f"need at least 3 points for a power-law fit, got {x.size}")
    if (x <= 0).any() or (y <= 0).any():
        raise ValueError("power-law fit needs strictly positive data")
    lx, ly = np.log(x), np.log(y)
    if np.ptp(lx) == 0:
        raise ValueError("all x values are equal")
    res = stats.linregress(lx, ly)
    resid = ly - (res.intercept + res.slope * lx)
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    ss_res = float((resid**2).sum())
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    a = math.exp(res.intercept)
    return FitResult(a, float(res.slope), a * float(res.intercept_stderr), float(res.stderr), r2, int(x.size))


@dataclass(frozen=True)
class ScalingRecord:
    model: str
    params: GraphParams
    n_nodes: int
    t: int
    depth_basis: int
    width: int
    cx_count: int
    seed: int

    def row(self) -> str:
        return f"{self.model},{self.n_nodes},{self.t},{self.seed},{self.width},{self.depth_basis},{self.cx_count}"


@dataclass(frozen=True)
class ScalingResult:
    records: list[ScalingRecord]
    xs: list[float]
    mean_depth: list[float]
    std_depth: list[float]
    fit: FitResult
    failures: list[tuple[int, int, str]] = field(default_factory=list)


def _measure(job: tuple[GraphParams, int]) -> ScalingRecord | tuple[int, int, str]:
    params, t = job
    try:
        g = generate(params)
    except GraphError as exc:
        return (params.n, params.seed, str(exc))
    rep = resource_report(build_walk_circuit(g, t))
    return ScalingRecord(params.model, params, params.n, t, rep.depth_basis, rep.width, rep.cx_count, params.seed)


def _run_jobs(jobs: list[tuple[GraphParams, int]], n_jobs: int) -> list:
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(_measure, jobs))
    return [_measure(j) for j in jobs]


def _aggregate(outcomes, key) -> tuple[list[ScalingRecord], list, dict]:
    records, failures = [], []
    groups: dict = {}
    for out in outcomes:
        if isinstance(out, ScalingRecord):
            records.append(out)
            groups.setdefault(key(out), []).append(out.depth_basis)
        else:
            log.warning("generation failed for n=%s seed=%s: %s; point excluded", *out)
            failures.append(out)
    return records, failures, groups


def _summarise(groups: dict) -> tuple[list[float], list[float], list[float]]:
    xs = sorted(groups)
    mean = [float(np.mean(groups[x])) for x in xs]
    std = [float(np.std(groups[x], ddof=1)) if len(groups[x]) > 1 else 0.0 for x in xs]
    return [float(x) for x in xs], mean, std


def run_n_scaling(params: GraphParams, n_values: Sequence[int], t: int = 1,
                  seeds_per_point: int = 3, n_jobs: int = 1) -> ScalingResult:
    """Basis depth against N at fixed ``t``; seeds are ``params.seed + s``.

    The fit uses the per-N mean over seeds.
    """
    if seeds_per_point < 1:
        raise ValueError("seeds_per_point must be >= 1")
    if any(n < 4 for n in n_values):
        raise ValueError("every N must be >= 4")
    jobs = [(params.with_n(n, params.seed + s), t) for n in n_values for s in range(seeds_per_point)]
    records, failures, groups = _aggregate(_run_jobs(jobs, n_jobs), key=lambda r: r.n_nodes)
    xs, mean, std = _summarise(groups)
    return ScalingResult(records, xs, mean, std, fit_power_law(xs, mean), failures)


def run_t_scaling(params: GraphParams, n_nodes: int, t_values: Sequence[int],
                  seeds_per_point: int = 3, n_jobs: int = 1) -> ScalingResult:
    """Basis depth against step count at fixed N."""
    if len(set(t_values)) < 2:
        raise ValueError("t-scaling needs at least two distinct t values")
    if any(t < 1 for t in t_values):
        raise ValueError("t values must be >= 1 for a power-law fit")
    jobs = [(params.with_n(n_nodes, params.seed + s), t) for s in range(seeds_per_point) for t in t_values]
    records, failures, groups = _aggregate(_run_jobs(jobs, n_jobs), key=lambda r: r.t)
    xs, mean, std = _summarise(groups)
    return ScalingResult(records, xs, mean, std, fit_power_law(xs, mean), failures)


@dataclass(frozen=True)
class Comparison:
    graph: Graph
    ts: list[int]
    l1: list[float]
    exact: list[np.ndarray]
    circuit: list[np.ndarray]
    sampled: list[np.ndarray | None]

    def rows(self):
        for t, pe, pc, ps in zip(self.ts, self.exact, self.circuit, self.sampled):
            for node in range(self.graph.n_nodes):
                p_s = "" if ps is None else f"{ps[node]:.10g}"
                yield f"{t},{node},{pe[node]:.17g},{pc[node]:.17g},{p_s}"


def compare_circuit_vs_oracle(g: Graph, t_max: int, shots: int | None = None, seed: int = 0) -> Comparison:
    """Node distributions from the simulated circuit against the dense oracle, t = 1..t_max."""
    if g.n_nodes > 16:
        raise oracle.OracleSizeError(f"comparison is limited to N <= 16, got N={g.n_nodes}")
    if not 1 <= t_max <= 8:
        raise ValueError("t_max must lie in 1..8")
    ops = oracle.walk_operators(g)
    psi = oracle.initial_state(g)
    ts, l1s, exact, circ, sampled = [], [], [], [], []
    for t in range(1, t_max + 1):
        psi = ops.step @ psi
        p_exact = oracle.node_probabilities(psi, g)
        res = simulate(build_walk_circuit(g, t))
        ts.append(t)
        exact.append(p_exact)
        circ.append(res.node_probs)
        l1s.append(l1_distance(res.node_probs, p_exact))
        sampled.append(counts_to_probs(sample(res, shots, seed + t), g.n_nodes) if shots else None)
    return Comparison(g, ts, l1s, exact, circ, sampled)


_PALETTE = ("#c0392b", "#1f3a93", "#17a2b8", "#27ae60", "#8e44ad")


def emit_histogram_svg(series: Sequence[tuple[str, Sequence[float]]], path: str | Path,
                       title: str = "", categories: Sequence[str] | None = None) -> None:
    """Grouped bar chart; ``series`` is a list of (legend label, values)."""
    if not series or not all(len(v) for _, v in series):
        raise ValueError("need at least one non-empty series")
    n = len(series[0][1])
    if any(len(v) != n for _, v in series):
        raise ValueError("all series must have the same length")
    categories = [str(i) for i in range(n)] if categories is None else list(categories)
    width, height, left, bottom, top = 640, 360, 50, 40, 40
    plot_w, plot_h = width - left - 20, height - bottom - top
    vmax = max(max(v) for _, v in series) or 1.0
    group_w = plot_w / n
    bar_w = group_w * 0.8 / len(series)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
    ]
    for tick in np.linspace(0, vmax, 5):
        y = top + plot_h - plot_h * tick / vmax
        out.append(f'<text x="{left - 4}" y="{y + 4:.1f}" text-anchor="end">{tick:.3f}</text>')
    for s, (label, values) in enumerate(series):
        color = _PALETTE[s % len(_PALETTE)]
        for i, v in enumerate(values):
            h = plot_h * float(v) / vmax
            x = left + i * group_w + group_w * 0.1 + s * bar_w
            out.append(f'<rect class="bar" data-series="{s}" data-index="{i}" x="{x:.2f}" '
                       f'y="{top + plot_h - h:.2f}" width="{bar_w:.2f}" height="{h:.2f}" fill="{color}"/>')
        out.append(f'<rect x="{left + 10 + 110 * s}" y="{height - 14}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{left + 24 + 110 * s}" y="{height - 5}">{escape(label)}</text>')
    for i, c in enumerate(categories):
        x = left + (i + 0.5) * group_w
        out.append(f'<text x="{x:.1f}" y="{top + plot_h + 14}" text-anchor="middle">{escape(c)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


def write_scaling_csv(records: Sequence[ScalingRecord], path: str | Path, header: str = "") -> None:
    with open(path, "w") as fh:
        fh.write(header)
        fh.write("model,n,t,seed,width,depth_basis,cx_count\n")
        for r in records:
            fh.write(r.row() + "\n")


def write_comparison_csv(comparison: Comparison, path: str | Path, header: str = "") -> None:
    with open(path, "w") as fh:
        fh.write(header)
        fh.write("t,node,p_exact,p_circuit,p_sampled\n")
        for row in comparison.rows():
            fh.write(row + "\n")


def write_fit_summary_csv(rows: Sequence[tuple[str, FitResult]], path: str | Path, header: str = "") -> None:
    with open(path, "w") as fh:
        fh.write(header)
        fh.write("model,a,stderr_a,b,stderr_b,r2\n")
        for model, f in rows:
            fh.write(f"{model},{f.a:.10g},{f.stderr_a:.10g},{f.b:.10g},{f.stderr_b:.10g},{f.r_squared:.10g}\n")
