"""Command-line entry point: ``qwalknet {generate,compile,run,compare,scaling}``.

Exit codes: 0 success, 1 usage, 2 runtime or numeric failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, analysis
from .circuit import CircuitError, build_walk_circuit
from .decompose import decompose_to_basis, resource_report
from .graph import Graph, GraphError, GraphParams, GraphParseError, generate, load_graph, save_graph
from .oracle import NormalizationError, OracleSizeError
from .sim import NoiseModel, NumericError, QubitCapError, sample, save_counts_csv, simulate, simulate_noisy

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_IO = 0, 1, 2, 3

DEFAULT_N_GRID = (8, 16, 24, 32, 48, 64)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    command: str
    flags: tuple[tuple[str, object], ...]
    out: Path
    timestamp: bool

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        skip = {"func", "command", "no_timestamp", "verbose"}
        flags = tuple(sorted((k, v) for k, v in vars(args).items() if k not in skip))
        return cls(args.command, flags, Path(args.out), not args.no_timestamp)

    def header_lines(self) -> list[str]:
        parts = []
        for k, v in self.flags:
            if v is None or v is False:
                continue
            name = "--" + k.replace("_", "-")
            if isinstance(v, list):
                v = ",".join(map(str, v))
            parts.append(name if v is True else f"{name}={v}")
        flag_text = " ".join(parts)
        lines = [f"qwalknet {__version__} {self.command} {flag_text}".rstrip()]
        if self.timestamp:
            lines.append("generated " + datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"))
        return lines

    def csv_header(self) -> str:
        return "".join(f"# {line}\n" for line in self.header_lines())

    def provenance(self) -> dict:
        return {"header": self.header_lines()}


def _graph_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", help="graph file (edge list or .json)")
    p.add_argument("--model", type=str.upper, choices=("ER", "WS", "BA"))
    p.add_argument("--n", type=int, help="number of nodes")
    p.add_argument("--p", type=float, help="ER edge probability")
    p.add_argument("--k", type=int, help="WS lattice degree (even)")
    p.add_argument("--beta", type=float, help="WS rewiring probability")
    p.add_argument("--m", type=int, help="BA edges per new node")
    p.add_argument("--seed", type=int, default=0)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp header line")
    p.add_argument("-v", "--verbose", action="store_true")


def _params(args, n: int | None = None) -> GraphParams:
    if args.model is None:
        raise UsageError("--model is required")
    n = args.n if n is None else n
    if n is None:
        raise UsageError("--n is required")
    kw = {k: getattr(args, k) for k in ("p", "k", "beta", "m") if getattr(args, k) is not None}
    try:
        return GraphParams(args.model, n, args.seed, **kw)
    except GraphError as exc:
        raise UsageError(str(exc)) from None


def _resolve_graph(args) -> Graph:
    if args.graph and args.model:
        raise UsageError("give either --graph or --model, not both")
    if args.graph:
        return load_graph(args.graph)
    return generate(_params(args))


def _out_dir(cfg: RunConfig) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    return cfg.out


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def cmd_generate(args, cfg: RunConfig) -> int:
    g = generate(_params(args))
    out = _out_dir(cfg)
    stem = args.name or f"{args.model.lower()}{args.n}_s{args.seed}"
    text = "".join(f"# {line}\n" for line in cfg.header_lines()) + g.to_edgelist()
    (out / f"{stem}.txt").write_text(text)
    save_graph(g, out / f"{stem}.json")
    d = g.degrees
    print(f"N={g.n_nodes} |E|={g.n_edges} degree min/mean/max={min(d)}/{sum(d) / len(d):.3f}/{max(d)}")
    print(f"wrote {out / stem}.txt and {stem}.json")
    return EXIT_OK


def cmd_compile(args, cfg: RunConfig) -> int:
    if args.t < 0:
        raise UsageError("--t must be >= 0")
    if args.qasm and args.no_decompose:
        raise UsageError("--qasm needs the basis circuit; drop --no-decompose")
    g = _resolve_graph(args)
    circ = build_walk_circuit(g, args.t)
    report = resource_report(circ)
    out = _out_dir(cfg)
    emitted = circ if args.no_decompose else decompose_to_basis(circ)
    body = json.loads(emitted.to_json())
    body["provenance"] = cfg.provenance()
    _write_json(out / "circuit.json", body)
    if args.qasm:
        header = "".join(f"// {line}\n" for line in cfg.header_lines())
        (out / "circuit.qasm").write_text(header + emitted.to_qasm())
    _write_json(out / "report.json", {**report.as_dict(), "provenance": cfg.provenance()})
    print(f"N={g.n_nodes} t={args.t} width={report.width} depth_logical={report.depth_logical} "
          f"depth_basis={report.depth_basis} cx={report.cx_count} basis_gates={report.n_basis_gates}")
    return EXIT_OK


def cmd_run(args, cfg: RunConfig) -> int:
    if args.t < 0 or args.shots < 1:
        raise UsageError("--t must be >= 0 and --shots >= 1")
    g = _resolve_graph(args)
    circ = build_walk_circuit(g, args.t)
    noise = NoiseModel(args.epsilon)
    exact = simulate(circ)
    if noise.epsilon > 0:
        counts = simulate_noisy(decompose_to_basis(circ), noise, args.shots, args.sample_seed)
    else:
        # identical to the noisy path at epsilon 0, without lowering
        counts = sample(exact, args.shots, args.sample_seed)
    out = _out_dir(cfg)
    save_counts_csv(counts, out / "counts.csv", header=cfg.csv_header())
    with open(out / "probs.csv", "w") as fh:
        fh.write(cfg.csv_header())
        fh.write("node,p_exact\n")
        for i, p in enumerate(exact.node_probs):
            fh.write(f"{i},{p:.17g}\n")
    print(f"shots={args.shots} epsilon={noise.epsilon} invalid={counts['invalid']}")
    return EXIT_OK


def cmd_compare(args, cfg: RunConfig) -> int:
    g = _resolve_graph(args)
    cmp_ = analysis.compare_circuit_vs_oracle(g, args.t_max, shots=args.shots, seed=args.sample_seed)
    out = _out_dir(cfg)
    analysis.write_comparison_csv(cmp_, out / "comparison.csv", header=cfg.csv_header())
    with open(out / "l1.csv", "w") as fh:
        fh.write(cfg.csv_header())
        fh.write("t,l1\n")
        for t, v in zip(cmp_.ts, cmp_.l1):
            fh.write(f"{t},{v:.6e}\n")
            print(f"t={t} L1={v:.3e}")
    if not args.no_svg:
        for t, pe, pc in zip(cmp_.ts, cmp_.exact, cmp_.circuit):
            analysis.emit_histogram_svg([("exact", pe), ("circuit", pc)], out / f"compare_t{t}.svg",
                                        title=f"N={g.n_nodes}, t={t}")
    return EXIT_OK


def cmd_scaling(args, cfg: RunConfig) -> int:
    template = _params(args, n=args.n or 8)
    out = _out_dir(cfg)
    if args.t_values:
        res = analysis.run_t_scaling(template, args.n or 32, args.t_values, args.seeds, args.jobs)
        published = analysis.PUBLISHED_T_FITS[template.model]
        what = "t"
    else:
        res = analysis.run_n_scaling(template, args.n_values, args.t, args.seeds, args.jobs)
        published = analysis.PUBLISHED_N_FITS[template.model]
        what = "N"
    analysis.write_scaling_csv(res.records, out / "scaling.csv", header=cfg.csv_header())
    analysis.write_fit_summary_csv([(template.model, res.fit)], out / "fit.csv", header=cfg.csv_header())
    for x, m, s in zip(res.xs, res.mean_depth, res.std_depth):
        print(f"{what}={x:g} depth_basis={m:.1f} (sd {s:.1f})")
    print(f"fit {template.model}: depth = {res.fit.describe()}")
    a, sa, b, sb = published
    print(f"published {template.model}: depth = {a}({sa}) {what}^{b:.2f}({round(sb * 100)})")
    if args.t_values:
        steps = [(d1 - d0) / (t1 - t0) for t0, t1, d0, d1 in
                 zip(res.xs, res.xs[1:], res.mean_depth, res.mean_depth[1:])]
        print("per-step depth increments: " + ", ".join(f"{v:g}" for v in steps))
    print("note: published prefactors come from a vendor optimizer and are not reproducible here")
    if res.failures:
        print(f"warning: {len(res.failures)} point(s) excluded after generation failure", file=sys.stderr)
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qwalknet", description="Coined quantum walks on complex networks as gate circuits.")
    parser.add_argument("--version", action="version", version=f"qwalknet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="generate a random graph")
    _graph_source(p)
    _common(p)
    p.add_argument("--name", help="output file stem")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("compile", help="build and lower the walk circuit")
    _graph_source(p)
    _common(p)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--no-decompose", action="store_true", help="write the logical circuit")
    p.add_argument("--qasm", action="store_true", help="also write OpenQASM 3")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("run", help="simulate and sample the walk")
    _graph_source(p)
    _common(p)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--shots", type=int, default=8192)
    p.add_argument("--epsilon", type=float, default=0.0, help="per-gate Pauli error probability")
    p.add_argument("--sample-seed", type=int, default=0)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="circuit against the dense oracle")
    _graph_source(p)
    _common(p)
    p.add_argument("--t-max", type=int, default=4)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--sample-seed", type=int, default=0)
    p.add_argument("--no-svg", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("scaling", help="basis depth against N or t")
    _graph_source(p)
    _common(p)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--n-values", type=_int_list, default=list(DEFAULT_N_GRID))
    p.add_argument("--t-values", type=_int_list, default=None, help="switch to t-scaling at fixed --n")
    p.add_argument("--seeds", type=int, default=3, help="seeds per point")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_scaling)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    cfg = RunConfig.from_args(args)
    try:
        return args.func(args, cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qwalknet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphParseError, OSError) as exc:
        print(f"qwalknet: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (GraphError, CircuitError, NumericError, QubitCapError, OracleSizeError,
            NormalizationError, ValueError) as exc:
        print(f"qwalknet: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
