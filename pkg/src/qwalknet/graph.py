"""Complex-network generators (ER, WS, BA) and the edge-list/JSON file formats.

All generators are pure functions of their parameters and a seed.  Randomness
comes from ``numpy.random.default_rng`` (PCG64); any pinned regression value in
the test-suite was produced with that generator and must be regenerated if the
bit generator ever changes.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "Graph",
    "GraphParams",
    "GraphError",
    "GenerationError",
    "GraphParseError",
    "generate",
    "generate_er",
    "generate_ws",
    "generate_ba",
    "cycle_graph",
    "complete_graph",
    "path_graph",
    "load_graph",
    "save_graph",
]

MAX_RETRIES = 100


class GraphError(ValueError):
    """Invalid graph or invalid generation parameters."""


class GenerationError(GraphError):
    """A random model could not produce a graph without isolated nodes."""


class GraphParseError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0..n_nodes-1`` with no isolated nodes.

    ``edges`` holds each edge once as ``(i, j)`` with ``i < j``, sorted.
    """

    n_nodes: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.n_nodes
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise GraphError(f"n_nodes must be a positive integer, got {n!r}")
        seen: set[tuple[int, int]] = set()
        for a, b in self.edges:
            if a == b:
                raise GraphError(f"self-loop on node {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise GraphError(f"edge ({a}, {b}) has a label outside 0..{n - 1}")
            e = (min(a, b), max(a, b))
            if e in seen:
                raise GraphError(f"duplicate edge {e}")
            seen.add(e)
        edges = tuple(sorted(seen))
        nbrs: list[list[int]] = [[] for _ in range(n)]
        for a, b in edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        isolated = [i for i in range(n) if not nbrs[i]]
        if isolated:
            raise GraphError(f"isolated nodes {isolated[:10]}: the walk needs degree >= 1 everywhere")
        object.__setattr__(self, "n_nodes", int(n))
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in edges))
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(x)) for x in nbrs))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self._edge_set

    @property
    def _edge_set(self) -> frozenset[tuple[int, int]]:
        cached = self.__dict__.get("_edge_set_cache")
        if cached is None:
            cached = frozenset(self.edges)
            object.__setattr__(self, "_edge_set_cache", cached)
        return cached

    @property
    def n_qubits(self) -> int:
        """Qubits per register, ceil(log2 N) (at least 1)."""
        return max(1, math.ceil(math.log2(self.n_nodes)))

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n_nodes, self.n_nodes), dtype=np.int8)
        for i, j in self.edges:
            a[i, j] = a[j, i] = 1
        return a

    def is_regular(self) -> bool:
        return len(set(self.degrees)) == 1

    def to_edgelist(self) -> str:
        lines = [f"N {self.n_nodes}"]
        lines.extend(f"{i} {j}" for i, j in self.edges)
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"n": self.n_nodes, "edges": [list(e) for e in self.edges]})

    def digest(self) -> str:
        """Short content hash, used to tag circuits built from this graph."""
        return hashlib.sha256(self.to_edgelist().encode()).hexdigest()[:16]


@dataclass(frozen=True)
class GraphParams:
    model: str
    n: int
    seed: int = 0
    p: float | None = None
    k: int | None = None
    beta: float | None = None
    m: int | None = None

    def __post_init__(self):
        model = self.model.upper()
        object.__setattr__(self, "model", model)
        required = {"ER": ("p",), "WS": ("k", "beta"), "BA": ("m",)}
        if model not in required:
            raise GraphError(f"unknown model {self.model!r}; expected ER, WS or BA")
        for name in ("p", "k", "beta", "m"):
            present = getattr(self, name) is not None
            if name in required[model] and not present:
                raise GraphError(f"{model} requires parameter {name!r}")
            if name not in required[model] and present:
                raise GraphError(f"{model} does not take parameter {name!r}")
        if not 0 <= self.seed < 2**64:
            raise GraphError("seed must be a 64-bit unsigned integer")

    def with_n(self, n: int, seed: int | None = None) -> GraphParams:
        return GraphParams(self.model, n, self.seed if seed is None else seed,
                           self.p, self.k, self.beta, self.m)

    def label(self) -> str:
        parts = [f"{k}={getattr(self, k)}" for k in ("p", "k", "beta", "m") if getattr(self, k) is not None]
        return f"{self.model}({', '.join(parts)})"


def generate(params: GraphParams) -> Graph:
    if params.model == "ER":
        return generate_er(params.n, params.p, params.seed)
    if params.model == "WS":
        return generate_ws(params.n, params.k, params.beta, params.seed)
    return generate_ba(params.n, params.m, params.seed)


def generate_er(n: int, p: float, seed: int = 0) -> Graph:
    """G(n, p); regenerates with sub-seeds ``(seed, 1), (seed, 2), ...`` while any node is isolated."""
    if n < 2:
        raise GraphError("ER needs n >= 2")
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"p must lie in [0, 1], got {p}")
    iu, ju = np.triu_indices(n, k=1)
    for attempt in range(MAX_RETRIES):
        rng = np.random.default_rng([seed, attempt])
        keep = rng.random(iu.size) < p
        deg = np.bincount(np.concatenate([iu[keep], ju[keep]]), minlength=n)
        if deg.min() > 0:
            return Graph(n, tuple(zip(iu[keep].tolist(), ju[keep].tolist())))
    raise GenerationError(
        f"ER(n={n}, p={p}) produced isolated nodes in {MAX_RETRIES} attempts from seed {seed}")


def generate_ws(n: int, k: int, beta: float, seed: int = 0) -> Graph:
    """Watts-Strogatz small world.

    Ring lattice (node i linked to i+1..i+k/2), then edges are scanned by
    offset and then by node; each is rewired with probability ``beta`` by
    moving its far endpoint to a uniformly drawn legal node.
    """
    if k % 2 or not 2 <= k < n:
        raise GraphError(f"WS needs even k with 2 <= k < n, got k={k}, n={n}")
    if not 0.0 <= beta <= 1.0:
        raise GraphError(f"beta must lie in [0, 1], got {beta}")
    rng = np.random.default_rng(seed)
    nbrs = [set() for _ in range(n)]
    for i in range(n):
        for d in range(1, k // 2 + 1):
            j = (i + d) % n
            nbrs[i].add(j)
            nbrs[j].add(i)
    for d in range(1, k // 2 + 1):
        for i in range(n):
            j = (i + d) % n
            if rng.random() >= beta or j not in nbrs[i]:
                continue
            legal = [w for w in range(n) if w != i and w not in nbrs[i]]
            if not legal:
                continue
            w = legal[int(rng.integers(len(legal)))]
            nbrs[i].discard(j)
            nbrs[j].discard(i)
            nbrs[i].add(w)
            nbrs[w].add(i)
    edges = [(i, j) for i in range(n) for j in nbrs[i] if i < j]
    return Graph(n, tuple(edges))


def generate_ba(n: int, m: int, seed: int = 0) -> Graph:
    """Barabasi-Albert growth from a star on nodes 0..m (centre 0).

    Each new node picks ``m`` distinct targets with probability proportional to
    current degree, redrawing on duplicates.
    """
    if not 1 <= m < n:
        raise GraphError(f"BA needs 1 <= m < n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    edges = [(0, j) for j in range(1, m + 1)]
    # one entry per edge endpoint, so a uniform draw is degree-proportional
    stubs = [0] * m + list(range(1, m + 1))
    for v in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(stubs[int(rng.integers(len(stubs)))])
        for u in sorted(targets):
            edges.append((u, v))
            stubs.extend((u, v))
    return Graph(n, tuple(edges))


def cycle_graph(n: int) -> Graph:
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)) if n > 2 else ((0, 1),))


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def _parse_edgelist(text: str) -> Graph:
    n = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "N":
                raise GraphParseError("expected header 'N <n_nodes>'", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise GraphParseError(f"bad node count {parts[1]!r}", lineno) from None
            if n < 1:
                raise GraphParseError("node count must be positive", lineno)
            continue
        if len(parts) != 2:
            raise GraphParseError(f"expected '<i> <j>', got {line!r}", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"non-integer node label in {line!r}", lineno) from None
        if i == j:
            raise GraphParseError(f"self-loop on node {i}", lineno)
        if not (0 <= i < n and 0 <= j < n):
            raise GraphParseError(f"node label out of range 0..{n - 1}", lineno)
        e = (min(i, j), max(i, j))
        if e in seen:
            raise GraphParseError(f"duplicate edge {e}", lineno)
        seen.add(e)
        edges.append(e)
    if n is None:
        raise GraphParseError("empty file: missing 'N <n_nodes>' header")
    return Graph(n, tuple(edges))


def _parse_json(text: str) -> Graph:
    try:
        obj = json.loads(text)
        n = int(obj["n"])
        edges = [tuple(int(v) for v in e) for e in obj["edges"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise GraphParseError(f"malformed graph JSON: {exc}") from None
    if any(len(e) != 2 for e in edges):
        raise GraphParseError("every edge must be a pair")
    return Graph(n, tuple(edges))


def load_graph(path: str | Path) -> Graph:
    """Read a graph from the edge-list format, or JSON when the file ends in ``.json``."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        return _parse_json(text)
    return _parse_edgelist(text)


def save_graph(g: Graph, path: str | Path) -> None:
    path = Path(path)
    path.write_text(g.to_json() + "\n" if path.suffix == ".json" else g.to_edgelist())
