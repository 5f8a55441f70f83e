"""Gate-level IR and the dual-register walk compiler.

Register x (position) is qubits ``[0, n)`` and register y (direction) is
qubits ``[n, 2n)``.  Qubit 0 is the most significant bit of register x, so
the computational-basis index of ``|i>|j>`` is ``i * 2**n + j``.

Controls carry a polarity: ``(q, 1)`` fires on ``|1>``, ``(q, 0)`` on ``|0>``.
Builders never insert X-conjugations for 0-controls; lowering does that.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph

__all__ = [
    "GATE_KINDS",
    "BASIS_KINDS",
    "GateOp",
    "Circuit",
    "CircuitError",
    "COIN_GLOBAL_PHASE",
    "register_qubits",
    "build_u1",
    "build_state_prep",
    "build_controlled_u2",
    "build_coin",
    "build_shift",
    "build_walk_circuit",
    "inverse",
    "load_circuit_json",
]

GATE_KINDS = ("RX", "RY", "RZ", "PHASE", "H", "X", "CX", "SWAP")
BASIS_KINDS = frozenset({"RX", "RY", "RZ", "PHASE", "H", "X", "CX"})
_PARAMETRIC = frozenset({"RX", "RY", "RZ", "PHASE"})
_CONTROLLABLE = frozenset({"RX", "RY", "RZ", "PHASE", "X"})

# Each coin block is emitted as U2 (I - 2|0><0|) U2^dagger = -(2|s><s| - I);
# one global phase of pi per coin restores the sign on every valid node block.
COIN_GLOBAL_PHASE = math.pi


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class GateOp:
    """One gate.  ``kind`` is the base operation; non-empty ``controls`` make it
    multi-controlled.  CX is ``qubits=(control, target)``, SWAP is ``(a, b)``.
    """

    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    controls: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind in ("CX", "SWAP") else 1
        if len(self.qubits) != arity:
            raise CircuitError(f"{self.kind} acts on {arity} qubit(s), got {self.qubits}")
        if len(self.params) != (1 if self.kind in _PARAMETRIC else 0):
            raise CircuitError(f"{self.kind} got params {self.params}")
        if not all(math.isfinite(p) for p in self.params):
            raise CircuitError(f"non-finite angle in {self.kind}")
        if self.controls and self.kind not in _CONTROLLABLE:
            raise CircuitError(f"{self.kind} cannot carry extra controls")
        for _, pol in self.controls:
            if pol not in (0, 1):
                raise CircuitError(f"control polarity must be 0 or 1, got {pol}")
        qs = self.all_qubits
        if len(set(qs)) != len(qs):
            raise CircuitError(f"repeated qubit in {self}")

    @property
    def all_qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.controls) + self.qubits

    @property
    def is_controlled(self) -> bool:
        return bool(self.controls)

    def label(self) -> str:
        if not self.controls:
            return self.kind
        return f"MC{len(self.controls)}_{self.kind}"

    def dagger(self) -> GateOp:
        if self.kind in _PARAMETRIC:
            return GateOp(self.kind, self.qubits, (-self.params[0],), self.controls)
        return self

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "qubits": list(self.qubits),
            "params": list(self.params),
            "controls": [list(c) for c in self.controls],
        }

    @classmethod
    def from_dict(cls, d: dict) -> GateOp:
        return cls(
            d["kind"],
            tuple(d["qubits"]),
            tuple(float(p) for p in d.get("params", ())),
            tuple((int(q), int(p)) for q, p in d.get("controls", ())),
        )


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[GateOp, ...]
    global_phase: float = 0.0
    n_nodes: int | None = None
    steps: int | None = None
    graph_hash: str | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q < 0 or q >= self.n_qubits for q in g.all_qubits):
                raise CircuitError(f"{g} touches a qubit outside 0..{self.n_qubits - 1}")

    @property
    def width(self) -> int:
        return self.n_qubits

    @property
    def register_size(self) -> int:
        """Size of the measured position register."""
        return self.n_qubits // 2 if self.n_nodes is not None else self.n_qubits

    @property
    def is_basis(self) -> bool:
        return all(g.kind in BASIS_KINDS and not g.controls for g in self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def to_json(self) -> str:
        body = {
            "n_qubits": self.n_qubits,
            "global_phase": self.global_phase,
            "n_nodes": self.n_nodes,
            "steps": self.steps,
            "graph_hash": self.graph_hash,
            "gates": [g.to_dict() for g in self.gates],
        }
        return json.dumps(body, separators=(",", ":"))

    def to_qasm(self) -> str:
        """OpenQASM 3 text; only valid for circuits already lowered to the basis."""
        if not self.is_basis:
            raise CircuitError("QASM export needs a basis circuit; call decompose_to_basis first")
        lines = ["OPENQASM 3.0;", 'include "stdgates.inc";']
        if self.global_phase:
            lines.append(f"// global phase: {self.global_phase!r}")
        lines.append(f"qubit[{self.n_qubits}] q;")
        for g in self.gates:
            args = ", ".join(f"q[{q}]" for q in g.qubits)
            name = "p" if g.kind == "PHASE" else g.kind.lower()
            if g.params:
                lines.append(f"{name}({g.params[0]!r}) {args};")
            else:
                lines.append(f"{name} {args};")
        return "\n".join(lines) + "\n"


def load_circuit_json(path: str | Path) -> Circuit:
    d = json.loads(Path(path).read_text())
    return Circuit(
        d["n_qubits"],
        tuple(GateOp.from_dict(g) for g in d["gates"]),
        float(d.get("global_phase", 0.0)),
        d.get("n_nodes"),
        d.get("steps"),
        d.get("graph_hash"),
    )


def register_qubits(n: int) -> tuple[list[int], list[int]]:
    return list(range(n)), list(range(n, 2 * n))


def _pattern(qubits: Sequence[int], value: int) -> tuple[tuple[int, int], ...]:
    """Controls matching ``value`` on ``qubits`` (first qubit = MSB)."""
    n = len(qubits)
    return tuple((q, (value >> (n - 1 - k)) & 1) for k, q in enumerate(qubits))


def inverse(gates: Iterable[GateOp]) -> list[GateOp]:
    return [g.dagger() for g in reversed(list(gates))]


def build_state_prep(
    distribution: Sequence[float],
    qubits: Sequence[int] | None = None,
    controls: Sequence[tuple[int, int]] = (),
    atol: float = 1e-12,
) -> list[GateOp]:
    """Load ``sqrt(p)`` into ``qubits`` with a binary tree of multiplexed RY.

    Level l rotates ``qubits[l]`` once per l-bit prefix, controlled on that
    prefix (full polarity) plus ``controls``.  Rotations that are the identity
    (empty subtree, or all mass in the |0> branch) are left out.
    """
    p = np.asarray(distribution, dtype=float)
    n = int(round(math.log2(p.size))) if p.size else -1
    if n < 1 or p.size != 1 << n:
        raise CircuitError(f"distribution length must be a power of two >= 2, got {p.size}")
    if (p < 0).any() or abs(p.sum() - 1.0) > atol:
        raise CircuitError(f"distribution must be non-negative and sum to 1 (sum={p.sum()!r})")
    qubits = list(range(n)) if qubits is None else list(qubits)
    if len(qubits) != n:
        raise CircuitError(f"{p.size}-entry distribution needs {n} qubits, got {len(qubits)}")
    controls = tuple(controls)
    gates = []
    for level in range(n):
        # masses of the 2^(level+1) subtrees one level down
        sub = p.reshape(1 << (level + 1), -1).sum(axis=1)
        for prefix in range(1 << level):
            left, right = sub[2 * prefix], sub[2 * prefix + 1]
            if left + right <= 0.0 or right <= 0.0:
                continue
            theta = 2.0 * math.atan2(math.sqrt(right), math.sqrt(left))
            ctrl = controls + _pattern(qubits[:level], prefix)
            gates.append(GateOp("RY", (qubits[level],), (theta,), ctrl))
    return gates


def build_u1(n_nodes: int) -> list[GateOp]:
    """Uniform superposition over ``|0>..|N-1>`` on register x."""
    if n_nodes < 2:
        raise CircuitError("N must be >= 2")
    n = max(1, math.ceil(math.log2(n_nodes)))
    if n_nodes == 1 << n:
        return [GateOp("H", (q,)) for q in range(n)]
    dist = np.zeros(1 << n)
    dist[:n_nodes] = 1.0 / n_nodes
    return build_state_prep(dist, range(n))


def _neighbor_distribution(g: Graph, i: int) -> np.ndarray:
    dist = np.zeros(1 << g.n_qubits)
    nbrs = list(g.adjacency[i])
    dist[nbrs] = 1.0 / len(nbrs)
    return dist


def _u2(g: Graph, i: int) -> list[GateOp]:
    """U2(i) on register y, controlled on register x == i."""
    x, y = register_qubits(g.n_qubits)
    return build_state_prep(_neighbor_distribution(g, i), y, _pattern(x, i))


def _by_level(gates: list[GateOp], n: int) -> list[list[GateOp]]:
    levels: list[list[GateOp]] = [[] for _ in range(n)]
    for gate in gates:
        levels[gate.qubits[0] - n].append(gate)
    return levels


def build_controlled_u2(g: Graph, interleave: bool = True) -> list[GateOp]:
    """Every node's U2 network, each gate also controlled on x == node.

    Blocks for different nodes act on orthogonal x-subspaces and commute, so
    with ``interleave`` the same gates are emitted level by level across all
    nodes (tree level 0 of every node, then level 1, ...).  Lowering relies on
    that order to fuse each level into one uniformly controlled rotation.
    """
    per_node = [_u2(g, i) for i in range(g.n_nodes)]
    if not interleave:
        return [gate for block in per_node for gate in block]
    n = g.n_qubits
    columns = [_by_level(block, n) for block in per_node]
    return [gate for level in range(n) for node in columns for gate in node[level]]


def _zero_reflection(n: int, node: int) -> list[GateOp]:
    """``I - 2|0><0|`` on register y, controlled on register x == node."""
    x, y = register_qubits(n)
    target = y[-1]
    ctrl = _pattern(x, node) + tuple((q, 0) for q in y[:-1])
    return [
        GateOp("X", (target,)),
        GateOp("PHASE", (target,), (math.pi,), ctrl),
        GateOp("X", (target,)),
    ]


def _aligned_blocks(lo: int, hi: int, n: int) -> list[tuple[int, int]]:
    """Cover ``[lo, hi)`` with aligned power-of-two blocks as (prefix, prefix_len)."""
    out = []
    while lo < hi:
        size = lo & -lo if lo else 1 << n
        while size > hi - lo:
            size >>= 1
        width = size.bit_length() - 1
        out.append((lo >> width, n - width))
        lo += size
    return out


def _all_nodes_reflection(n: int, n_nodes: int) -> list[GateOp]:
    """Product over nodes i < N of the controlled ``I - 2|0><0|`` blocks.

    That product flips the sign of ``|i>|0>`` for every real node: one phase
    flip on ``y == 0`` for all x, undone on the padded range ``x >= N``.
    """
    x, y = register_qubits(n)
    target = y[-1]
    y_zero = tuple((q, 0) for q in y[:-1])
    gates = [GateOp("X", (target,))]
    if y_zero:
        gates.append(GateOp("PHASE", (target,), (math.pi,), y_zero))
    else:
        gates.append(GateOp("PHASE", (target,), (math.pi,)))
    for prefix, length in _aligned_blocks(n_nodes, 1 << n, n):
        gates.append(GateOp("PHASE", (target,), (math.pi,), _pattern(x[:length], prefix) + y_zero))
    gates.append(GateOp("X", (target,)))
    return gates


def build_coin(g: Graph, interleave: bool = True) -> list[GateOp]:
    """Per-node Grover diffusers ``U2(i) (I - 2|0><0|) U2(i)^dagger`` controlled on x == i.

    Exact only together with COIN_GLOBAL_PHASE.  With ``interleave`` the
    commuting node blocks are reordered: all U2^dagger levels, one combined
    reflection, all U2 levels.
    """
    if not interleave:
        gates = []
        for i in range(g.n_nodes):
            u2 = _u2(g, i)
            gates.extend(inverse(u2))
            gates.extend(_zero_reflection(g.n_qubits, i))
            gates.extend(u2)
        return gates
    u2 = build_controlled_u2(g, interleave=True)
    return inverse(u2) + _all_nodes_reflection(g.n_qubits, g.n_nodes) + u2


def build_shift(n: int) -> list[GateOp]:
    if n < 1:
        raise CircuitError("register size must be >= 1")
    return [GateOp("SWAP", (q, q + n)) for q in range(n)]


def build_walk_circuit(g: Graph, t: int, interleave: bool = True) -> Circuit:
    """U1, controlled-U2, then ``t`` repetitions of (coin, shift)."""
    if t < 0:
        raise CircuitError("t must be >= 0")
    n = g.n_qubits
    gates = build_u1(g.n_nodes) + build_controlled_u2(g, interleave)
    step = build_coin(g, interleave) + build_shift(n)
    for _ in range(t):
        gates.extend(step)
    phase = math.remainder(t * COIN_GLOBAL_PHASE, 2 * math.pi)
    return Circuit(2 * n, tuple(gates), phase, g.n_nodes, t, g.digest())
