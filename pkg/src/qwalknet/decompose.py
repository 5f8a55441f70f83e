"""Ancilla-free lowering to {RX, RY, RZ, PHASE, H, X, CX} and resource accounting.

Scheme (all identities are exact, no global phase is introduced):

* 0-polarity controls are conjugated with X.
* ``C^k RY(a)`` / ``C^k RZ(a)``: split off the last control ``c``; then
  ``C^{k-1}X . CR(-a/2)_c . C^{k-1}X . CR(a/2)_c`` where ``C^{k-1}X`` targets
  the rotation qubit.  Because ``c`` is idle during ``C^{k-1}X`` it can serve
  as a borrowed (dirty) ancilla.
* ``C^m X`` with enough idle qubits: the 4(m-2)-Toffoli ladder on borrowed
  ancillas; with only one idle qubit: split the controls in two halves and
  use that qubit as the junction; with none: ``H . C^m PHASE(pi) . H``.
* ``C^k PHASE(a) = C^{k-1}PHASE(a/2)`` on the last control, then ``C^k RZ(a)``.
* Toffoli: the standard 6-CX, 7-T network; SWAP: three CX.

Lowered sequences are cached per gate *shape* with every angle stored as
``coef * theta + const``.  Circuit depth is accumulated through a per-shape
max-plus transfer matrix so large circuits never need to be materialised.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .circuit import Circuit, GateOp

__all__ = [
    "Template",
    "Multiplexor",
    "ResourceReport",
    "lower_gate",
    "decompose_to_basis",
    "iter_basis_gates",
    "template_for",
    "resource_report",
    "logical_depth",
]

_PI4 = math.pi / 4
# (kind, qubits, coef, const): angle = coef * theta + const
_Raw = tuple


def _g(kind, *qubits, coef=0.0, const=0.0) -> _Raw:
    return (kind, tuple(qubits), coef, const)


def _toffoli(c1: int, c2: int, t: int) -> list[_Raw]:
    T = lambda q: _g("PHASE", q, const=_PI4)
    Td = lambda q: _g("PHASE", q, const=-_PI4)
    return [
        _g("H", t), _g("CX", c2, t), Td(t), _g("CX", c1, t), T(t), _g("CX", c2, t),
        Td(t), _g("CX", c1, t), T(c2), T(t), _g("H", t), _g("CX", c1, c2), T(c1),
        Td(c2), _g("CX", c1, c2),
    ]


def _mcx_ladder(ctrl: list[int], t: int, anc: list[int]) -> list[_Raw]:
    """C^m X with m >= 3 on m-2 borrowed ancillas (state of ancillas restored)."""
    m = len(ctrl)
    a = anc[: m - 2]

    def tof(j):
        tgt = t if j == m - 1 else a[j - 1]
        return _toffoli(ctrl[j], a[j - 2], tgt)

    base = _toffoli(ctrl[0], ctrl[1], a[0])
    out: list[_Raw] = []
    for j in range(m - 1, 1, -1):
        out += tof(j)
    out += base
    for j in range(2, m):
        out += tof(j)
    for j in range(m - 2, 1, -1):
        out += tof(j)
    out += base
    for j in range(2, m - 1):
        out += tof(j)
    return out


def _mcx(ctrl: list[int], t: int, free: list[int]) -> list[_Raw]:
    m = len(ctrl)
    if m == 0:
        return [_g("X", t)]
    if m == 1:
        return [_g("CX", ctrl[0], t)]
    if m == 2:
        return _toffoli(ctrl[0], ctrl[1], t)
    if len(free) >= m - 2:
        return _mcx_ladder(ctrl, t, free)
    if free:
        a, rest = free[0], free[1:]
        m1 = (m + 1) // 2
        c1, c2 = ctrl[:m1], ctrl[m1:]
        first = _mcx(c2 + [a], t, c1 + rest)
        second = _mcx(c1, a, c2 + [t] + rest)
        return first + second + first + second
    return [_g("H", t)] + _mc_phase(ctrl, t, [], 0.0, math.pi) + [_g("H", t)]


def _controlled_rot(kind: str, c: int, t: int, coef: float, const: float) -> list[_Raw]:
    half = (coef / 2, const / 2)
    neg = (-coef / 2, -const / 2)
    return [
        _g(kind, t, coef=half[0], const=half[1]),
        _g("CX", c, t),
        _g(kind, t, coef=neg[0], const=neg[1]),
        _g("CX", c, t),
    ]


def _mc_rot(kind: str, ctrl: list[int], t: int, free: list[int], coef: float, const: float) -> list[_Raw]:
    """C^k RY / C^k RZ (both are conjugated to their inverse by X on the target)."""
    k = len(ctrl)
    if k == 0:
        return [_g(kind, t, coef=coef, const=const)]
    if k == 1:
        return _controlled_rot(kind, ctrl[0], t, coef, const)
    c, rest = ctrl[-1], ctrl[:-1]
    flip = _mcx(rest, t, [c] + free)
    return (flip + _controlled_rot(kind, c, t, -coef / 2, -const / 2)
            + flip + _controlled_rot(kind, c, t, coef / 2, const / 2))


def _mc_phase(ctrl: list[int], t: int, free: list[int], coef: float, const: float) -> list[_Raw]:
    k = len(ctrl)
    if k == 0:
        return [_g("PHASE", t, coef=coef, const=const)]
    if math.isclose(const, math.pi) and coef == 0.0 and free:
        return [_g("H", t)] + _mcx(ctrl, t, free) + [_g("H", t)]
    c, rest = ctrl[-1], ctrl[:-1]
    return (_mc_phase(rest, c, [t] + free, coef / 2, const / 2)
            + _mc_rot("RZ", ctrl, t, free, coef, const))


def _lower_raw(kind: str, qubits: tuple[int, ...], controls: tuple[tuple[int, int], ...],
               n_qubits: int) -> list[_Raw]:
    if kind == "SWAP":
        a, b = qubits
        return [_g("CX", a, b), _g("CX", b, a), _g("CX", a, b)]
    if not controls:
        if kind in ("RX", "RY", "RZ", "PHASE"):
            return [_g(kind, *qubits, coef=1.0)]
        return [_g(kind, *qubits)]
    t = qubits[0]
    ctrl = [q for q, _ in controls]
    used = set(ctrl) | {t}
    free = [q for q in range(n_qubits) if q not in used]
    flips = [_g("X", q) for q, pol in controls if pol == 0]
    if kind == "X":
        body = _mcx(ctrl, t, free)
    elif kind in ("RY", "RZ"):
        body = _mc_rot(kind, ctrl, t, free, 1.0, 0.0)
    elif kind == "RX":
        body = [_g("H", t)] + _mc_rot("RZ", ctrl, t, free, 1.0, 0.0) + [_g("H", t)]
    elif kind == "PHASE":
        body = _mc_phase(ctrl, t, free, 1.0, 0.0)
    elif kind == "Z":
        body = _mc_phase(ctrl, t, free, 0.0, math.pi)
    else:  # pragma: no cover - GateOp validation forbids it
        raise ValueError(kind)
    return flips + body + flips


@dataclass(frozen=True)
class Template:
    """Lowered form of one gate shape.

    ``transfer[a, b]`` is the length of the longest dependency chain that enters
    the template on ``qubits[a]`` and leaves on ``qubits[b]`` (``-inf`` if none).
    """

    ops: tuple[_Raw, ...]
    qubits: tuple[int, ...]
    transfer: np.ndarray = field(repr=False)
    counts: Counter = field(repr=False)

    @property
    def cx_count(self) -> int:
        return self.counts.get("CX", 0)

    def instantiate(self, theta: float) -> list[GateOp]:
        out = []
        for kind, qs, coef, const in self.ops:
            if kind in _ROTATIONS:
                out.append(GateOp(kind, qs, (coef * theta + const,)))
            else:
                out.append(GateOp(kind, qs))
        return out


_ROTATIONS = frozenset({"RX", "RY", "RZ", "PHASE"})


def _transfer(ops, qubits) -> np.ndarray:
    pos = {q: i for i, q in enumerate(qubits)}
    w = len(qubits)
    # row = entry qubit; column = longest chain ending at the latest gate on that qubit
    last = np.full((w, w), -np.inf)
    np.fill_diagonal(last, 0.0)
    for op in ops:
        cols = [pos[q] for q in op[1]]
        chain = last[:, cols].max(axis=1) + 1.0
        for c in cols:
            last[:, c] = chain
    return last


def _build_template(ops: list[_Raw]) -> Template:
    qubits = tuple(sorted({q for _, qs, _, _ in ops for q in qs}))
    return Template(tuple(ops), qubits, _transfer(ops, qubits), Counter(op[0] for op in ops))


@lru_cache(maxsize=4096)
def _body_template(kind: str, target: int, ctrl: tuple[int, ...], n_qubits: int) -> Template:
    controls = tuple((q, 1) for q in ctrl)
    return _build_template(_lower_raw(kind, (target,), controls, n_qubits))


def _maxplus(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a[:, :, None] + b[None, :, :]).max(axis=1)


@lru_cache(maxsize=16384)
def _template_cached(kind: str, qubits: tuple[int, ...], controls: tuple[tuple[int, int], ...],
                     n_qubits: int) -> Template:
    if not controls:
        return _build_template(_lower_raw(kind, qubits, controls, n_qubits))
    body = _body_template(kind, qubits[0], tuple(q for q, _ in controls), n_qubits)
    zeros = [q for q, pol in controls if pol == 0]
    if not zeros:
        return body
    flips = tuple(_g("X", q) for q in zeros)
    flip_layer = np.full((len(body.qubits),) * 2, -np.inf)
    for i, q in enumerate(body.qubits):
        flip_layer[i, i] = 1.0 if q in zeros else 0.0
    transfer = _maxplus(_maxplus(flip_layer, body.transfer), flip_layer)
    counts = body.counts.copy()
    counts["X"] += 2 * len(zeros)
    return Template(flips + body.ops + flips, body.qubits, transfer, counts)


def template_for(gate: GateOp, n_qubits: int) -> Template:
    kind = gate.kind
    if kind == "PHASE" and gate.controls and gate.params[0] == math.pi:
        kind = "Z"  # fixed angle: allows the cheaper H.MCX.H route when a qubit is idle
    return _template_cached(kind, gate.qubits, gate.controls, n_qubits)


@dataclass(frozen=True)
class Multiplexor:
    """Uniformly controlled RY/RZ: one rotation angle per control pattern.

    Lowered with the Gray-code network of 2**k rotations and 2**k CX; the
    pattern integer reads ``ctrl[0]`` as its most significant bit.
    """

    kind: str
    target: int
    ctrl: tuple[int, ...]
    ops: tuple[tuple, ...]
    qubits: tuple[int, ...]
    transfer: np.ndarray = field(repr=False)
    counts: Counter = field(repr=False)

    @property
    def cx_count(self) -> int:
        return self.counts.get("CX", 0)

    def angles(self, alphas: np.ndarray) -> np.ndarray:
        k = len(self.ctrl)
        return _gray_transform(k) @ np.asarray(alphas, dtype=float) / (1 << k)

    def instantiate(self, alphas: np.ndarray) -> list[GateOp]:
        theta = self.angles(alphas)
        out = []
        for kind, qs, slot in self.ops:
            if slot is None:
                out.append(GateOp(kind, qs))
            else:
                out.append(GateOp(kind, qs, (float(theta[slot]),)))
        return out


@lru_cache(maxsize=32)
def _gray_transform(k: int) -> np.ndarray:
    j = np.arange(1 << k)
    gray = j ^ (j >> 1)
    v = gray[:, None] & np.arange(1 << k)[None, :]
    for shift in (16, 8, 4, 2, 1):
        v ^= v >> shift
    return 1.0 - 2.0 * (v & 1)


@lru_cache(maxsize=256)
def _multiplexor(kind: str, target: int, ctrl: tuple[int, ...]) -> Multiplexor:
    k = len(ctrl)
    size = 1 << k
    ops = []
    for j in range(size):
        ops.append((kind, (target,), j))
        flipped = (j + 1) & -(j + 1) if j + 1 < size else size >> 1
        bit = flipped.bit_length() - 1
        ops.append(("CX", (ctrl[k - 1 - bit], target), None))
    qubits = tuple(sorted(ctrl + (target,)))
    return Multiplexor(kind, target, ctrl, tuple(ops), qubits, _transfer(ops, qubits),
                       Counter(op[0] for op in ops))


def _fusion_key(g: GateOp):
    if g.kind in ("RY", "RZ") and g.controls:
        return g.kind, g.qubits[0], tuple(sorted(q for q, _ in g.controls))
    return None


def _pattern_index(g: GateOp, ctrl: tuple[int, ...]) -> int:
    pol = dict(g.controls)
    value = 0
    for q in ctrl:
        value = (value << 1) | pol[q]
    return value


def _plan(circuit: Circuit, fuse: bool = True):
    """Yield ``(template, argument)`` lowering units in circuit order.

    Consecutive multi-controlled RY (or RZ) gates on one target with the same
    control qubits and distinct control patterns commute; such a run becomes a
    single multiplexor when that needs fewer CX than lowering each gate.
    """
    gates = circuit.gates
    m = circuit.n_qubits
    i = 0
    while i < len(gates):
        g = gates[i]
        key = _fusion_key(g) if fuse else None
        if key is None:
            yield template_for(g, m), (g.params[0] if g.params else 0.0)
            i += 1
            continue
        kind, target, ctrl = key
        seen = set()
        j = i
        while j < len(gates) and _fusion_key(gates[j]) == key:
            p = _pattern_index(gates[j], ctrl)
            if p in seen:
                break
            seen.add(p)
            j += 1
        run = gates[i:j]
        mux = _multiplexor(kind, target, ctrl) if len(run) > 1 else None
        body_cx = _body_template(kind, target, ctrl, m).cx_count
        if mux is not None and mux.cx_count < body_cx * len(run):
            alphas = np.zeros(1 << len(ctrl))
            for r in run:
                alphas[_pattern_index(r, ctrl)] = r.params[0]
            yield mux, alphas
        else:
            for r in run:
                yield template_for(r, m), r.params[0]
        i = j


def lower_gate(gate: GateOp, n_qubits: int) -> list[GateOp]:
    """Basis-gate sequence equal (exactly, including phase) to ``gate``."""
    theta = gate.params[0] if gate.params else 0.0
    return template_for(gate, n_qubits).instantiate(theta)


def iter_basis_gates(circuit: Circuit, fuse: bool = True):
    for tpl, arg in _plan(circuit, fuse):
        yield from tpl.instantiate(arg)


def decompose_to_basis(circuit: Circuit, fuse: bool = True) -> Circuit:
    """Lower to {RX, RY, RZ, PHASE, H, X, CX}; the global phase is carried over unchanged."""
    return Circuit(circuit.n_qubits, tuple(iter_basis_gates(circuit, fuse)), circuit.global_phase,
                   circuit.n_nodes, circuit.steps, circuit.graph_hash)


@dataclass(frozen=True)
class ResourceReport:
    width: int
    depth_logical: int
    depth_basis: int
    counts: dict
    basis_counts: dict
    cx_count: int
    n_gates: int
    n_basis_gates: int

    def as_dict(self) -> dict:
        return {
            "width": self.width,
            "depth_logical": self.depth_logical,
            "depth_basis": self.depth_basis,
            "cx_count": self.cx_count,
            "n_gates": self.n_gates,
            "n_basis_gates": self.n_basis_gates,
            "counts": dict(sorted(self.counts.items())),
            "basis_counts": dict(sorted(self.basis_counts.items())),
        }


def logical_depth(circuit: Circuit) -> int:
    level = [0] * circuit.n_qubits
    for g in circuit.gates:
        qs = g.all_qubits
        d = max(level[q] for q in qs) + 1
        for q in qs:
            level[q] = d
    return max(level, default=0)


def resource_report(circuit: Circuit, fuse: bool = True) -> ResourceReport:
    """Width, gate counts and DAG depth before and after lowering.

    Two gates depend on each other iff they share a qubit (controls included).
    The basis figures describe exactly what ``decompose_to_basis`` emits.
    """
    level = np.zeros(circuit.n_qubits)
    basis_counts: Counter = Counter()
    n_basis = 0
    for tpl, _ in _plan(circuit, fuse):
        idx = list(tpl.qubits)
        level[idx] = (level[idx][:, None] + tpl.transfer).max(axis=0)
        basis_counts.update(tpl.counts)
        n_basis += len(tpl.ops)
    counts = Counter(g.label() for g in circuit.gates)
    return ResourceReport(
        width=circuit.n_qubits,
        depth_logical=logical_depth(circuit),
        depth_basis=int(level.max(initial=0)),
        counts=dict(counts),
        basis_counts=dict(basis_counts),
        cx_count=basis_counts.get("CX", 0),
        n_gates=len(circuit.gates),
        n_basis_gates=n_basis,
    )
