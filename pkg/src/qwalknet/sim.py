"""State-vector execution of circuits, shot sampling, and a Pauli-trajectory noise model.

The amplitude array is viewed as a rank-``m`` tensor with axis ``q`` for qubit
``q`` (qubit 0 is the most significant bit of the flat index).  Gates act on
basic-slicing views, so each application is a handful of vectorised numpy
operations without index bookkeeping.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circuit import Circuit, GateOp

__all__ = [
    "DEFAULT_QUBIT_CAP",
    "INVALID",
    "SimResult",
    "NoiseModel",
    "QubitCapError",
    "NumericError",
    "qubit_cap",
    "apply_gate",
    "run_gates",
    "statevector",
    "simulate",
    "sample",
    "simulate_noisy",
    "counts_to_probs",
    "save_counts_csv",
    "save_counts_json",
]

DEFAULT_QUBIT_CAP = 24
INVALID = "invalid"


class QubitCapError(RuntimeError):
    pass


class NumericError(FloatingPointError):
    pass


def qubit_cap() -> int:
    return int(os.environ.get("QWALKNET_QUBIT_CAP", DEFAULT_QUBIT_CAP))


_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _matrix(kind: str, params: tuple[float, ...]) -> np.ndarray:
    if kind == "H":
        return _H
    if kind == "X":
        return _PAULI["X"]
    th = params[0]
    c, s = math.cos(th / 2), math.sin(th / 2)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.array([[complex(c, -s), 0], [0, complex(c, s)]])
    if kind == "PHASE":
        return np.array([[1, 0], [0, np.exp(1j * th)]])
    raise ValueError(kind)


def _apply_1q(state: np.ndarray, u: np.ndarray, target: int, fixed: dict[int, int], offset: int) -> None:
    ndim = state.ndim
    idx0 = [slice(None)] * ndim
    for q, v in fixed.items():
        idx0[q + offset] = v
    idx1 = list(idx0)
    idx0[target + offset] = 0
    idx1[target + offset] = 1
    # trailing Ellipsis keeps fully-indexed slices as 0-d views
    a, b = state[(*idx0, ...)], state[(*idx1, ...)]
    if u[0, 1] == 0 and u[1, 0] == 0:
        if u[0, 0] != 1:
            a *= u[0, 0]
        if u[1, 1] != 1:
            b *= u[1, 1]
        return
    if u[0, 0] == 0 and u[1, 1] == 0 and u[0, 1] == 1 and u[1, 0] == 1:
        tmp = a.copy()
        a[...] = b
        b[...] = tmp
        return
    a0 = a.copy()
    a *= u[0, 0]
    a += u[0, 1] * b
    b *= u[1, 1]
    b += u[1, 0] * a0


def apply_gate(state: np.ndarray, gate: GateOp, offset: int = 0) -> None:
    """Apply ``gate`` in place to a tensor-shaped state.

    ``offset`` is the number of leading batch axes (used for trajectories).
    """
    if gate.kind == "SWAP":
        a, b = gate.qubits
        i01 = [slice(None)] * state.ndim
        i10 = list(i01)
        i01[a + offset], i01[b + offset] = 0, 1
        i10[a + offset], i10[b + offset] = 1, 0
        v01, v10 = state[(*i01, ...)], state[(*i10, ...)]
        tmp = v01.copy()
        v01[...] = v10
        v10[...] = tmp
        return
    if gate.kind == "CX":
        c, t = gate.qubits
        _apply_1q(state, _PAULI["X"], t, {c: 1}, offset)
        return
    _apply_1q(state, _matrix(gate.kind, gate.params), gate.qubits[0], dict(gate.controls), offset)


def run_gates(circuit: Circuit, state: np.ndarray | None = None) -> np.ndarray:
    """Apply every gate (and the global phase) to ``state`` (default ``|0...0>``); returns a flat array."""
    m = circuit.n_qubits
    if m > qubit_cap():
        raise QubitCapError(f"circuit width {m} exceeds simulator cap {qubit_cap()} (QWALKNET_QUBIT_CAP)")
    if state is None:
        psi = np.zeros(1 << m, dtype=complex)
        psi[0] = 1.0
    else:
        psi = np.array(state, dtype=complex).reshape(-1)
        if psi.size != 1 << m:
            raise ValueError(f"state length {psi.size} does not match {m} qubits")
    tensor = psi.reshape((2,) * m)
    for g in circuit.gates:
        apply_gate(tensor, g)
    if circuit.global_phase:
        psi *= np.exp(1j * circuit.global_phase)
    return psi


def statevector(circuit: Circuit) -> np.ndarray:
    return run_gates(circuit)


@dataclass(frozen=True)
class NoiseModel:
    """Depolarising-style trajectory noise: after every gate, with probability
    ``epsilon`` one of its qubits receives a uniformly random Pauli.

    Not calibrated against any device.
    """

    epsilon: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")


@dataclass(frozen=True)
class SimResult:
    final_state: np.ndarray | None
    node_probs: np.ndarray
    register_probs: np.ndarray
    samples: dict | None = None
    shots: int = 0
    noise: NoiseModel | None = None

    @property
    def invalid_prob(self) -> float:
        return float(self.register_probs[self.node_probs.size:].sum())


def _register_marginal(psi: np.ndarray, circuit: Circuit) -> np.ndarray:
    r = circuit.register_size
    return (np.abs(psi.reshape(1 << r, -1)) ** 2).sum(axis=1)


def _n_nodes(circuit: Circuit) -> int:
    return circuit.n_nodes if circuit.n_nodes is not None else 1 << circuit.register_size


def simulate(circuit: Circuit) -> SimResult:
    """Exact noiseless run; ``node_probs`` marginalises register y."""
    psi = run_gates(circuit)
    if not np.isfinite(psi).all():
        raise NumericError("non-finite amplitude in final state")
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1.0) > 1e-10:
        raise NumericError(f"final state norm^2 {norm!r} drifted from 1")
    reg = _register_marginal(psi, circuit)
    return SimResult(psi, reg[: _n_nodes(circuit)], reg)


def _counts_from_draws(hist: np.ndarray, n_nodes: int) -> dict:
    counts = {i: int(hist[i]) for i in range(n_nodes)}
    counts[INVALID] = int(hist[n_nodes:].sum())
    return counts


def sample(result: SimResult, shots: int, seed: int = 0) -> dict:
    """Multinomial draw over the position register: ``{node: count, ..., "invalid": count}``."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    p = np.clip(result.register_probs, 0.0, None)
    hist = rng.multinomial(shots, p / p.sum())
    return _counts_from_draws(hist, result.node_probs.size)


def simulate_noisy(circuit: Circuit, noise: NoiseModel, shots: int, seed: int = 0,
                   batch: int = 256) -> dict:
    """Monte-Carlo trajectories under ``noise``; one position-register readout per trajectory.

    Error locations are drawn up front.  Trajectories are ordered by their
    first error, so up to that gate they share one noiseless state and only
    the diverged prefix of the batch is propagated.

    With ``epsilon == 0`` this is exactly ``sample(simulate(circuit), shots, seed)``.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if not circuit.is_basis:
        raise ValueError("noisy simulation expects a basis circuit (see decompose_to_basis)")
    if noise.epsilon == 0.0:
        return sample(simulate(circuit), shots, seed)
    m = circuit.n_qubits
    if m > qubit_cap():
        raise QubitCapError(f"circuit width {m} exceeds simulator cap {qubit_cap()}")
    rng = np.random.default_rng(seed)
    r = circuit.register_size
    n_gates = len(circuit.gates)
    hist = np.zeros(1 << r, dtype=np.int64)
    paulis = [_PAULI[k] for k in "XYZ"]
    done = 0
    while done < shots:
        b = min(batch, shots - done)
        hits = rng.random((n_gates, b)) < noise.epsilon
        first = np.where(hits.any(axis=0), hits.argmax(axis=0), n_gates)
        order = np.argsort(first, kind="stable")
        hits, first = hits[:, order], first[order]
        clean = np.zeros(1 << m, dtype=complex)
        clean[0] = 1.0
        clean_t = clean.reshape((2,) * m)
        states = np.zeros((b, 1 << m), dtype=complex)
        tensor = states.reshape((b,) + (2,) * m)
        active = 0
        for k, g in enumerate(circuit.gates):
            apply_gate(clean_t, g)
            if active:
                apply_gate(tensor[:active], g, offset=1)
            fresh = int(np.searchsorted(first, k, side="right"))
            if fresh > active:
                states[active:fresh] = clean
                active = fresh
            rows = np.flatnonzero(hits[k, :active])
            if rows.size:
                qs = g.all_qubits
                which_q = rng.integers(len(qs), size=rows.size)
                which_p = rng.integers(3, size=rows.size)
                for row, qi, pi in zip(rows, which_q, which_p):
                    _apply_1q(tensor[row], paulis[pi], qs[qi], {}, offset=0)
        probs = np.empty((b, 1 << r))
        probs[:active] = (np.abs(states[:active].reshape(active, 1 << r, 1 << (m - r))) ** 2).sum(axis=2)
        probs[active:] = (np.abs(clean.reshape(1 << r, -1)) ** 2).sum(axis=1)
        probs /= probs.sum(axis=1, keepdims=True)
        u = rng.random(b)
        outcome = (probs.cumsum(axis=1) < u[:, None]).sum(axis=1)
        hist += np.bincount(np.minimum(outcome, (1 << r) - 1), minlength=1 << r)
        done += b
    return _counts_from_draws(hist, _n_nodes(circuit))


def counts_to_probs(counts: dict, n_nodes: int) -> np.ndarray:
    """Empirical node distribution; the invalid bucket is dropped before renormalising."""
    v = np.array([counts.get(i, 0) for i in range(n_nodes)], dtype=float)
    total = v.sum()
    return v / total if total else v


def save_counts_csv(counts: dict, path: str | Path, header: str | None = None) -> None:
    with open(path, "w") as fh:
        if header:
            fh.write(header)
        fh.write("node,count\n")
        for k, v in counts.items():
            fh.write(f"{k},{v}\n")


def save_counts_json(counts: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps({str(k): v for k, v in counts.items()}, indent=1) + "\n")
