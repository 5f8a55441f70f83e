"""Dense-operator model of the coined walk, used as ground truth for the circuits.

Everything lives in the padded two-register space of dimension ``2**(2n)``
with ``n = ceil(log2 N)``; basis index ``i * 2**n + j`` stands for
"walker at node i pointing towards node j".
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .graph import Graph

__all__ = [
    "MAX_ORACLE_NODES",
    "OracleSizeError",
    "NormalizationError",
    "WalkOperators",
    "initial_state",
    "build_coin",
    "build_shift",
    "walk_operators",
    "evolve",
    "node_probabilities",
    "save_state_csv",
]

MAX_ORACLE_NODES = 64


class OracleSizeError(ValueError):
    pass


class NormalizationError(ValueError):
    pass


def _check_size(g: Graph) -> None:
    if g.n_nodes > MAX_ORACLE_NODES:
        raise OracleSizeError(f"dense oracle is capped at N={MAX_ORACLE_NODES}, got N={g.n_nodes}")


def initial_state(g: Graph) -> np.ndarray:
    """Uniform superposition over nodes and their outgoing directions."""
    _check_size(g)
    n = g.n_qubits
    dim = 1 << n
    psi = np.zeros(dim * dim, dtype=complex)
    for i, nbrs in enumerate(g.adjacency):
        amp = 1.0 / np.sqrt(g.n_nodes * len(nbrs))
        for j in nbrs:
            psi[i * dim + j] = amp
    return psi


def build_coin(g: Graph) -> np.ndarray:
    """Block-diagonal Grover coin ``sum_i |i><i| (x) (2|s_i><s_i| - I)``.

    Padded node blocks (i >= N) are the identity.
    """
    _check_size(g)
    dim = 1 << g.n_qubits
    coin = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(dim):
        block = slice(i * dim, (i + 1) * dim)
        if i >= g.n_nodes:
            coin[block, block] = np.eye(dim)
            continue
        s = np.zeros(dim)
        nbrs = list(g.adjacency[i])
        s[nbrs] = 1.0 / np.sqrt(len(nbrs))
        coin[block, block] = 2.0 * np.outer(s, s) - np.eye(dim)
    return coin


def build_shift(n_qubits: int) -> np.ndarray:
    """Flip-flop shift: the permutation ``|i>|j> -> |j>|i>`` on two n-qubit registers."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    dim = 1 << n_qubits
    idx = np.arange(dim * dim)
    i, j = divmod(idx, dim)
    shift = np.zeros((dim * dim, dim * dim), dtype=complex)
    shift[j * dim + i, idx] = 1.0
    return shift


@dataclass(frozen=True)
class WalkOperators:
    n_qubits_per_register: int
    coin: np.ndarray
    shift: np.ndarray

    @property
    def dim(self) -> int:
        return 1 << (2 * self.n_qubits_per_register)

    @cached_property
    def step(self) -> np.ndarray:
        return self.shift @ self.coin


def walk_operators(g: Graph) -> WalkOperators:
    return WalkOperators(g.n_qubits, build_coin(g), build_shift(g.n_qubits))


def evolve(g: Graph, t: int, ops: WalkOperators | None = None) -> np.ndarray:
    """``(S C)^t |psi(0)>``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    ops = ops or walk_operators(g)
    psi = initial_state(g)
    for _ in range(t):
        psi = ops.step @ psi
    return psi


def node_probabilities(psi: np.ndarray, g: Graph, atol: float = 1e-10) -> np.ndarray:
    """Marginal probability of the position register, truncated to the N real nodes.

    Sums over the full second register.  Raises if the state is not normalised
    or if padded positions carry weight.
    """
    dim = 1 << g.n_qubits
    psi = np.asarray(psi)
    if psi.shape != (dim * dim,):
        raise ValueError(f"state has shape {psi.shape}, expected ({dim * dim},)")
    probs = (np.abs(psi.reshape(dim, dim)) ** 2).sum(axis=1)
    total = probs.sum()
    if abs(total - 1.0) > atol:
        raise NormalizationError(f"state norm^2 = {total!r}")
    if probs[g.n_nodes:].sum() > atol:
        raise NormalizationError(f"padded positions carry probability {probs[g.n_nodes:].sum():.3e}")
    return probs[: g.n_nodes]


def save_state_csv(psi: np.ndarray, path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write("index,re,im\n")
        for k, a in enumerate(np.asarray(psi)):
            fh.write(f"{k},{a.real:.17g},{a.imag:.17g}\n")
