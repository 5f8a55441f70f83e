"""Coined quantum walks on complex networks compiled to dual-register circuits."""

from .graph import Graph, GraphParams, generate, generate_ba, generate_er, generate_ws, load_graph, save_graph
from .circuit import Circuit, GateOp, build_walk_circuit
from .decompose import decompose_to_basis, resource_report
from .sim import NoiseModel, sample, simulate, simulate_noisy
from .analysis import fit_power_law, l1_distance

__version__ = "0.1.0"
