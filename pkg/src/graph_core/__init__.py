from src.graph_core.graph import WeightedGraph, build_graph
from src.graph_core.metric import (
    GraphExhaustion,
    ball,
    default_origin,
    diameter,
    distances,
    eps_index,
    exhaust,
    induced_subgraph,
    probe_points,
)
from src.graph_core.families import family_exhaustion, generate
from src.graph_core.io import graph_hash, read_graph, write_graph

__all__ = [
    "WeightedGraph",
    "build_graph",
    "GraphExhaustion",
    "ball",
    "default_origin",
    "diameter",
    "distances",
    "eps_index",
    "exhaust",
    "induced_subgraph",
    "probe_points",
    "family_exhaustion",
    "generate",
    "graph_hash",
    "read_graph",
    "write_graph",
]
