"""Peaceful and conflict-free graph colourings: verifiers, randomized
colourers, exact oracles for tiny graphs, and audit tooling."""
from .graph import Bipartition, Graph, load_graph, random_regular, save_graph
from .logs import log_base, set_log_base
from .peace import (
    ImproperColouringError,
    PartialColouring,
    PeaceReport,
    check_proper,
    greedy_complete,
    is_p_peaceful,
    load_colouring,
    peace_report,
    save_colouring,
)

__version__ = "0.1.0"

__all__ = [
    "Bipartition",
    "Graph",
    "ImproperColouringError",
    "PartialColouring",
    "PeaceReport",
    "check_proper",
    "greedy_complete",
    "is_p_peaceful",
    "load_colouring",
    "load_graph",
    "log_base",
    "peace_report",
    "random_regular",
    "save_colouring",
    "save_graph",
    "set_log_base",
]
