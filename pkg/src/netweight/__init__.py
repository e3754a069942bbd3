"""Weighting schemes for learning from networked examples.

Edges of a data graph carry training examples; examples sharing a vertex
are dependent. The package computes edge weightings that optimize a
weighted-ERM risk bound, and provides a synthetic harness to study them.
"""

from ._accel import BACKEND
from .errors import *  # noqa: F401,F403
from .graph import DataGraph, parse_edge_list
from .solver import FptasConfig, brute_force_optimum, run_fptas, solve_inner
from .weights import BoundParams, objective, theorem1_bound

__version__ = "0.1.0"

__all__ = ["BACKEND", "BoundParams", "DataGraph", "FptasConfig", "brute_force_optimum",
           "objective", "parse_edge_list", "run_fptas", "solve_inner", "theorem1_bound"]
