from .fptas import FptasResult, build_grid, grid_size_formula, run_fptas
from .inner import FptasConfig, GridPointResult, Topology, project, solve_inner
from .lp import LPResult, linear_min_over_polytope, solve_amin, solve_lp
from .oracle import OracleResult, brute_force_optimum, discretization_slack, lattice_size

__all__ = [
    "FptasConfig", "FptasResult", "GridPointResult", "LPResult", "OracleResult", "Topology",
    "brute_force_optimum", "build_grid", "discretization_slack", "grid_size_formula",
    "lattice_size", "linear_min_over_polytope", "project", "run_fptas", "solve_amin",
    "solve_inner", "solve_lp",
]
