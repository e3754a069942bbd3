"""Brute-force reference optimum over a lattice of edge distributions."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from ..errors import BadResolution, EmptyGraph, TooLarge
from ..graph import DataGraph
from ..weights import BoundParams
from . import kernels

ORACLE_MAX_EDGES = 6


class OracleResult(NamedTuple):
    value: float
    p: np.ndarray
    slack: float      # the continuous optimum is at least value - slack
    boxes: int        # branch-and-bound boxes visited
    points: int       # lattice points evaluated


def lattice_size(resolution: float) -> int:
    """Number of lattice steps K = 1/resolution; must be an integer."""
    if not 1e-4 - 1e-15 <= resolution <= 1e-1 + 1e-15:
        raise BadResolution(f"resolution must lie in [1e-4, 1e-1], got {resolution}")
    K = round(1.0 / resolution)
    if abs(K * resolution - 1.0) > 1e-9:
        raise BadResolution(f"1/resolution must be an integer, got {1.0 / resolution}")
    return K


def discretization_slack(g: DataGraph, params: BoundParams, resolution: float) -> float:
    """Lipschitz constant of the objective (l1 norm, on the simplex) times the
    l1 distance m * resolution from any distribution to the lattice.

    a(p) >= 2/n because vertex sums add up to 2, which bounds the derivative
    of a^gamma; the spread term is max(1, sqrt(L), L)-Lipschitz.
    """
    gamma = params.exponent
    L = params.log_inv_delta
    lip = gamma * (2.0 / g.n) ** (gamma - 1.0) + max(1.0, math.sqrt(L), L)
    return lip * g.m * resolution


def brute_force_optimum(g: DataGraph, params: BoundParams, resolution: float = 1e-3,
                        max_boxes: int = 50_000_000) -> OracleResult:
    """Exact minimum of a(p)^(1/(1+beta)) + g(p) over {p_e = k_e * resolution}.

    The lattice has C(K+m-1, m-1) points, too many to list at fine
    resolution, so it is searched by branch and bound with bounds that never
    discard a box that could hold a better point; the result equals
    exhaustive enumeration up to 1e-12.
    """
    if g.m == 0:
        raise EmptyGraph("no edges")
    if g.m > ORACLE_MAX_EDGES:
        raise TooLarge(f"oracle handles at most {ORACLE_MAX_EDGES} edges, got {g.m}")
    K = lattice_size(resolution)
    inc = np.ascontiguousarray(g.incidence_matrix())
    leaf = 64.0
    value, x, boxes, points, complete = kernels.branch_and_bound(
        np.ascontiguousarray(g.eu), np.ascontiguousarray(g.ev), g.n, inc, float(K),
        params.exponent, params.log_inv_delta, leaf, max_boxes, 1e-12)
    if not complete:
        raise TooLarge(f"search exceeded {max_boxes} boxes")
    p = np.asarray(x) / K
    return OracleResult(float(value), p, discretization_slack(g, params, resolution),
                        int(boxes), int(points))
