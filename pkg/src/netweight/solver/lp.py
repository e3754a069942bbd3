"""Dense/sparse LP front end and the a_min program.

The LP itself is delegated to HiGHS through :func:`scipy.optimize.linprog`
with tightened tolerances; this module owns the contract (shape checks,
error mapping, deterministic output).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from ..errors import DimensionMismatch, EmptyGraph, Infeasible, SolverError, Unbounded

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
    "presolve": True,
}


@dataclass(frozen=True)
class LPResult:
    value: float
    x: np.ndarray


def _check_block(A, b, nvar, name):
    if A is None and b is None:
        return None, None
    if A is None or b is None:
        raise DimensionMismatch(f"{name}: matrix and right-hand side must be given together")
    b = np.asarray(b, dtype=float).ravel()
    if sp.issparse(A):
        A = sp.csr_matrix(A, dtype=float)
    else:
        A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape != (b.size, nvar):
        raise DimensionMismatch(f"{name}: matrix has shape {A.shape}, expected ({b.size}, {nvar})")
    return A, b


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=(0, None)) -> LPResult:
    """Minimize ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq`` and bounds.

    Variables are nonnegative unless ``bounds`` says otherwise (same format
    as :func:`scipy.optimize.linprog`).
    """
    c = np.asarray(c, dtype=float).ravel()
    nvar = c.size
    if nvar == 0:
        raise DimensionMismatch("empty objective")
    A_ub, b_ub = _check_block(A_ub, b_ub, nvar, "inequalities")
    A_eq, b_eq = _check_block(A_eq, b_eq, nvar, "equalities")
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds,
                  method="highs", options=_HIGHS_OPTIONS)
    if res.status == 2:
        raise Infeasible(res.message)
    if res.status == 3:
        raise Unbounded(res.message)
    if res.status != 0:
        raise SolverError(f"LP solver failed (status {res.status}): {res.message}")
    return LPResult(float(res.fun), np.asarray(res.x, dtype=float))


def solve_amin(g, config=None) -> tuple:
    """Smallest achievable max vertex sum over edge distributions.

    Returns ``(a_min, witness)`` where ``witness`` is a distribution attaining
    it (clipped to be nonnegative and renormalized). ``config`` is accepted
    for call-site symmetry with the FPTAS; the LP is solved exactly either way.
    """
    if g.m == 0:
        raise EmptyGraph("a_min is undefined for a graph without edges")
    m, n = g.m, g.n
    # variables: p_0..p_{m-1}, a
    c = np.zeros(m + 1)
    c[-1] = 1.0
    A_ub = np.hstack([g.incidence_matrix(), -np.ones((n, 1))])
    A_eq = np.zeros((1, m + 1))
    A_eq[0, :m] = 1.0
    res = solve_lp(c, A_ub=A_ub, b_ub=np.zeros(n), A_eq=A_eq, b_eq=[1.0],
                   bounds=[(0, None)] * m + [(None, None)])
    p = np.clip(res.x[:m], 0.0, None)
    p /= p.sum()
    a_min = max(res.value, float(g.vertex_sums(p).max()))
    return a_min, p


def linear_min_over_polytope(g, c, a) -> float:
    """min c @ p over {p >= 0, sum p = 1, vertex sums <= a} (exact LP)."""
    m = g.m
    A_eq = np.ones((1, m))
    res = solve_lp(c, A_ub=g.incidence_matrix(), b_ub=np.full(g.n, a), A_eq=A_eq, b_eq=[1.0])
    return res.value
