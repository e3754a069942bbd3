"""The inner subproblem: minimize the spread g(p) over P_a for a fixed a."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import EmptyGraph, InfeasibleA, NotConvergedWarning
from ..graph import TAU_LP, DataGraph
from ..weights import BoundParams
from . import kernels

# Dykstra stops once iterates move and violate by less than this
PROJ_TOL = 1e-13
PROJ_MAX_SWEEPS = 20000


@dataclass(frozen=True)
class FptasConfig:
    epsilon: float = 0.1
    inner_max_iters: int = 20000
    inner_tol: Optional[float] = None
    feasibility_tol: float = TAU_LP
    seed: int = 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.inner_tol is None:
            object.__setattr__(self, "inner_tol", self.epsilon / 4.0)
        if not 0 < self.inner_tol <= self.epsilon / 4.0:
            raise ValueError("inner_tol must lie in (0, epsilon/4]")
        if self.inner_max_iters < 1:
            raise ValueError("inner_max_iters must be positive")
        if not self.feasibility_tol > 0:
            raise ValueError("feasibility_tol must be positive")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")


@dataclass(frozen=True)
class GridPointResult:
    a: float
    b: float
    p: np.ndarray = field(repr=False)
    objective: float
    converged: bool
    b_lower: float = 0.0
    iterations: int = 0


class Topology:
    """Array view of a graph in the layout the kernels expect.

    Vertices are greedily colored so that each color class is an independent
    set; the Dykstra vertex sweep visits classes in order, which lets the
    numpy path process a whole class at once.
    """

    def __init__(self, g: DataGraph):
        self.n = g.n
        self.m = g.m
        self.eu = np.ascontiguousarray(g.eu, dtype=np.int64)
        self.ev = np.ascontiguousarray(g.ev, dtype=np.int64)
        ptr, idx = g.incidence_csr
        self.ptr = np.ascontiguousarray(ptr)
        self.idx = np.ascontiguousarray(idx)
        color = np.full(g.n, -1, dtype=np.int64)
        for i in np.argsort(-g.degree, kind="stable"):
            if g.degree[i] == 0:
                continue
            taken = {int(color[j]) for j, _ in g.adjacency[i]}
            c = 0
            while c in taken:
                c += 1
            color[i] = c
        ncls = int(color.max()) + 1 if g.m else 0
        order, cptr, cedge, cown, cvptr = [], [0], [], [], [0]
        for c in range(ncls):
            verts = np.flatnonzero(color == c)
            for local, i in enumerate(verts):
                es = idx[ptr[i]:ptr[i + 1]]
                cedge.extend(es)
                cown.extend([local] * len(es))
            order.extend(verts)
            cptr.append(len(order))
            cvptr.append(len(cedge))
        self.order = np.array(order, dtype=np.int64)
        self.cptr = np.array(cptr, dtype=np.int64)
        self.cedge = np.array(cedge, dtype=np.int64)
        self.cown = np.array(cown, dtype=np.int64)
        self.cvptr = np.array(cvptr, dtype=np.int64)

    def arrays(self) -> tuple:
        return (self.eu, self.ev, self.n, self.order, self.ptr, self.idx,
                self.cptr, self.cedge, self.cown, self.cvptr)


def project(g: DataGraph, y, a: float, topo: Optional[Topology] = None) -> np.ndarray:
    """Euclidean projection of ``y`` onto P_a (cold-started Dykstra)."""
    topo = topo or Topology(g)
    y = np.asarray(y, dtype=float)
    eu, ev, n, order, ptr, idx, cptr, cedge, cown, cvptr = topo.arrays()
    x, _, viol = kernels.project_polytope(y.copy(), np.zeros(g.m), np.zeros(n), float(a),
                                          eu, ev, n, order, ptr, idx, cptr, cedge, cown,
                                          cvptr, PROJ_TOL, PROJ_MAX_SWEEPS)
    if viol > TAU_LP:
        raise InfeasibleA(f"P_a is empty or ill-conditioned at a = {a} (violation {viol:.3g})")
    return x


def solve_inner(g: DataGraph, a: float, params: BoundParams, config: FptasConfig,
                a_min: Optional[float] = None, topo: Optional[Topology] = None,
                warn: bool = True) -> GridPointResult:
    """min g(p) over P_a, certified to relative gap ``config.inner_tol``.

    ``a_min`` skips the feasibility LP when the caller already knows it.
    Hitting the iteration cap yields ``converged=False`` and a
    :class:`NotConvergedWarning`; the best point found is still returned.
    """
    if g.m == 0:
        raise EmptyGraph("no edges")
    if a_min is None:
        from .lp import solve_amin

        a_min, _ = solve_amin(g)
    if a < a_min - config.feasibility_tol:
        raise InfeasibleA(f"a = {a} is below a_min = {a_min}")
    # a hair above a_min keeps P_a nonempty despite LP rounding
    a_eff = max(float(a), a_min * (1.0 + TAU_LP))
    topo = topo or Topology(g)
    L = params.log_inv_delta
    p, b, b_lower, ok, iters, viol = kernels.inner_solve(
        *topo.arrays(), a_eff, L, float(config.inner_tol), int(config.inner_max_iters),
        PROJ_TOL, PROJ_MAX_SWEEPS)
    p = np.asarray(p)
    ok = bool(ok) and viol <= config.feasibility_tol
    if not ok and warn:
        warnings.warn(NotConvergedWarning(
            f"inner solve at a = {a:.6g} stopped with gap {b - b_lower:.3g} "
            f"after {iters} iterations"), stacklevel=2)
    return GridPointResult(a=float(a), b=float(b), p=p,
                           objective=float(a) ** params.exponent + float(b),
                           converged=ok, b_lower=float(b_lower), iterations=int(iters))
