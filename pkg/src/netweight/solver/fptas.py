"""Grid search over the max vertex sum a, one convex solve per grid point."""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyGraph, NotConvergedWarning
from ..graph import DataGraph
from ..weights import BoundParams, fmt_real
from .inner import FptasConfig, GridPointResult, Topology, solve_inner
from .lp import solve_amin

# slack when deciding whether a float lands on a grid boundary
_GRID_EPS = 1e-9


@dataclass(frozen=True)
class FptasResult:
    best: GridPointResult
    trace: tuple
    a_min: float
    grid_step: float
    grid_size: int

    @property
    def converged(self) -> bool:
        return all(r.converged for r in self.trace)

    def to_dict(self) -> dict:
        return {
            "a_min": fmt_real(self.a_min),
            "grid_step": fmt_real(self.grid_step),
            "grid_size": self.grid_size,
            "grid": [{"a": fmt_real(r.a), "b": fmt_real(r.b),
                      "objective": fmt_real(r.objective), "converged": r.converged}
                     for r in self.trace],
            "best": {"a": fmt_real(self.best.a), "b": fmt_real(self.best.b),
                     "objective": fmt_real(self.best.objective),
                     "p": [fmt_real(x) for x in self.best.p]},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def grid_size_formula(n: int, a_min: float, epsilon: float, beta: float) -> int:
    """1 + floor(n (1 - a_min) / (epsilon (1 + beta)))."""
    if n < 1 or epsilon <= 0 or not 0 <= beta < 1:
        raise ValueError("need n >= 1, epsilon > 0 and beta in [0, 1)")
    span = max(1.0 - a_min, 0.0)
    return 1 + int(math.floor(n * span / (epsilon * (1.0 + beta)) + _GRID_EPS))


def build_grid(n: int, a_min: float, epsilon: float, beta: float) -> tuple:
    """``(values, stepped)``: grid values in increasing order and how many of
    them are stepped points a_min + i * epsilon (1 + beta) / n.

    When the last stepped point falls short of 1, a clamped point a = 1 is
    appended so that some grid value lies above any optimal a.
    """
    step = epsilon * (1.0 + beta) / n
    count = grid_size_formula(n, a_min, epsilon, beta)
    values = [min(a_min + i * step, 1.0) for i in range(count)]
    if values[-1] < 1.0 - _GRID_EPS:
        values.append(1.0)
    return np.array(values), count


def run_fptas(g: DataGraph, params: BoundParams, config: FptasConfig,
              threads: int = 1) -> FptasResult:
    """Minimize a^(1/(1+beta)) + g(p) by solving the inner program on a grid
    of a values; the smallest objective wins, ties going to the smaller a.

    Grid points are independent; ``threads > 1`` solves them concurrently
    (the compiled kernels release the GIL). The trace is in grid order
    regardless.
    """
    if g.m == 0:
        raise EmptyGraph("no edges to weight")
    if threads < 1:
        raise ValueError("threads must be positive")
    a_min, _ = solve_amin(g)
    values, count = build_grid(g.n, a_min, config.epsilon, params.beta)
    topo = Topology(g)

    def solve(a):
        return solve_inner(g, float(a), params, config, a_min=a_min, topo=topo, warn=False)

    if threads == 1:
        trace = [solve(a) for a in values]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trace = list(pool.map(solve, values))
    best = trace[0]
    for r in trace[1:]:
        if r.objective < best.objective:
            best = r
    stale = sum(not r.converged for r in trace)
    if stale:
        warnings.warn(NotConvergedWarning(
            f"{stale} of {len(trace)} grid points were not certified"), stacklevel=2)
    step = config.epsilon * (1.0 + params.beta) / g.n
    return FptasResult(best=best, trace=tuple(trace), a_min=a_min, grid_step=step,
                       grid_size=count)
