"""Edge weight vectors, their norms, the weighting objective and risk-bound evaluators.

All bound evaluators are order-level with every unspecified universal
constant set to 1.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DeltaOutOfRange,
    EmptyGraph,
    LengthMismatch,
    NegativeWeight,
    NotADistribution,
    NotAMatching,
    ParseError,
    WeightError,
    ZeroVector,
)
from .graph import TAU_LP, DataGraph, fractional_edge_chromatic, CHROMATIC_MAX_EDGES


@dataclass(frozen=True)
class BoundParams:
    beta: float = 0.0
    delta: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.beta < 1.0):
            raise ValueError(f"beta must lie in [0, 1), got {self.beta}")
        if not (0.0 < self.delta <= 1.0):
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")

    @property
    def log_inv_delta(self) -> float:
        return -math.log(self.delta)

    @property
    def exponent(self) -> float:
        """1 / (1 + beta), the power applied to the max vertex sum."""
        return 1.0 / (1.0 + self.beta)


@dataclass(frozen=True)
class WeightNorms:
    l1: float
    l2: float
    linf: float
    lmax: float
    max_vertex_sum: float


def as_edge_vector(g: DataGraph, values) -> np.ndarray:
    """Validate length and sign; entries in [-tau, 0) are clamped to 0."""
    v = np.array(values, dtype=float).ravel()
    if v.size != g.m:
        raise LengthMismatch(f"expected {g.m} edge values, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise WeightError("edge values must be finite")
    if np.any(v < -TAU_LP):
        k = int(np.argmin(v))
        raise NegativeWeight(f"edge {k} has negative value {v[k]}")
    return np.maximum(v, 0.0)


def as_distribution(g: DataGraph, p) -> np.ndarray:
    p = as_edge_vector(g, p)
    if abs(p.sum() - 1.0) > TAU_LP:
        raise NotADistribution(f"entries sum to {p.sum():.12g}, not 1")
    return p


def as_matching(g: DataGraph, w) -> np.ndarray:
    w = as_edge_vector(g, w)
    if w.sum() <= 0.0:
        raise ZeroVector("a fractional matching needs a positive total weight")
    sums = g.vertex_sums(w)
    worst = int(np.argmax(sums))
    if sums[worst] > 1.0 + TAU_LP:
        raise NotAMatching(f"vertex {worst} has incident weight {sums[worst]:.12g} > 1")
    return w


def compute_norms(g: DataGraph, v) -> WeightNorms:
    v = as_edge_vector(g, v)
    if g.m == 0:
        return WeightNorms(0.0, 0.0, 0.0, 0.0, 0.0)
    sums = g.vertex_sums(v)
    sq = g.vertex_sums(v * v)
    return WeightNorms(
        l1=float(v.sum()),
        l2=float(np.sqrt(np.dot(v, v))),
        linf=float(v.max()),
        lmax=float(np.sqrt(sq.max())),
        max_vertex_sum=float(sums.max()),
    )


def spread_term(norms: WeightNorms, log_inv_delta: float) -> float:
    """max(||v||_2, ||v||_max sqrt(L), ||v||_inf L)."""
    L = log_inv_delta
    return max(norms.l2, norms.lmax * math.sqrt(L), norms.linf * L)


def objective(g: DataGraph, p, params: BoundParams) -> float:
    """Weighting objective over edge distributions: a^(1/(1+beta)) + spread(p)."""
    p = as_distribution(g, p)
    nm = compute_norms(g, p)
    return nm.max_vertex_sum ** params.exponent + spread_term(nm, params.log_inv_delta)


def objective_parts(g: DataGraph, p, params: BoundParams) -> tuple:
    """``(a, b)``: the smallest auxiliary values feasible for the epigraph form."""
    p = as_distribution(g, p)
    nm = compute_norms(g, p)
    return nm.max_vertex_sum, spread_term(nm, params.log_inv_delta)


def matching_from_distribution(g: DataGraph, p) -> np.ndarray:
    """Scale a distribution by its max vertex sum; the result is a fractional
    matching with total weight 1/a."""
    p = as_distribution(g, p)
    a = float(g.vertex_sums(p).max())
    if a <= 0.0:
        raise ZeroVector("distribution has zero max vertex sum")
    w = p / a
    # the maximizing vertex sums to exactly 1 up to rounding
    return np.minimum(w, 1.0)


def equal_distribution(g: DataGraph) -> np.ndarray:
    if g.m == 0:
        raise EmptyGraph("no edges to weight")
    return np.full(g.m, 1.0 / g.m)


def theorem1_bound(g: DataGraph, w, params: BoundParams, approx_error: float = 0.0) -> float:
    """Excess-risk bound of weighted ERM with unit constants (C = K' = 1).

    ``2 * approx_error + L1 / ((1-beta)^(2/(1+beta)) ||w||_1) *
    (||w||_1^(beta/(1+beta)) + max(||w||_2, ||w||_max sqrt(L), ||w||_inf L))``
    with ``L = log(1/delta)`` and ``L1 = max(L, 1)``.
    """
    if approx_error < 0:
        raise ValueError("approx_error must be nonnegative")
    w = as_matching(g, w)
    nm = compute_norms(g, w)
    beta = params.beta
    L = params.log_inv_delta
    lead = max(L, 1.0) / ((1.0 - beta) ** (2.0 / (1.0 + beta)) * nm.l1)
    inner = nm.l1 ** (beta / (1.0 + beta)) + spread_term(nm, L)
    return 2.0 * approx_error + lead * inner


def delta_threshold(g: DataGraph, w) -> float:
    """exp(-min(||w||_2/||w||_inf, ||w||_2^2/||w||_max^2)); above it the
    bound simplifies to its leading order. Reported, never enforced."""
    nm = compute_norms(g, as_edge_vector(g, w))
    if nm.linf == 0.0:
        raise ZeroVector("threshold undefined for the zero vector")
    return math.exp(-min(nm.l2 / nm.linf, nm.l2 ** 2 / nm.lmax ** 2))


def equal_weighting_bound_order(g: DataGraph, params: BoundParams) -> float:
    """(Delta/m)^(1/(1+beta)) + 1/sqrt(m), valid for delta in (exp(-m/Delta), 1]."""
    if g.m == 0:
        raise EmptyGraph("equal weighting needs at least one edge")
    m, dmax = g.m, g.max_degree
    lower = math.exp(-m / dmax)
    if params.delta <= lower:
        raise DeltaOutOfRange(f"delta = {params.delta} must exceed exp(-m/Delta) = {lower:.12g}")
    return (dmax / m) ** params.exponent + 1.0 / math.sqrt(m)


def chromatic_bound_order(g: DataGraph, max_edges: int = CHROMATIC_MAX_EDGES) -> float:
    """sqrt(chi*(D_G) / m): the order reached through fractional colorings."""
    if g.m == 0:
        raise EmptyGraph("no edges")
    return math.sqrt(fractional_edge_chromatic(g, max_edges) / g.m)


# -- serialization ---------------------------------------------------------

def fmt_real(x: float) -> float:
    """Round to 12 significant digits for reporting."""
    return float(f"{float(x):.12g}")


def weights_to_json(g: DataGraph, values) -> str:
    values = np.asarray(values, dtype=float)
    doc = {"edges": [[u, v] for u, v in g.edges], "values": [fmt_real(x) for x in values]}
    return json.dumps(doc)


def weights_to_csv(g: DataGraph, values) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["u", "v", "value"])
    for (u, v), x in zip(g.edges, np.asarray(values, dtype=float)):
        writer.writerow([u, v, f"{float(x):.12g}"])
    return buf.getvalue()


def _align(g: DataGraph, edges, values) -> np.ndarray:
    index = {}
    for k, (u, v) in enumerate(g.edges):
        index[(min(u, v), max(u, v))] = k
    out = np.full(g.m, np.nan)
    for (u, v), x in zip(edges, values):
        key = (min(u, v), max(u, v))
        if key not in index:
            raise LengthMismatch(f"edge {{{u}, {v}}} is not in the graph")
        if not np.isnan(out[index[key]]):
            raise ParseError(f"edge {{{u}, {v}}} listed twice")
        out[index[key]] = x
    if np.isnan(out).any():
        missing = g.edges[int(np.flatnonzero(np.isnan(out))[0])]
        raise LengthMismatch(f"no value for edge {{{missing[0]}, {missing[1]}}}")
    return out


def weights_from_json(g: DataGraph, text: str) -> np.ndarray:
    try:
        doc = json.loads(text)
        edges = [(int(u), int(v)) for u, v in doc["edges"]]
        values = [float(x) for x in doc["values"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"bad weights JSON: {exc}") from None
    if len(edges) != len(values):
        raise LengthMismatch("'edges' and 'values' differ in length")
    return _align(g, edges, values)


def weights_from_csv(g: DataGraph, text: str) -> np.ndarray:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["u", "v", "value"]:
        raise ParseError("weights CSV must start with the header 'u,v,value'", 1)
    edges, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or not "".join(row).strip():
            continue
        try:
            u, v, x = row
            edges.append((int(u), int(v)))
            values.append(float(x))
        except ValueError:
            raise ParseError(f"expected 'u,v,value', got {','.join(row)!r}", lineno) from None
    return _align(g, edges, values)
