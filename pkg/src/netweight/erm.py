"""Synthetic networked learning on a finite feature domain.

Vertices carry iid features X_i in {0..D-1}; each edge {i, j} carries a label
Y_ij ~ Bernoulli(eta(X_i, X_j)) drawn independently given the features.
Because P_X and eta are known tables, risks, excess risks and the pieces of
the Hoeffding decomposition are computed exactly.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyHypothesisSet, LengthMismatch, NotSymmetric
from .graph import DataGraph
from .weights import as_edge_vector, as_matching, fmt_real

SYM_TOL = 1e-12
HYPOTHESIS_CAP = 64


@dataclass(frozen=True)
class SyntheticInstance:
    px: np.ndarray = field(repr=False)
    eta: np.ndarray = field(repr=False)
    seed: int = 0

    def __post_init__(self):
        px = np.asarray(self.px, dtype=float).ravel()
        eta = np.atleast_2d(np.asarray(self.eta, dtype=float))
        if px.size == 0 or np.any(px < 0) or abs(px.sum() - 1.0) > 1e-9:
            raise ValueError("px must be a probability vector")
        if eta.shape != (px.size, px.size):
            raise ValueError(f"eta must be {px.size}x{px.size}, got {eta.shape}")
        if np.any(eta < 0) or np.any(eta > 1):
            raise ValueError("eta entries must lie in [0, 1]")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")
        object.__setattr__(self, "px", px)
        object.__setattr__(self, "eta", eta)

    @property
    def D(self) -> int:
        return self.px.size

    @property
    def is_symmetric(self) -> bool:
        return bool(np.allclose(self.eta, self.eta.T, rtol=0, atol=SYM_TOL))

    def to_json(self) -> str:
        return json.dumps({"D": self.D, "px": [fmt_real(x) for x in self.px],
                           "eta": [[fmt_real(x) for x in row] for row in self.eta],
                           "seed": self.seed})

    @classmethod
    def from_json(cls, text: str) -> "SyntheticInstance":
        doc = json.loads(text)
        inst = cls(np.array(doc["px"], dtype=float), np.array(doc["eta"], dtype=float),
                   int(doc.get("seed", 0)))
        if "D" in doc and int(doc["D"]) != inst.D:
            raise ValueError(f"D = {doc['D']} disagrees with len(px) = {inst.D}")
        return inst


@dataclass(frozen=True)
class Hypothesis:
    table: np.ndarray = field(repr=False)
    symmetric: bool = False

    def __post_init__(self):
        t = np.atleast_2d(np.asarray(self.table)).astype(np.int8)
        if t.shape[0] != t.shape[1] or np.any((t != 0) & (t != 1)):
            raise ValueError("a hypothesis is a square 0/1 table")
        if self.symmetric and not np.array_equal(t, t.T):
            raise NotSymmetric("table flagged symmetric but is not")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def __call__(self, x1, x2):
        return self.table[x1, x2]

    def __eq__(self, other):
        return isinstance(other, Hypothesis) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())


@dataclass(frozen=True)
class Sample:
    features: np.ndarray
    labels: np.ndarray

    def check(self, g: DataGraph) -> None:
        if self.features.size != g.n:
            raise LengthMismatch(f"{self.features.size} features for {g.n} vertices")
        if self.labels.size != g.m:
            raise LengthMismatch(f"{self.labels.size} labels for {g.m} edges")


@dataclass(frozen=True)
class DecompositionReport:
    lambda_w: float
    t_w: float
    u_w: float
    u_tilde_w: float
    residual: float
    lambda_true: float
    variance_lhs: float


@dataclass(frozen=True)
class ExcessLossTables:
    """Exact conditional pieces of q_r = 1{y != r} - 1{y != r*}."""
    cond: np.ndarray      # E[q_r | x1, x2]
    h: np.ndarray         # E[q_r | X1 = x] - Lambda(r)
    h_hat: np.ndarray     # cond - Lambda - h(x1) - h(x2)
    lam: float            # Lambda(r) = L(r) - L*


# -- risks -------------------------------------------------------------------

def bayes_rule(inst: SyntheticInstance) -> Hypothesis:
    """1{eta >= 1/2}; ties go to label 1."""
    return Hypothesis((inst.eta >= 0.5).astype(np.int8), symmetric=inst.is_symmetric)


def _mistake_prob(inst: SyntheticInstance, table: np.ndarray) -> np.ndarray:
    # P[Y != r(x1, x2) | x1, x2]
    return np.where(table == 1, 1.0 - inst.eta, inst.eta)


def true_risk(inst: SyntheticInstance, r: Hypothesis) -> float:
    _check_domain(inst, r)
    P = np.outer(inst.px, inst.px)
    return float(np.sum(P * _mistake_prob(inst, r.table)))


def excess_risk(inst: SyntheticInstance, r: Hypothesis) -> float:
    """Lambda(r) = L(r) - L(r*)."""
    return true_risk(inst, r) - true_risk(inst, bayes_rule(inst))


def _check_domain(inst, r):
    if r.table.shape != inst.eta.shape:
        raise ValueError(f"hypothesis is {r.table.shape[0]}-ary, instance has D = {inst.D}")


# -- sampling and ERM ----------------------------------------------------------

def draw_sample(inst: SyntheticInstance, g: DataGraph,
                rng: Optional[np.random.Generator] = None) -> Sample:
    """Features iid from px, then one Bernoulli label per edge.

    Without ``rng`` the instance seed drives a fresh PCG64 generator.
    """
    rng = np.random.default_rng(inst.seed) if rng is None else rng
    x = rng.choice(inst.D, size=g.n, p=inst.px)
    y = (rng.random(g.m) < inst.eta[x[g.eu], x[g.ev]]).astype(np.int8)
    return Sample(x.astype(np.int64), y)


def _edge_losses(g: DataGraph, sample: Sample, tables: np.ndarray) -> np.ndarray:
    # (hypotheses, edges) 0/1 loss matrix
    x = sample.features
    pred = tables[:, x[g.eu], x[g.ev]]
    return (pred != sample.labels[None, :]).astype(float)


def weighted_risks(g: DataGraph, sample: Sample, w, hypotheses: Sequence[Hypothesis]) -> np.ndarray:
    """Weighted empirical risk of every hypothesis."""
    sample.check(g)
    w = as_edge_vector(g, w)
    total = w.sum()
    if total <= 0:
        raise ValueError("weights must have positive total")
    tables = np.stack([h.table for h in hypotheses])
    return _edge_losses(g, sample, tables) @ w / total


def weighted_erm(g: DataGraph, sample: Sample, w, hypotheses: Sequence[Hypothesis]) -> tuple:
    """Minimizer of sum_e w_e 1{Y_e != r(X_u, X_v)} / ||w||_1, first index on ties."""
    if len(hypotheses) == 0:
        raise EmptyHypothesisSet("need at least one hypothesis")
    risks = weighted_risks(g, sample, w, hypotheses)
    k = int(np.argmin(risks))
    return hypotheses[k], float(risks[k])


def subsampling_risk(g: DataGraph, sample: Sample, p, r: Hypothesis, N: int,
                     seed: int = 0) -> float:
    """Average loss of ``r`` on N edges drawn iid from ``p``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    sample.check(g)
    p = as_edge_vector(g, p)
    rng = np.random.default_rng(seed)
    picks = rng.choice(g.m, size=N, p=p / p.sum())
    losses = _edge_losses(g, sample, r.table[None])[0]
    return float(losses[picks].mean())


def all_symmetric_hypotheses(D: int, cap: int = HYPOTHESIS_CAP, seed: int = 0) -> list:
    """Every symmetric 0/1 table when there are at most ``cap`` of them,
    otherwise ``cap`` distinct ones drawn with ``seed``."""
    iu = np.triu_indices(D)
    k = iu[0].size

    def build(bits):
        t = np.zeros((D, D), dtype=np.int8)
        t[iu] = bits
        t.T[iu] = bits
        return Hypothesis(t, symmetric=True)

    if k < 63 and 2 ** k <= cap:
        return [build(bits) for bits in itertools.product((0, 1), repeat=k)]
    rng = np.random.default_rng(seed)
    seen, out = set(), []
    while len(out) < cap:
        bits = rng.integers(0, 2, size=k)
        key = bits.tobytes()
        if key not in seen:
            seen.add(key)
            out.append(build(bits))
    return out


def random_instance(D: int, seed: int = 0, symmetric: bool = True) -> SyntheticInstance:
    """Dirichlet(1) feature law and uniform eta (symmetrized by averaging)."""
    rng = np.random.default_rng(seed)
    px = rng.dirichlet(np.ones(D))
    eta = rng.random((D, D))
    if symmetric:
        eta = 0.5 * (eta + eta.T)
    return SyntheticInstance(px, eta, seed)


# -- Hoeffding decomposition ---------------------------------------------------

def excess_loss_tables(inst: SyntheticInstance, r: Hypothesis) -> ExcessLossTables:
    _check_domain(inst, r)
    star = bayes_rule(inst)
    cond = _mistake_prob(inst, r.table) - _mistake_prob(inst, star.table)
    px = inst.px
    lam = float(px @ cond @ px)
    h = cond @ px - lam
    h_hat = cond - lam - h[:, None] - h[None, :]
    return ExcessLossTables(cond, h, h_hat, lam)


def _require_symmetric(inst, r):
    if not inst.is_symmetric:
        raise NotSymmetric("eta must be symmetric")
    if not np.array_equal(r.table, r.table.T):
        raise NotSymmetric("hypothesis must be symmetric")


def hoeffding_decomposition(inst: SyntheticInstance, g: DataGraph, sample: Sample, w,
                            r: Hypothesis) -> DecompositionReport:
    """Split the weighted empirical excess risk Lambda_w into a vertex term
    T_w, a degenerate pair term U_w and a label-noise term U~_w."""
    _require_symmetric(inst, r)
    sample.check(g)
    w = as_matching(g, w)
    tabs = excess_loss_tables(inst, r)
    star = bayes_rule(inst)
    x, y = sample.features, sample.labels
    xu, xv = x[g.eu], x[g.ev]
    q = ((y != r.table[xu, xv]).astype(float) - (y != star.table[xu, xv]).astype(float))
    total = w.sum()
    lam_w = float(w @ q / total)
    t_w = tabs.lam + float(g.vertex_sums(w) @ tabs.h[x] / total)
    u_w = float(w @ tabs.h_hat[xu, xv] / total)
    ut_w = float(w @ (q - tabs.cond[xu, xv]) / total)
    return DecompositionReport(
        lambda_w=lam_w, t_w=t_w, u_w=u_w, u_tilde_w=ut_w,
        residual=abs(lam_w - (t_w + u_w + ut_w)), lambda_true=tabs.lam,
        variance_lhs=float(inst.px @ tabs.h ** 2))


def variance_control_check(inst: SyntheticInstance, r: Hypothesis) -> tuple:
    """``(Var[E[q_r | X1]], Lambda(r), holds)``."""
    _require_symmetric(inst, r)
    tabs = excess_loss_tables(inst, r)
    # E[q_r | X1] = h + Lambda, and h is centered
    lhs = float(inst.px @ tabs.h ** 2)
    return lhs, tabs.lam, lhs <= tabs.lam + 1e-9


# -- experiment ------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentResult:
    schemes: tuple
    excess: np.ndarray    # (trials, schemes) excess risk of the selected hypothesis

    @property
    def trials(self) -> int:
        return self.excess.shape[0]

    def rows(self) -> list:
        out = []
        for k, name in enumerate(self.schemes):
            col = self.excess[:, k]
            std = float(col.std(ddof=1)) if col.size > 1 else 0.0
            out.append((name, self.trials, float(col.mean()), std))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["scheme", "trials", "mean_excess_risk", "std_excess_risk"])
        for name, trials, mean, std in self.rows():
            writer.writerow([name, trials, f"{mean:.12g}", f"{std:.12g}"])
        return buf.getvalue()


def excess_risk_experiment(inst: SyntheticInstance, g: DataGraph,
                           hypotheses: Sequence[Hypothesis], schemes: Sequence[tuple],
                           trials: int, seed: int = 0, threads: int = 1) -> ExperimentResult:
    """Trial t draws a sample with generator seed ``seed + t`` and records
    Lambda(r_hat) for the ERM pick of every (name, weights) scheme.

    A scheme's weights may be a callable taking the trial generator, for
    weightings that are themselves random (e.g. subsample counts).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if len(hypotheses) == 0:
        raise EmptyHypothesisSet("need at least one hypothesis")
    weights = [w if callable(w) else as_edge_vector(g, w) for _, w in schemes]
    excess_of = np.array([excess_risk(inst, h) for h in hypotheses])
    tables = np.stack([h.table for h in hypotheses])

    def trial(t):
        rng = np.random.default_rng(seed + t)
        sample = draw_sample(inst, g, rng)
        losses = _edge_losses(g, sample, tables)
        out = []
        for w in weights:
            w = w(rng) if callable(w) else w
            out.append(excess_of[int(np.argmin(losses @ w / w.sum()))])
        return out

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(trial, range(trials)))
    else:
        rows = [trial(t) for t in range(trials)]
    return ExperimentResult(tuple(name for name, _ in schemes), np.array(rows, dtype=float))
