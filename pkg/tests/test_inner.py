import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from netweight.errors import EmptyGraph, InfeasibleA, NotConvergedWarning
from netweight.graph import DataGraph, complete_graph, disjoint_edges, star_graph, star_plus_matching
from netweight.solver import FptasConfig, Topology, project, solve_amin, solve_inner
from netweight.solver import kernels
from netweight.weights import BoundParams
from oracles import inner_optimum
from test_graph import graphs

CFG = FptasConfig(epsilon=0.05)


def test_config_validation():
    assert FptasConfig(epsilon=0.2).inner_tol == pytest.approx(0.05)
    for kwargs in [dict(epsilon=0), dict(epsilon=0.1, inner_tol=0.1), dict(inner_max_iters=0),
                   dict(feasibility_tol=0), dict(seed=-1)]:
        with pytest.raises(ValueError):
            FptasConfig(**kwargs)


# -- projection ------------------------------------------------------------------------------

@given(st.lists(st.floats(-5, 5), min_size=1, max_size=30))
def test_simplex_projection_kkt(y):
    y = np.array(y)
    x = kernels.project_simplex(y)
    assert x.sum() == pytest.approx(1.0) and np.all(x >= 0)
    # y - x is constant on the support and no larger off it
    r = y - x
    supp = x > 1e-12
    theta = r[supp].mean()
    np.testing.assert_allclose(r[supp], theta, atol=1e-9)
    assert np.all(r[~supp] <= theta + 1e-9)


@given(graphs(max_n=6, min_edges=1), st.data())
def test_polytope_projection_against_conic_solver(g, data):
    import cvxpy as cp

    a_min, _ = solve_amin(g)
    a = a_min + data.draw(st.floats(0, 1)) * (1 - a_min)
    y = np.array(data.draw(st.lists(st.floats(-1, 1), min_size=g.m, max_size=g.m)))
    x = project(g, y, a)
    assert np.all(x >= -1e-12) and x.sum() == pytest.approx(1.0)
    assert g.vertex_sums(x).max() <= max(a, a_min * (1 + 1e-9)) + 1e-9
    z = cp.Variable(g.m)
    cons = [z >= 0, cp.sum(z) == 1, g.incidence_matrix() @ z <= max(a, a_min * (1 + 1e-9))]
    cp.Problem(cp.Minimize(cp.sum_squares(z - y)), cons).solve(solver="CLARABEL")
    assert np.linalg.norm(x - y) <= np.linalg.norm(z.value - y) + 1e-6


def test_projection_below_amin_is_infeasible():
    with pytest.raises(InfeasibleA):
        project(star_graph(3), np.full(3, 1 / 3), 0.5)


# -- inner solve ---------------------------------------------------------------------------------

def test_inner_star_uniform():
    r = solve_inner(star_graph(3), 1.0, BoundParams(0.3, math.exp(-1)), CFG)
    np.testing.assert_allclose(r.p, 1 / 3, atol=1e-9)
    assert r.b == pytest.approx(1 / math.sqrt(3), abs=1e-9)
    assert r.converged


def test_inner_single_edge():
    r = solve_inner(DataGraph(2, [(0, 1)]), 1.0, BoundParams(0, math.exp(-2)), CFG)
    assert r.b == pytest.approx(2.0) and r.p.tolist() == [1.0]


def test_inner_two_disjoint_edges():
    r = solve_inner(disjoint_edges(2), 0.5, BoundParams(0, 1), CFG)
    np.testing.assert_allclose(r.p, [0.5, 0.5], atol=1e-9)
    assert r.b == pytest.approx(0.707107, abs=1e-6)


def test_inner_errors():
    with pytest.raises(EmptyGraph):
        solve_inner(DataGraph(2, []), 1.0, BoundParams(), CFG)
    with pytest.raises(InfeasibleA):
        solve_inner(star_graph(3), 0.9, BoundParams(), CFG)


def test_inner_flags_iteration_cap():
    g = star_plus_matching(20)
    cfg = FptasConfig(epsilon=1e-6, inner_max_iters=1)
    with pytest.warns(NotConvergedWarning):
        r = solve_inner(g, 0.2, BoundParams(0, math.exp(-3)), cfg)
    assert not r.converged
    assert r.b_lower <= r.b


def _check_feasible(g, r, params, tol=1e-9):
    L = params.log_inv_delta
    p = r.p
    assert np.all(p >= -tol) and abs(p.sum() - 1) <= tol
    assert np.all(g.vertex_sums(p) <= r.a + tol) or r.a < solve_amin(g)[0] * (1 + 2e-9)
    assert np.all(L * p <= r.b + tol)
    assert np.all(np.sqrt(L * g.vertex_sums(p * p)) <= r.b + tol)
    assert np.linalg.norm(p) <= r.b + tol


@given(graphs(max_n=7, min_edges=1), st.floats(0, 1), st.sampled_from([1.0, 0.5, math.exp(-1), math.exp(-3)]),
       st.sampled_from([0.01, 0.05, 0.1]))
def test_inner_matches_conic_solver(g, frac, delta, eps):
    a_min, _ = solve_amin(g)
    a = a_min + frac * (1 - a_min)
    params = BoundParams(0, delta)
    cfg = FptasConfig(epsilon=eps)
    r = solve_inner(g, a, params, cfg, a_min=a_min)
    ref, _ = inner_optimum(g.n, g.edges, max(a, a_min * (1 + 1e-9)), delta)
    assert r.converged
    # certified: lower bound below the optimum, value within the relative tolerance
    assert r.b_lower <= ref * (1 + 1e-6)
    assert ref * (1 - 1e-6) <= r.b <= ref * (1 + cfg.inner_tol) + 1e-9
    _check_feasible(g, r, params)


def test_inner_deterministic():
    g = star_plus_matching(20)
    params = BoundParams(0.25, math.exp(-1))
    r1 = solve_inner(g, 0.3, params, CFG)
    r2 = solve_inner(g, 0.3, params, CFG)
    assert r1.p.tobytes() == r2.p.tobytes() and r1.b == r2.b


def test_inner_monotone_in_a():
    g = complete_graph(5)
    params = BoundParams(0, math.exp(-3))
    bs = [solve_inner(g, a, params, CFG).b for a in np.linspace(0.4, 1.0, 7)]
    for lo, hi in zip(bs[1:], bs[:-1]):
        assert lo <= hi * (1 + CFG.inner_tol)


def test_dual_bound_is_exact_at_kkt_point():
    # min sum p^2 over the simplex: multiplier t = 2/m, value 1/m
    d = np.ones(4)
    assert kernels.dual_bound(d, np.zeros(4)) == pytest.approx(0.25)
