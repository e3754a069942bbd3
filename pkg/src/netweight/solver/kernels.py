"""Hot numeric kernels: polytope projection, the inner convex solve, the lattice
objective and the branch-and-bound search behind the brute-force oracle.

Every function here takes plain arrays. With numba enabled the functions are
compiled (``nogil``, so grid points can be solved from worker threads);
otherwise the identical source runs on numpy.

Edge distributions live on the polytope
``P_a = {p >= 0, sum(p) = 1, sum_{e ni i} p_e <= a for every vertex i}``.
"""

import numpy as np

from .._accel import jit, when_numba

# -- small helpers with a loop form (compiled) and a vectorized form ---------


def _vertex_sums_loop(x, eu, ev, n):
    out = np.zeros(n)
    for k in range(x.size):
        out[eu[k]] += x[k]
        out[ev[k]] += x[k]
    return out


def _vertex_sums_np(x, eu, ev, n):
    return np.bincount(eu, x, n) + np.bincount(ev, x, n)


vertex_sums = when_numba(_vertex_sums_loop, _vertex_sums_np)


def _halfspace_sweep_loop(x, alpha, a, order, ptr, idx, cptr, cedge, cown, cvptr):
    # cyclic projections onto {sum_{e ni i} x_e <= a}, with Dykstra increments
    # alpha[i] * indicator(E(i))
    for t in range(order.size):
        i = order[t]
        lo = ptr[i]
        hi = ptr[i + 1]
        deg = hi - lo
        s = alpha[i] * deg
        for k in range(lo, hi):
            s += x[idx[k]]
        new = (s - a) / deg
        if new < 0.0:
            new = 0.0
        step = alpha[i] - new
        if step != 0.0:
            for k in range(lo, hi):
                x[idx[k]] += step
        alpha[i] = new


def _halfspace_sweep_np(x, alpha, a, order, ptr, idx, cptr, cedge, cown, cvptr):
    # vertices of one color class share no edge, so their projections commute
    deg = np.diff(ptr)
    for c in range(cptr.size - 1):
        verts = order[cptr[c]:cptr[c + 1]]
        edges = cedge[cvptr[c]:cvptr[c + 1]]
        own = cown[cvptr[c]:cvptr[c + 1]]
        dv = deg[verts]
        s = np.bincount(own, x[edges], verts.size) + alpha[verts] * dv
        new = np.maximum((s - a) / dv, 0.0)
        x[edges] += (alpha[verts] - new)[own]
        alpha[verts] = new


halfspace_sweep = when_numba(_halfspace_sweep_loop, _halfspace_sweep_np)


@jit
def project_simplex(y):
    """Euclidean projection onto the probability simplex (sort-based)."""
    m = y.size
    u = np.sort(y)[::-1]
    css = np.cumsum(u)
    rho = 0
    for j in range(m):
        if u[j] - (css[j] - 1.0) / (j + 1.0) > 0.0:
            rho = j
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(y - theta, 0.0)


@jit
def project_polytope(y, zs, alpha, a, eu, ev, n, order, ptr, idx, cptr, cedge, cown, cvptr,
                     tol, max_sweeps):
    """Dykstra's alternating projections of ``y`` onto P_a.

    ``zs`` (simplex increment, length m) and ``alpha`` (per-vertex halfspace
    multipliers) are updated in place; passing the increments from a nearby
    projection warm-starts the dual block-coordinate ascent that Dykstra's
    method performs. Returns ``(x, sweeps, violation)``; ``x`` always lies on
    the simplex and ``violation`` is the largest vertex-sum excess over ``a``.
    """
    m = y.size
    x = y - zs
    # x = y - zs - sum_i alpha_i * 1_{E(i)}
    x -= alpha[eu] + alpha[ev]
    viol = np.inf
    sweeps = 0
    for sweep in range(max_sweeps):
        sweeps = sweep + 1
        x_prev = x.copy()
        halfspace_sweep(x, alpha, a, order, ptr, idx, cptr, cedge, cown, cvptr)
        tmp = x + zs
        x = project_simplex(tmp)
        for k in range(m):
            zs[k] = tmp[k] - x[k]
        viol = np.max(vertex_sums(x, eu, ev, n)) - a
        change = np.max(np.abs(x - x_prev))
        if viol <= tol and change <= tol:
            break
    if viol < 0.0:
        viol = 0.0
    return x, sweeps, viol


# -- inner convex program ----------------------------------------------------
#
# g(p) = max(||p||_2, sqrt(L) max_i ||p_{E(i)}||_2, L max_e p_e) is handled
# through its square G = g^2 = max_j Q_j(p), a max of diagonal quadratics:
#   Q_0 = sum_e p_e^2,  Q_i = L sum_{e ni i} p_e^2,  Q_e = L^2 p_e^2.


@jit
def spread(p, eu, ev, n, L):
    """g(p) = max(||p||_2, ||p||_max sqrt(L), ||p||_inf L)."""
    b = np.sqrt(np.sum(p * p))
    if L > 0.0:
        vm = np.sqrt(np.max(vertex_sums(p * p, eu, ev, n)))
        b = max(b, vm * np.sqrt(L), np.max(p) * L)
    return b


@jit
def _pieces(p, eu, ev, n, L):
    m = p.size
    if L > 0.0:
        q = np.empty(1 + n + m)
        sq = p * p
        q[0] = np.sum(sq)
        q[1:1 + n] = L * vertex_sums(sq, eu, ev, n)
        q[1 + n:] = (L * L) * sq
        return q
    q = np.empty(1)
    q[0] = np.sum(p * p)
    return q


@jit
def _smoothed(q, mu):
    # returns (G_mu, weights) with G_mu = mu log sum exp(q/mu)
    qmax = np.max(q)
    if q.size == 1:
        lam = np.ones(1)
        return qmax, lam
    z = np.exp((q - qmax) / mu)
    tot = np.sum(z)
    return qmax + mu * np.log(tot), z / tot


@jit
def _diag_weights(lam, eu, ev, n, L, m):
    # d_e such that sum_j lam_j Q_j(p) = sum_e d_e p_e^2
    if L > 0.0:
        lv = lam[1:1 + n]
        return lam[0] + L * (lv[eu] + lv[ev]) + (L * L) * lam[1 + n:]
    return np.full(m, lam[0])


@jit
def dual_bound(d, r):
    """Edge part of the Lagrangian dual of min_{P_a} sum_e d_e p_e^2.

    For vertex multipliers rho >= 0 and ``r_e = rho_u + rho_v`` the dual value
    is ``max_t  t - sum_e max(0, t - r_e)^2 / (4 d_e)`` minus ``a sum(rho)``;
    this returns the first part with the optimal ``t``. Requires ``d > 0``.
    """
    m = d.size
    order = np.argsort(r)
    rs = r[order]
    w = 1.0 / (2.0 * d[order])
    # solve sum_e max(0, t - r_e) / (2 d_e) = 1 for t (piecewise linear, increasing)
    sw = 0.0
    swr = 0.0
    t = rs[m - 1]
    for j in range(m):
        sw += w[j]
        swr += w[j] * rs[j]
        t = (1.0 + swr) / sw
        if j == m - 1 or t <= rs[j + 1]:
            break
    pen = 0.0
    for j in range(m):
        gap = t - rs[j]
        if gap > 0.0:
            pen += gap * gap * w[j] * 0.5
    return t - pen


@jit
def _certificate(p, eu, ev, n, L, mu, rho_v, a):
    # lower bound on min_{P_a} G from the softmax weights at p
    m = p.size
    q = _pieces(p, eu, ev, n, L)
    _, lam = _smoothed(q, mu)
    d = _diag_weights(lam, eu, ev, n, L, m)
    # d may underflow to 0; raising it by `tiny` lowers the bound by at most
    # tiny * sum(p^2) <= tiny, which is subtracted back
    tiny = 1e-12 * np.max(d) + 1e-300
    r = rho_v[eu] + rho_v[ev]
    return dual_bound(d + tiny, r) - tiny - a * np.sum(rho_v)


@jit
def inner_solve(eu, ev, n, order, ptr, idx, cptr, cedge, cown, cvptr,
                a, L, tol, max_iters, proj_tol, proj_sweeps):
    """Minimize g over P_a by accelerated projected gradient on a log-sum-exp
    smoothing of g^2, with continuation on the smoothing width.

    Returns ``(p, b, b_lower, converged, iterations, violation)`` where
    ``b = g(p)`` and ``b_lower`` is a certified lower bound on min g.
    """
    m = eu.size
    nj = 1 + n + m if L > 0.0 else 1
    logj = np.log(nj)
    zs = np.zeros(m)
    alpha = np.zeros(n)
    x, sw, viol = project_polytope(np.full(m, 1.0 / m), zs, alpha, a, eu, ev, n, order, ptr,
                                   idx, cptr, cedge, cown, cvptr, proj_tol, proj_sweeps)
    best_p = x.copy()
    best_b = spread(x, eu, ev, n, L)
    best_viol = viol
    # trivial bounds: ||p||_2 >= 1/sqrt(m), max_e p_e >= 1/m
    lb_sq = max(1.0 / m, (L / m) ** 2)
    iters = 0
    converged = False
    # target relative gap on G = g^2
    g_tol = 1.0 - (1.0 - tol) ** 2
    gx = best_b * best_b
    mu = 0.25 * gx / max(logj, 1.0)
    step = 0.5 / (1.0 + L) ** 2
    rho_v = np.zeros(n)
    while iters < max_iters:
        # one continuation stage of FISTA with backtracking and function restart
        y = x.copy()
        t = 1.0
        fx, _ = _smoothed(_pieces(x, eu, ev, n, L), mu)
        stage_iters = 0
        while iters < max_iters:
            iters += 1
            stage_iters += 1
            qy = _pieces(y, eu, ev, n, L)
            fy, lam = _smoothed(qy, mu)
            grad = 2.0 * _diag_weights(lam, eu, ev, n, L, m) * y
            while True:
                z, sw, viol = project_polytope(y - step * grad, zs, alpha, a, eu, ev, n, order,
                                               ptr, idx, cptr, cedge, cown, cvptr,
                                               proj_tol, proj_sweeps)
                fz, _ = _smoothed(_pieces(z, eu, ev, n, L), mu)
                diff = z - y
                model = fy + np.dot(grad, diff) + np.dot(diff, diff) / (2.0 * step)
                if fz <= model + 1e-15 * max(1.0, abs(fy)):
                    break
                step *= 0.5
            rho_v = alpha / step
            if fz > fx + 1e-14 * abs(fx):
                # momentum overshoot: restart from the last accepted point
                y = x.copy()
                t = 1.0
                move = 1.0
            else:
                t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
                y = z + ((t - 1.0) / t_next) * (z - x)
                move = np.max(np.abs(z - x))
                x = z
                fx = fz
                t = t_next
                step *= 1.05
            if stage_iters % 10 == 0 or move <= 1e-13:
                b = spread(x, eu, ev, n, L)
                if b < best_b:
                    best_b = b
                    best_p = x.copy()
                    best_viol = viol
                lb_sq = max(lb_sq, _certificate(x, eu, ev, n, L, mu, rho_v, a))
                lb_sq = max(lb_sq, _certificate(x, eu, ev, n, L, mu, np.zeros(n), a))
                if lb_sq >= (1.0 - g_tol) * best_b * best_b:
                    converged = True
                    break
                if move <= 1e-13 or stage_iters >= 400:
                    break
        if converged:
            break
        # tighten the smoothing for the next stage
        gx = best_b * best_b
        mu = max(min(0.25 * mu, 0.25 * g_tol * gx / max(logj, 1.0)), 1e-15 * gx)
        if nj == 1 and stage_iters < 400:
            # a single quadratic has no smoothing error left to remove
            break
    b_lower = np.sqrt(lb_sq)
    return best_p, best_b, min(b_lower, best_b), converged, iters, best_viol


# -- lattice objective and branch-and-bound ----------------------------------


@jit
def objective_point(p, eu, ev, n, gamma, L):
    """a(p)^gamma + g(p) with a(p) the max vertex sum."""
    sums = vertex_sums(p, eu, ev, n)
    return np.max(sums) ** gamma + spread(p, eu, ev, n, L)


@jit
def _lin_range(c, plo, phi):
    # min and max over the box of c @ p with the last coordinate eliminated
    d = plo.size
    last = c[d]
    lo = last
    hi = last
    for k in range(d):
        coef = c[k] - last
        if coef >= 0.0:
            lo += coef * plo[k]
            hi += coef * phi[k]
        else:
            lo += coef * phi[k]
            hi += coef * plo[k]
    return lo, hi


@jit
def _max_of_linear_lb(C, plo, phi):
    # lower bound on min over the box of max_j C[j] @ p: best singleton, then
    # the uniform mix of every piece that can still be the maximum
    nj = C.shape[0]
    los = np.empty(nj)
    his = np.empty(nj)
    for j in range(nj):
        los[j], his[j] = _lin_range(C[j], plo, phi)
    lb = np.max(los)
    mix = np.zeros(C.shape[1])
    cnt = 0
    for j in range(nj):
        if his[j] >= lb:
            mix += C[j]
            cnt += 1
    if cnt > 1:
        mlo, _ = _lin_range(mix / cnt, plo, phi)
        if mlo > lb:
            lb = mlo
    return lb


@jit
def box_lower_bound(lo, hi, K, inc, eu, ev, n, gamma, L):
    """Lower bound of a(p)^gamma + g(p) over lattice points of a box.

    The box fixes integer ranges for the first m-1 coordinates (in units of
    1/K); the last is 1 minus the rest. Both a and g are maxima of convex
    pieces; each piece is replaced by a linear minorant (exact for vertex
    sums, tangent planes at the box center for the norms).
    """
    d = lo.size
    m = d + 1
    plo = lo / K
    phi = hi / K
    a_lb = _max_of_linear_lb(inc, plo, phi)
    a_lb = max(a_lb, 0.0)
    q = np.empty(m)
    q[:d] = 0.5 * (plo + phi)
    q[d] = max(1.0 - np.sum(q[:d]), 0.0)
    npieces = 1 + (n + m if L > 0.0 else 0)
    C = np.zeros((npieces, m))
    nq = np.sqrt(np.sum(q * q))
    if nq > 0.0:
        C[0] = q / nq
    if L > 0.0:
        sl = np.sqrt(L)
        for i in range(n):
            s2 = 0.0
            for k in range(m):
                if inc[i, k] > 0.0:
                    s2 += q[k] * q[k]
            if s2 > 0.0:
                r = sl / np.sqrt(s2)
                for k in range(m):
                    if inc[i, k] > 0.0:
                        C[1 + i, k] = q[k] * r
        for k in range(m):
            C[1 + n + k, k] = L
    g_lb = _max_of_linear_lb(C, plo, phi)
    g_lb = max(g_lb, 1.0 / np.sqrt(m))
    return a_lb ** gamma + g_lb


@jit
def _eval_lattice(x, K, eu, ev, n, gamma, L):
    return objective_point(x / K, eu, ev, n, gamma, L)


@jit
def _feasible_point(lo, hi, K):
    # lattice point of the box near its center with coordinate sum <= K
    d = lo.size
    x = np.empty(d + 1)
    tot = 0.0
    for k in range(d):
        x[k] = np.floor(0.5 * (lo[k] + hi[k]))
        tot += x[k]
    k = 0
    while tot > K and k < d:
        cut = min(x[k] - lo[k], tot - K)
        x[k] -= cut
        tot -= cut
        k += 1
    x[d] = K - tot
    return x


@jit
def branch_and_bound(eu, ev, n, inc, K, gamma, L, leaf_size, max_boxes, tol):
    """Exact minimum of a^gamma + g over {p = x/K : x integer >= 0, sum x = K}.

    Depth-first branch and bound; a box is discarded only when its lower
    bound exceeds the incumbent by more than ``tol``, so the returned value
    is the lattice minimum up to ``tol``. Returns
    ``(value, x, boxes, points, complete)``.
    """
    m = eu.size
    d = m - 1
    best_x = np.zeros(m)
    if d == 0:
        best_x[0] = K
        return _eval_lattice(best_x, K, eu, ev, n, gamma, L), best_x, 0, 1, True
    cap = 64 * d + 64
    slo = np.zeros((cap, d))
    shi = np.zeros((cap, d))
    top = 0
    slo[0, :] = 0.0
    shi[0, :] = K
    top = 1
    # incumbent: the lattice point nearest the uniform distribution
    u = np.floor(np.full(m, K / m))
    u[d] = K - np.sum(u[:d])
    best_x[:] = u
    best = _eval_lattice(u, K, eu, ev, n, gamma, L)
    boxes = 0
    points = 1
    complete = True
    cur = np.empty(d)
    x = np.empty(m)
    while top > 0:
        top -= 1
        lo = slo[top].copy()
        hi = shi[top].copy()
        boxes += 1
        if boxes > max_boxes:
            complete = False
            break
        if box_lower_bound(lo, hi, K, inc, eu, ev, n, gamma, L) > best + tol:
            continue
        vol = 1.0
        widest = 0
        for k in range(d):
            vol *= hi[k] - lo[k] + 1.0
            if hi[k] - lo[k] > hi[widest] - lo[widest]:
                widest = k
        if vol <= leaf_size:
            # enumerate every lattice point of the box
            cur[:] = lo
            while True:
                tot = np.sum(cur)
                if tot <= K:
                    x[:d] = cur
                    x[d] = K - tot
                    val = _eval_lattice(x, K, eu, ev, n, gamma, L)
                    points += 1
                    if val < best:
                        best = val
                        best_x[:] = x
                k = 0
                while k < d:
                    cur[k] += 1.0
                    if cur[k] <= hi[k]:
                        break
                    cur[k] = lo[k]
                    k += 1
                if k == d:
                    break
            continue
        xp = _feasible_point(lo, hi, K)
        val = _eval_lattice(xp, K, eu, ev, n, gamma, L)
        points += 1
        if val < best:
            best = val
            best_x[:] = xp
        mid = np.floor(0.5 * (lo[widest] + hi[widest]))
        # upper half first so the lower half is explored next
        base = np.sum(lo)
        upper_lo = mid + 1.0
        if base - lo[widest] + upper_lo <= K:
            slo[top] = lo
            shi[top] = hi
            slo[top, widest] = upper_lo
            _tighten(slo[top], shi[top], K)
            top += 1
        slo[top] = lo
        shi[top] = hi
        shi[top, widest] = mid
        _tighten(slo[top], shi[top], K)
        top += 1
    return best, best_x, boxes, points, complete


@jit
def _tighten(lo, hi, K):
    # no coordinate can exceed K minus the other lower bounds
    base = np.sum(lo)
    for k in range(lo.size):
        cap = K - (base - lo[k])
        if hi[k] > cap:
            hi[k] = cap
