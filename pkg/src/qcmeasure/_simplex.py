"""Dense tableau simplex with Bland's rule, compiled with numba when available.

Standard form handled here: maximize c.x subject to A x <= b, x >= 0, where b
may have negative entries (phase one uses a single auxiliary variable).
"""
import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
ITERATION_CAP = 3

PIVOT_TOL = 1e-11
COST_TOL = 1e-11


@njit(cache=True)
def _pivot(T, basis, r, c):
    rows, cols = T.shape
    piv = T[r, c]
    for j in range(cols):
        T[r, j] /= piv
    T[r, c] = 1.0
    for i in range(rows):
        if i != r:
            f = T[i, c]
            if f != 0.0:
                for j in range(cols):
                    T[i, j] -= f * T[r, j]
                T[i, c] = 0.0
    basis[r] = c


@njit(cache=True)
def _iterate(T, basis, nactive, cap, used):
    """Run Bland pivots on T (objective in the last row). Returns (status, iterations)."""
    m = T.shape[0] - 1
    rhs = T.shape[1] - 1
    it = used
    while True:
        enter = -1
        for j in range(nactive):
            if T[m, j] > COST_TOL:
                enter = j
                break
        if enter < 0:
            return OPTIMAL, it
        if it >= cap:
            return ITERATION_CAP, it
        leave = -1
        best = np.inf
        for i in range(m):
            a = T[i, enter]
            if a > PIVOT_TOL:
                ratio = T[i, rhs] / a
                if leave < 0 or ratio < best - 1e-13 * max(1.0, abs(best)):
                    best = ratio
                    leave = i
                elif abs(ratio - best) <= 1e-13 * max(1.0, abs(best)) and basis[i] < basis[leave]:
                    leave = i
        if leave < 0:
            return UNBOUNDED, it
        _pivot(T, basis, leave, enter)
        it += 1


@njit(cache=True)
def simplex(A, b, c, feas_tol, cap):
    """Solve max c.x, A x <= b, x >= 0.

    Returns ``(status, value, x, iterations)``.
    """
    m, n = A.shape
    cols = n + m + 2  # x, slacks, auxiliary, rhs
    aux = n + m
    rhs = n + m + 1
    T = np.zeros((m + 1, cols))
    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        for j in range(n):
            T[i, j] = A[i, j]
        T[i, n + i] = 1.0
        T[i, aux] = -1.0
        T[i, rhs] = b[i]
        basis[i] = n + i
    x = np.zeros(n)
    it = 0

    worst = -1
    for i in range(m):
        if b[i] < 0.0 and (worst < 0 or b[i] < b[worst]):
            worst = i
    if worst >= 0:
        T[m, aux] = -1.0
        _pivot(T, basis, worst, aux)
        status, it = _iterate(T, basis, n + m + 1, cap, it)
        if status == ITERATION_CAP:
            return ITERATION_CAP, 0.0, x, it
        if T[m, rhs] > feas_tol:  # optimum of -aux is negative
            return INFEASIBLE, 0.0, x, it
        for i in range(m):
            if basis[i] == aux:
                for j in range(n + m):
                    if abs(T[i, j]) > PIVOT_TOL:
                        _pivot(T, basis, i, j)
                        break
                break
    for j in range(cols):
        T[m, j] = 0.0
    for j in range(n):
        T[m, j] = c[j]
    for i in range(m):
        k = basis[i]
        if k < n:
            f = T[m, k]
            if f != 0.0:
                for j in range(cols):
                    T[m, j] -= f * T[i, j]
                T[m, k] = 0.0
    status, it = _iterate(T, basis, n + m, cap, it)
    if status != OPTIMAL:
        return status, 0.0, x, it
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i, rhs]
    value = 0.0
    for j in range(n):
        value += c[j] * x[j]
    return OPTIMAL, value, x, it


@njit(cache=True)
def polar_dual_max(G, dual_is_linf, cap):
    """Max dual norm over the polar {c : |<c, g>| <= 1 for all rows g of G}.

    Returns ``inf`` when the polar is unbounded and ``-1.0`` on iteration cap.
    The polar is symmetric, so only one objective of each +/- pair is solved.
    """
    k, N = G.shape
    A = np.empty((2 * k, 2 * N))
    b = np.ones(2 * k)
    for i in range(k):
        for j in range(N):
            A[i, j] = G[i, j]
            A[i, N + j] = -G[i, j]
            A[k + i, j] = -G[i, j]
            A[k + i, N + j] = G[i, j]
    obj = np.zeros(2 * N)
    best = 0.0
    if dual_is_linf:
        for j in range(N):
            obj[:] = 0.0
            obj[j] = 1.0
            obj[N + j] = -1.0
            status, value, x, it = simplex(A, b, obj, 1e-10, cap)
            if status == UNBOUNDED:
                return np.inf
            if status != OPTIMAL:
                return -1.0
            if value > best:
                best = value
    else:
        npat = 1 << (N - 1)
        for p in range(npat):
            obj[0] = 1.0
            obj[N] = -1.0
            for j in range(1, N):
                sgn = -1.0 if (p >> (j - 1)) & 1 else 1.0
                obj[j] = sgn
                obj[N + j] = -sgn
            status, value, x, it = simplex(A, b, obj, 1e-10, cap)
            if status == UNBOUNDED:
                return np.inf
            if status != OPTIMAL:
                return -1.0
            if value > best:
                best = value
    return best


@njit(cache=True)
def grid_radii(P, X, dual_is_linf, zero_tol, cap):
    """Inscribed radius of absco{P_w x} for every row x of X.

    P is a (W, N, N) stack of products (identity included), X is (G, N).
    Generators with norm below ``zero_tol`` are dropped; a value of -1
    marks an iteration-cap failure at that grid point.
    """
    W, N, _ = P.shape
    G = X.shape[0]
    out = np.empty(G)
    pts = np.empty((W, N))
    for g in range(G):
        cnt = 0
        for w in range(W):
            s = 0.0
            for i in range(N):
                acc = 0.0
                for j in range(N):
                    acc += P[w, i, j] * X[g, j]
                pts[cnt, i] = acc
                s += abs(acc)
            if s > zero_tol:
                cnt += 1
        if cnt < N:
            out[g] = 0.0
            continue
        r = polar_dual_max(pts[:cnt], dual_is_linf, cap)
        if r < 0.0:
            out[g] = -1.0
        elif r == np.inf or r <= 0.0:
            out[g] = 0.0
        else:
            out[g] = 1.0 / r
    return out
