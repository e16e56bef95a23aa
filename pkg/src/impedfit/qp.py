"""Dense quadratic programming for the estimator's subproblems.

minimize    0.5 x' H x + g' x
subject to  A x <= b,  lb <= x <= ub

`solve_qp` is a primal active-set method: box bounds fold into
inequality rows, a Phase-I linear program finds a feasible start when
one is not supplied, and each iteration solves an equality-constrained
KKT system over the current working set.  Blocking constraints are
provably independent of the working set (a dependent row a = A_W' y
would give a'p = y' A_W p = 0, never a positive directional
derivative), so the KKT matrix stays nonsingular while H is positive
definite.  Lowest-index tie-breaking keeps runs deterministic and
avoids cycling.

`projected_gradient_qp` is an intentionally separate route (dual
accelerated projected gradient) kept as a cross-check oracle; do not
merge the two implementations.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

__all__ = [
    "QPError",
    "QPInfeasibleError",
    "QPMaxIterationsError",
    "solve_qp",
    "projected_gradient_qp",
]


class QPError(RuntimeError):
    pass


class QPInfeasibleError(QPError):
    """No point satisfies the constraints; carries a certificate."""

    def __init__(self, max_violation: float, certificate_rows):
        self.max_violation = float(max_violation)
        self.certificate_rows = tuple(int(i) for i in certificate_rows)
        super().__init__(
            f"infeasible constraint system: best attainable max violation "
            f"{self.max_violation:.3e}; conflicting rows {self.certificate_rows}")


class QPMaxIterationsError(QPError):
    def __init__(self, iterations: int):
        self.iterations = iterations
        super().__init__(f"active-set method did not converge in {iterations} iterations")


# row count above which solve_qp switches to constraint generation, and
# how many violated rows each outer round may add
CG_THRESHOLD = 400
CG_BATCH = 50


def _symmetrize_pd(H: np.ndarray) -> np.ndarray:
    """Symmetric copy of H, regularized by +lam*I until Cholesky succeeds."""
    H = 0.5 * (H + H.T)
    dim = H.shape[0]
    lam = 1e-10 * max(np.trace(H) / dim, 1.0)
    for _ in range(40):
        try:
            np.linalg.cholesky(H)
            return H
        except np.linalg.LinAlgError:
            H = H + lam * np.eye(dim)
            lam *= 10.0
    raise QPError("could not regularize H to positive definite")


def _fold_rows(dim: int, A, b, lb, ub):
    """Stack general rows and box bounds into one A x <= b system."""
    rows = []
    rhs = []
    if A is not None:
        A = np.atleast_2d(np.asarray(A, dtype=np.float64))
        b = np.atleast_1d(np.asarray(b, dtype=np.float64))
        if A.shape != (b.size, dim):
            raise ValueError(f"A has shape {A.shape}, expected ({b.size}, {dim})")
        rows.append(A)
        rhs.append(b)
    if lb is not None:
        lb = np.broadcast_to(np.asarray(lb, dtype=np.float64), (dim,))
        mask = np.isfinite(lb)
        if mask.any():
            rows.append(-np.eye(dim)[mask])
            rhs.append(-lb[mask])
    if ub is not None:
        ub = np.broadcast_to(np.asarray(ub, dtype=np.float64), (dim,))
        mask = np.isfinite(ub)
        if mask.any():
            rows.append(np.eye(dim)[mask])
            rhs.append(ub[mask])
    if not rows:
        return np.zeros((0, dim)), np.zeros(0)
    return np.vstack(rows), np.concatenate(rhs)


def _phase_one(A: np.ndarray, b: np.ndarray, feas_tol: float) -> np.ndarray:
    """Feasible point via min s subject to A x - s <= b, s >= 0."""
    m, dim = A.shape
    c = np.zeros(dim + 1)
    c[-1] = 1.0
    A_ub = np.hstack([A, -np.ones((m, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=b,
                  bounds=[(None, None)] * dim + [(0.0, None)],
                  method="highs")
    if not res.success:
        raise QPError(f"phase-I linear program failed: {res.message}")
    s_star = float(res.x[-1])
    if s_star > feas_tol:
        duals = np.asarray(res.ineqlin.marginals)
        certificate = np.flatnonzero(np.abs(duals) > 1e-9)
        raise QPInfeasibleError(s_star, certificate)
    return res.x[:dim]


def solve_qp(H, g, A=None, b=None, lb=None, ub=None, x0=None, *,
             max_iters: int = 2000, feas_tol: float = 1e-9) -> np.ndarray:
    """Minimize 0.5 x'Hx + g'x over A x <= b and box bounds.

    Deterministic; raises :class:`QPInfeasibleError` with a conflicting
    row certificate when no feasible point exists and
    :class:`QPMaxIterationsError` if the working set fails to settle.
    """
    H = np.asarray(H, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64).ravel()
    dim = g.size
    if H.shape != (dim, dim):
        raise ValueError(f"H has shape {H.shape}, expected ({dim}, {dim})")
    A_all, b_all = _fold_rows(dim, A, b, lb, ub)
    m = A_all.shape[0]

    # Jacobi equilibration: unit-diagonal Hessian tames the raw monomial
    # and mixed-unit scales the estimator feeds in
    diag = np.diag(0.5 * (H + H.T)).copy()
    floor = 1e-12 * max(diag.max(), 0.0)
    scale = np.where(diag > floor, 1.0 / np.sqrt(np.maximum(diag, 1e-300)), 1.0)
    H = _symmetrize_pd(scale[:, None] * H * scale[None, :])
    g = g * scale
    A_all = A_all * scale[None, :]

    if m == 0:
        return np.linalg.solve(H, -g) * scale

    if x0 is not None:
        x = np.asarray(x0, dtype=np.float64).ravel() / scale
        if x.size != dim or np.max(A_all @ x - b_all) > feas_tol:
            x = _phase_one(A_all, b_all, feas_tol)
    else:
        x = _phase_one(A_all, b_all, feas_tol)

    if m <= CG_THRESHOLD:
        return _active_set(H, g, A_all, b_all, x, max_iters) * scale

    # constraint generation: a dense row set (sampled positivity grids)
    # makes the plain active set crawl one grid point per iteration, so
    # solve over a growing subset of worst-violated rows instead
    x_feas = x
    subset: list[int] = []
    in_subset = np.zeros(m, dtype=bool)
    x_inner = x_feas
    for _ in range(m + 1):
        sub = np.asarray(subset, dtype=int)
        x = _active_set(H, g, A_all[sub], b_all[sub], x_inner, max_iters)
        viol = A_all @ x - b_all
        if float(viol.max()) <= feas_tol:
            return x * scale
        order = np.argsort(-viol, kind="stable")
        fresh = [int(i) for i in order[:CG_BATCH]
                 if viol[i] > feas_tol and not in_subset[i]]
        subset.extend(fresh)
        in_subset[fresh] = True
        # start the next inner solve from the feasible blend toward x
        d = x - x_feas
        sub = np.asarray(subset, dtype=int)
        ad = A_all[sub] @ d
        slack = b_all[sub] - A_all[sub] @ x_feas
        pos = ad > 1e-30
        theta = min(1.0, float((slack[pos] / ad[pos]).min())) if pos.any() else 1.0
        x_inner = x_feas + max(theta, 0.0) * d
    raise QPMaxIterationsError(max_iters)


def _active_set(H, g, A_rows, b_rows, x, max_iters: int) -> np.ndarray:
    """Primal active-set core; `x` must already satisfy the rows."""
    m = A_rows.shape[0]
    if m == 0:
        return np.linalg.solve(H, -g)
    row_norms = np.maximum(np.linalg.norm(A_rows, axis=1), 1e-30)
    working: list[int] = []
    in_working = np.zeros(m, dtype=bool)
    # an unblocked full step lands exactly on the working set's subspace
    # minimizer, so the next step in the same working set is zero in exact
    # arithmetic; tracking that beats comparing |p| against roundoff noise
    at_optimum = False
    for _ in range(max_iters):
        grad = H @ x + g
        nw = len(working)
        if nw:
            # null-space step: rank-revealing SVD keeps the system solvable
            # even when working rows drift toward linear dependence; the
            # particular solution pulls active rows exactly onto their
            # boundary so roundoff cannot accumulate into infeasibility
            W = A_rows[working]
            resid = b_rows[working] - W @ x
            U, s, Vt = np.linalg.svd(W, full_matrices=True)
            rank = int(np.sum(s > max(s[0], 1e-30) * 1e-12)) if s.size else 0
            p_part = Vt[:rank].T @ ((U[:, :rank].T @ resid) / s[:rank])
            Z = Vt[rank:].T
            if Z.shape[1]:
                q = np.linalg.solve(Z.T @ H @ Z, -(Z.T @ (grad + H @ p_part)))
                p = p_part + Z @ q
            else:
                p = p_part
            mu = np.linalg.lstsq(W.T, -(grad + H @ p), rcond=None)[0]
        else:
            p = np.linalg.solve(H, -grad)
            mu = np.zeros(0)

        if at_optimum or np.linalg.norm(p) <= 1e-12 * max(1.0, np.linalg.norm(x)):
            at_optimum = False
            # lowest constraint index with a negative multiplier leaves
            # (Bland-style anti-cycling)
            neg = [j for j, v in enumerate(mu) if v < -1e-10]
            if not neg:
                return x
            leave = min(neg, key=lambda j: working[j])
            in_working[working.pop(leave)] = False
            continue

        advance = A_rows @ p
        limits = np.full(m, np.inf)
        threshold = 1e-11 * row_norms * np.linalg.norm(p)
        candidates = (advance > threshold) & ~in_working
        limits[candidates] = (b_rows[candidates] - A_rows[candidates] @ x) \
            / advance[candidates]
        blocking = int(np.argmin(limits))
        alpha = float(limits[blocking])
        if alpha >= 1.0:
            x = x + p
            at_optimum = True
        else:
            x = x + max(alpha, 0.0) * p
            working.append(blocking)
            in_working[blocking] = True
    raise QPMaxIterationsError(max_iters)


def projected_gradient_qp(H, g, A=None, b=None, lb=None, ub=None, *,
                          max_iters: int = 200_000,
                          tol: float = 1e-12) -> np.ndarray:
    """Reference solver for the same QP via its dual.

    The dual of the inequality-constrained QP is a nonnegatively
    constrained quadratic in the multipliers, minimized here with
    accelerated projected gradient (projection = clipping at zero);
    the primal solution is x = -H^{-1}(g + A' lambda).  Independent
    of :func:`solve_qp` by construction; used as a cross-check.
    """
    H = _symmetrize_pd(np.asarray(H, dtype=np.float64))
    g = np.asarray(g, dtype=np.float64).ravel()
    dim = g.size
    A_all, b_all = _fold_rows(dim, A, b, lb, ub)
    m = A_all.shape[0]

    Hinv_g = np.linalg.solve(H, g)
    if m == 0:
        return -Hinv_g

    Hinv_At = np.linalg.solve(H, A_all.T)
    M = A_all @ Hinv_At
    q = A_all @ Hinv_g + b_all
    step = 1.0 / max(float(np.linalg.eigvalsh(M)[-1]), 1e-12)

    lam = np.zeros(m)
    y = lam.copy()
    t = 1.0
    for _ in range(max_iters):
        grad = M @ y + q
        lam_next = np.maximum(y - step * grad, 0.0)
        if np.linalg.norm(lam_next - lam) <= tol * max(1.0, np.linalg.norm(lam)):
            lam = lam_next
            break
        # adaptive restart: drop the momentum whenever it points against
        # the last step, which restores fast convergence on degenerate duals
        if float((y - lam_next) @ (lam_next - lam)) > 0.0:
            t_next = 1.0
            y = lam_next.copy()
        else:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            y = lam_next + ((t - 1.0) / t_next) * (lam_next - lam)
        lam, t = lam_next, t_next
    return -np.linalg.solve(H, g + A_all.T @ lam)
