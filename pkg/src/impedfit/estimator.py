"""Constrained least-squares estimation of impedance parameters.

Given one gait cycle of (angle, velocity, torque) samples, find
polynomial stiffness/damping coefficients and per-section equilibrium
angles minimizing the Euclidean torque error, subject to

  * K(t) >= 0 and D(t) >= 0, sampled on a dense phase grid,
  * K(0) = K(1) and D(0) = D(1), structural (swing value = constant term),
  * |delta tau / delta t| <= c across consecutive samples (torque rate).

The problem is biconvex: torque is linear in the coefficients at fixed
equilibria and linear in the equilibria at fixed coefficients.  `solve`
alternates the two inequality-constrained least-squares subproblems
(each a small QP).  The torque-rate rows are imposed in both half-steps
so the incumbent stays feasible; the subproblems therefore never turn
infeasible and the recorded costs are non-increasing.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace

import numpy as np

from impedfit import qp
from impedfit.gait_data import GaitCycleData
from impedfit.impedance import (
    EquilibriumSchedule,
    ImpedanceParameters,
    ImpedanceProfile,
    ValidationReport,
    ConstraintCheck,
    validate,
)

__all__ = [
    "EstimationProblem",
    "EstimationResult",
    "EstimationError",
    "build_problem",
    "solve",
    "multi_start",
    "order_sweep",
    "fit_cost",
    "lipschitz_margin",
    "result_to_dict",
    "result_from_dict",
    "save_result_json",
    "load_result_json",
    "save_trace_csv",
]

DEFAULT_ORDER = 4
DEFAULT_ANGLE_BOUND = 0.5
DEFAULT_GRID_N = 1001
DEFAULT_TOL_REL = 1e-8
DEFAULT_MAX_ITERS = 200
FEAS_TOL = 1e-9


class EstimationError(RuntimeError):
    pass


@dataclass(frozen=True)
class EstimationProblem:
    """One constrained least-squares instance over a gait cycle."""

    data: GaitCycleData
    boundaries: np.ndarray
    label: str | None
    stiffness_order: int
    damping_order: int
    stance_end: float
    lipschitz_c: float
    angle_bounds: np.ndarray          # (n_sections, 2) [lo, hi] radians
    fit_window: tuple[float, float]
    constraint_grid_n: int

    def __post_init__(self):
        if self.stiffness_order < 0 or self.damping_order < 0:
            raise ValueError("polynomial orders must be >= 0")
        if not (0.0 < self.stance_end < 1.0):
            raise ValueError(f"stance_end must lie in (0, 1), got {self.stance_end}")
        if self.lipschitz_c <= 0.0:
            raise ValueError(f"lipschitz_c must be > 0, got {self.lipschitz_c}")
        if self.constraint_grid_n < 2:
            raise ValueError("constraint_grid_n must be >= 2")
        a, b = self.fit_window
        if not (0.0 <= a < b <= 1.0):
            raise ValueError(f"fit_window must satisfy 0 <= a < b <= 1, got {a}:{b}")
        bounds = np.asarray(self.angle_bounds, dtype=np.float64)
        if bounds.shape != (self.n_sections, 2):
            raise ValueError(
                f"angle_bounds must have shape ({self.n_sections}, 2), got {bounds.shape}")
        if np.any(bounds[:, 0] > bounds[:, 1]):
            raise ValueError("angle bounds need lo <= hi per section")
        bounds.flags.writeable = False
        object.__setattr__(self, "angle_bounds", bounds)
        mask = self.window_mask()
        if mask.sum() < 2:
            raise ValueError("fit window must contain at least 2 samples")

    @property
    def n_sections(self) -> int:
        return len(self.boundaries) - 1

    def window_mask(self) -> np.ndarray:
        a, b = self.fit_window
        t = self.data.phase
        return (t >= a) & (t <= b)


@dataclass(frozen=True)
class EstimationResult:
    params: ImpedanceParameters
    cost: float
    iterations: int
    converged: bool
    constraint_report: ValidationReport
    solver_trace: tuple[tuple[int, float, float], ...] = field(default_factory=tuple)

    @property
    def feasible(self) -> bool:
        return self.constraint_report.worst_violation <= FEAS_TOL


def default_lipschitz(data: GaitCycleData) -> float:
    """Twice the steepest torque rate in the data (the data must be feasible)."""
    rates = np.abs(np.diff(data.torque) / np.diff(data.phase))
    return max(2.0 * float(rates.max()), 1e-6)


def build_problem(data: GaitCycleData, boundaries, *, label: str | None = None,
                  stiffness_order: int | None = None,
                  damping_order: int | None = None,
                  stance_end: float = 0.63,
                  lipschitz_c: float | None = None,
                  angle_bounds=None,
                  fit_window: tuple[float, float] = (0.0, 1.0),
                  constraint_grid_n: int = DEFAULT_GRID_N) -> EstimationProblem:
    """Fill defaults and assemble a validated problem instance."""
    boundaries = np.asarray(boundaries, dtype=np.float64)
    # reuse the schedule type's boundary validation
    EquilibriumSchedule(boundaries=boundaries,
                        angles=np.zeros(len(boundaries) - 1), label=label)
    boundaries.flags.writeable = False
    n_sections = len(boundaries) - 1
    if angle_bounds is None:
        bounds = np.tile([-DEFAULT_ANGLE_BOUND, DEFAULT_ANGLE_BOUND], (n_sections, 1))
    else:
        bounds = np.asarray(angle_bounds, dtype=np.float64)
        if bounds.shape == (2,):
            bounds = np.tile(bounds, (n_sections, 1))
    return EstimationProblem(
        data=data,
        boundaries=boundaries,
        label=label,
        stiffness_order=DEFAULT_ORDER if stiffness_order is None else int(stiffness_order),
        damping_order=DEFAULT_ORDER if damping_order is None else int(damping_order),
        stance_end=float(stance_end),
        lipschitz_c=default_lipschitz(data) if lipschitz_c is None else float(lipschitz_c),
        angle_bounds=bounds,
        fit_window=(float(fit_window[0]), float(fit_window[1])),
        constraint_grid_n=int(constraint_grid_n),
    )


def _basis_matrix(t: np.ndarray, order: int, stance_end: float) -> np.ndarray:
    """Rows of phase powers; swing rows collapse to the constant term."""
    P = np.zeros((t.size, order + 1))
    stance = t < stance_end
    P[~stance, 0] = 1.0
    P[stance] = t[stance, None] ** np.arange(order + 1)
    return P


def _section_onehot(boundaries: np.ndarray, t: np.ndarray) -> np.ndarray:
    idx = np.clip(np.searchsorted(boundaries, t, side="right") - 1,
                  0, len(boundaries) - 2)
    S = np.zeros((t.size, len(boundaries) - 1))
    S[np.arange(t.size), idx] = 1.0
    return S


class _Workspace:
    """Per-solve precomputation shared by both alternation half-steps."""

    def __init__(self, prob: EstimationProblem):
        d = prob.data
        self.prob = prob
        self.t = d.phase
        self.mask = prob.window_mask()
        self.Pk = _basis_matrix(self.t, prob.stiffness_order, prob.stance_end)
        self.Pd = _basis_matrix(self.t, prob.damping_order, prob.stance_end)
        self.S = _section_onehot(prob.boundaries, self.t)
        grid = np.linspace(0.0, 1.0, prob.constraint_grid_n)
        # positivity is imposed at the stance points of the same uniform
        # grid the validation report samples; every swing point shares the
        # t = 0 row because the swing basis is the constant term
        stance_pts = grid[grid < prob.stance_end]
        self.Gk = _basis_matrix(stance_pts, prob.stiffness_order, prob.stance_end)
        self.Gd = _basis_matrix(stance_pts, prob.damping_order, prob.stance_end)
        self.dt = np.diff(self.t)
        self.nk = prob.stiffness_order + 1
        self.nd = prob.damping_order + 1

    def torque_of(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        K = self.Pk @ x[:self.nk]
        D = self.Pd @ x[self.nk:]
        eq = self.S @ z
        d = self.prob.data
        return K * (d.angle - eq) + D * d.velocity

    def cost_of(self, x: np.ndarray, z: np.ndarray) -> float:
        r = self.torque_of(x, z) - self.prob.data.torque
        return float(np.linalg.norm(r[self.mask]))

    def worst_violation_of(self, x: np.ndarray, z: np.ndarray) -> float:
        K = self.Gk @ x[:self.nk]
        D = self.Gd @ x[self.nk:]
        pos = max(0.0, -float(min(K.min(), D.min())))
        tau = self.torque_of(x, z)
        lip = float(np.max(np.abs(np.diff(tau)) / self.dt)) - self.prob.lipschitz_c
        return max(pos, lip, 0.0)

    def coeff_step(self, z: np.ndarray, x_prev: np.ndarray) -> np.ndarray:
        """Half-step (a): equilibria fixed, coefficients by QP."""
        d = self.prob.data
        eq = self.S @ z
        B = np.hstack([self.Pk * (d.angle - eq)[:, None],
                       self.Pd * d.velocity[:, None]])
        Bw = B[self.mask]
        y = d.torque[self.mask]
        H = Bw.T @ Bw
        g = -(Bw.T @ y)
        dim = self.nk + self.nd
        zeros_k = np.zeros((self.Gk.shape[0], self.nd))
        zeros_d = np.zeros((self.Gd.shape[0], self.nk))
        dB = np.diff(B, axis=0)
        lim = self.prob.lipschitz_c * self.dt
        A = np.vstack([
            np.hstack([-self.Gk, zeros_k]),
            np.hstack([zeros_d, -self.Gd]),
            dB,
            -dB,
        ])
        b = np.concatenate([
            np.zeros(self.Gk.shape[0] + self.Gd.shape[0]),
            lim,
            lim,
        ])
        x0 = x_prev if x_prev.size == dim else np.zeros(dim)
        return qp.solve_qp(H, g, A, b, x0=x0)

    def joint_step(self, x: np.ndarray, z: np.ndarray, cost: float):
        """Safeguarded Gauss-Newton move in coefficients and angles together.

        The alternation crawls once it reaches the nearly flat valley the
        K/theta_eq trade-off creates, because each half-step only moves
        along its own axis.  One joint step on the linearized residual
        cuts straight along the valley; positivity rows are exact (linear
        in the step), the torque-rate rows are linearized, and halving
        the step until the true cost drops and the true constraints hold
        keeps the incumbent feasible and the trace monotone.
        """
        d = self.prob.data
        K = self.Pk @ x[:self.nk]
        Dv = self.Pd @ x[self.nk:]
        eq = self.S @ z
        nz = self.S.shape[1]
        J = np.hstack([self.Pk * (d.angle - eq)[:, None],
                       self.Pd * d.velocity[:, None],
                       -K[:, None] * self.S])
        tau = K * (d.angle - eq) + Dv * d.velocity
        r = tau - d.torque
        Jw = J[self.mask]
        H = Jw.T @ Jw
        g = Jw.T @ r[self.mask]
        zk = np.zeros((self.Gk.shape[0], self.nd + nz))
        zd = np.zeros((self.Gd.shape[0], nz))
        dJ = np.diff(J, axis=0)
        dtau = np.diff(tau)
        lim = self.prob.lipschitz_c * self.dt
        A = np.vstack([
            np.hstack([-self.Gk, zk]),
            np.hstack([np.zeros((self.Gd.shape[0], self.nk)), -self.Gd, zd]),
            dJ,
            -dJ,
        ])
        b = np.concatenate([
            self.Gk @ x[:self.nk],
            self.Gd @ x[self.nk:],
            lim - dtau,
            lim + dtau,
        ])
        inf = np.full(self.nk + self.nd, np.inf)
        lb = np.concatenate([-inf, self.prob.angle_bounds[:, 0] - z])
        ub = np.concatenate([inf, self.prob.angle_bounds[:, 1] - z])
        try:
            step = qp.solve_qp(H, g, A, b, lb=lb, ub=ub,
                               x0=np.zeros(self.nk + self.nd + nz))
        except qp.QPError:
            return x, z, cost
        lo, hi = self.prob.angle_bounds[:, 0], self.prob.angle_bounds[:, 1]
        for _ in range(8):
            xt = x + step[:self.nk + self.nd]
            zt = z + step[self.nk + self.nd:]
            ct = self.cost_of(xt, zt)
            if (np.isfinite(ct) and ct < cost
                    and not np.any(zt < lo) and not np.any(zt > hi)
                    and self.worst_violation_of(xt, zt) <= FEAS_TOL):
                return xt, zt, ct
            step = 0.5 * step
        return x, z, cost

    def angle_step(self, x: np.ndarray, z_prev: np.ndarray) -> np.ndarray:
        """Half-step (b): coefficients fixed, equilibria by box QP."""
        d = self.prob.data
        K = self.Pk @ x[:self.nk]
        D = self.Pd @ x[self.nk:]
        u = K * d.angle + D * d.velocity     # torque at z = 0
        C = -K[:, None] * self.S
        Cw = C[self.mask]
        y = (d.torque - u)[self.mask]
        H = Cw.T @ Cw
        g = -(Cw.T @ y)
        dC = np.diff(C, axis=0)
        du = np.diff(u)
        lim = self.prob.lipschitz_c * self.dt
        A = np.vstack([dC, -dC])
        b = np.concatenate([lim - du, lim + du])
        bounds = self.prob.angle_bounds
        return qp.solve_qp(H, g, A, b, lb=bounds[:, 0], ub=bounds[:, 1], x0=z_prev)


def _initial_state(prob: EstimationProblem, ws: _Workspace,
                   init: ImpedanceParameters | None, seed: int):
    if init is None:
        rng = np.random.default_rng(seed)
        lo, hi = prob.angle_bounds[:, 0], prob.angle_bounds[:, 1]
        z = rng.uniform(lo, hi)
        x = np.zeros(ws.nk + ws.nd)
        return x, z
    if init.stiffness.order > prob.stiffness_order:
        raise EstimationError(
            f"init stiffness order {init.stiffness.order} exceeds problem order "
            f"{prob.stiffness_order}")
    if init.damping.order > prob.damping_order:
        raise EstimationError(
            f"init damping order {init.damping.order} exceeds problem order "
            f"{prob.damping_order}")
    if init.schedule.n_sections != prob.n_sections:
        raise EstimationError(
            f"init has {init.schedule.n_sections} sections, problem has "
            f"{prob.n_sections}")
    x = np.zeros(ws.nk + ws.nd)
    x[:init.stiffness.coeffs.size] = init.stiffness.coeffs
    x[ws.nk:ws.nk + init.damping.coeffs.size] = init.damping.coeffs
    z = np.clip(init.schedule.angles,
                prob.angle_bounds[:, 0], prob.angle_bounds[:, 1])
    return x, z


def _pack_result(prob: EstimationProblem, ws: _Workspace, x: np.ndarray,
                 z: np.ndarray, iterations: int, converged: bool,
                 trace: list[tuple[int, float, float]]) -> EstimationResult:
    params = ImpedanceParameters(
        stiffness=ImpedanceProfile(coeffs=x[:ws.nk], stance_end=prob.stance_end),
        damping=ImpedanceProfile(coeffs=x[ws.nk:], stance_end=prob.stance_end),
        schedule=EquilibriumSchedule(boundaries=prob.boundaries, angles=z,
                                     label=prob.label),
    )
    report = validate(params, grid_n=prob.constraint_grid_n)
    tau = ws.torque_of(x, z)
    margin = lipschitz_margin(tau, ws.t, prob.lipschitz_c)
    checks = report.checks + (
        ConstraintCheck("torque_rate", margin <= FEAS_TOL, max(margin, 0.0),
                        None),
    )
    return EstimationResult(
        params=params,
        cost=ws.cost_of(x, z),
        iterations=iterations,
        converged=converged,
        constraint_report=ValidationReport(checks),
        solver_trace=tuple(trace),
    )


def _extrapolate(ws: _Workspace, x: np.ndarray, z: np.ndarray,
                 dx: np.ndarray, dz: np.ndarray, cost: float):
    """Largest improving feasible step along the last alternation direction.

    The biconvex zigzag advances along a nearly fixed ray with a
    geometric tail; doubling the step while the true cost keeps
    falling collapses hundreds of plain iterations into a few, and
    rejecting any candidate that leaves the constraint set keeps the
    incumbent feasible and the trace monotone.
    """
    lo = ws.prob.angle_bounds[:, 0]
    hi = ws.prob.angle_bounds[:, 1]
    best_s = 0.0
    best_cost = cost
    s = 1.0
    while s <= 1024.0:
        zt = z + s * dz
        if np.any(zt < lo) or np.any(zt > hi):
            break
        xt = x + s * dx
        ct = ws.cost_of(xt, zt)
        if not np.isfinite(ct) or ct >= best_cost:
            break
        if ws.worst_violation_of(xt, zt) > FEAS_TOL:
            break
        best_s, best_cost = s, ct
        s *= 2.0
    if best_s == 0.0:
        return x, z, cost
    return x + best_s * dx, z + best_s * dz, best_cost


def solve(prob: EstimationProblem, init: ImpedanceParameters | None = None,
          seed: int = 0, *, tol_rel: float = DEFAULT_TOL_REL,
          max_iters: int = DEFAULT_MAX_ITERS) -> EstimationResult:
    """Alternating minimization; deterministic given (prob, init, seed)."""
    ws = _Workspace(prob)
    x, z = _initial_state(prob, ws, init, seed)
    trace: list[tuple[int, float, float]] = []
    prev_cost = np.inf
    converged = False
    iterations = 0
    x_pp = z_pp = None
    for it in range(1, max_iters + 1):
        iterations = it
        x_prev, z_prev = x, z
        x = ws.coeff_step(z, x)
        z = ws.angle_step(x, z)
        cost = ws.cost_of(x, z)
        if not np.isfinite(cost):
            raise EstimationError(f"non-finite cost at iteration {it}")
        x, z, cost = _extrapolate(ws, x, z, x - x_prev, z - z_prev, cost)
        if x_pp is not None:
            # the two-iteration difference cancels the zigzag component
            # once the single-step ray stops paying off
            x, z, cost = _extrapolate(ws, x, z, x - x_pp, z - z_pp, cost)
        x_pp, z_pp = x_prev, z_prev
        stalled = np.isfinite(prev_cost) \
            and abs(prev_cost - cost) < 1e-4 * max(1.0, prev_cost)
        # also fire periodically: long shallow valleys keep the per-iteration
        # change above the stall trigger for hundreds of alternation rounds
        if stalled or it % 10 == 0:
            x, z, cost = ws.joint_step(x, z, cost)
        trace.append((it, cost, ws.worst_violation_of(x, z)))
        if np.isfinite(prev_cost) and abs(prev_cost - cost) < tol_rel * max(1.0, prev_cost):
            converged = True
            break
        prev_cost = cost
    return _pack_result(prob, ws, x, z, iterations, converged, trace)


def multi_start(prob: EstimationProblem, n_starts: int = 8,
                seed: int = 0, **solve_kwargs) -> EstimationResult:
    """Best of n seeded cold starts; start j uses seed + j.

    Lowest-cost converged result wins, ties by earliest start; falls
    back to the lowest-cost result overall if no start converged.
    """
    if n_starts < 1:
        raise ValueError(f"n_starts must be >= 1, got {n_starts}")
    results = []
    errors = []
    for j in range(n_starts):
        try:
            results.append(solve(prob, init=None, seed=seed + j, **solve_kwargs))
        except (qp.QPError, EstimationError) as exc:
            errors.append((j, exc))
    if not results:
        raise EstimationError(f"all {n_starts} starts failed: {errors}")
    converged = [r for r in results if r.converged]
    pool = converged if converged else results
    return min(pool, key=lambda r: r.cost)


def order_sweep(prob: EstimationProblem, orders, n_starts: int = 4,
                seed: int = 0) -> list[tuple[int, EstimationResult]]:
    """Re-solve at each order m = n in `orders`, warm-starting from the
    previous order's optimum (a nested model, so cost cannot increase)
    and merging with cold multi-starts."""
    out: list[tuple[int, EstimationResult]] = []
    best_params = None
    for order in sorted(int(o) for o in orders):
        p = replace(prob, stiffness_order=order, damping_order=order)
        candidates = [multi_start(p, n_starts=n_starts, seed=seed)]
        if best_params is not None:
            candidates.append(solve(p, init=best_params, seed=seed))
        best = min(candidates, key=lambda r: r.cost)
        out.append((order, best))
        best_params = best.params
    return out


def fit_cost(params: ImpedanceParameters, data: GaitCycleData,
             window: tuple[float, float] = (0.0, 1.0)) -> float:
    """Euclidean torque error over the samples inside the window."""
    from impedfit.impedance import torque_trajectory
    a, b = window
    mask = (data.phase >= a) & (data.phase <= b)
    if not mask.any():
        raise ValueError(f"no samples in window {a}:{b}")
    r = torque_trajectory(params, data) - data.torque
    return float(np.linalg.norm(r[mask]))


def lipschitz_margin(tau, phase, c: float) -> float:
    """max |delta tau / delta phase| - c;  <= 0 means the bound holds."""
    tau = np.asarray(tau, dtype=np.float64)
    phase = np.asarray(phase, dtype=np.float64)
    if tau.size != phase.size:
        raise ValueError("tau and phase must have equal length")
    if tau.size < 2:
        raise ValueError("need at least 2 samples")
    rates = np.abs(np.diff(tau) / np.diff(phase))
    return float(rates.max()) - float(c)


def result_to_dict(result: EstimationResult) -> dict:
    from impedfit.impedance import params_to_dict
    return {
        "params": params_to_dict(result.params),
        "cost": result.cost,
        "iterations": result.iterations,
        "converged": result.converged,
        "feasible": result.feasible,
        "constraint_report": result.constraint_report.to_dict(),
        "trace": [{"iteration": i, "cost": c, "worst_violation": w}
                  for i, c, w in result.solver_trace],
    }


def result_from_dict(d: dict) -> EstimationResult:
    from impedfit.impedance import params_from_dict
    return EstimationResult(
        params=params_from_dict(d["params"]),
        cost=float(d["cost"]),
        iterations=int(d["iterations"]),
        converged=bool(d["converged"]),
        constraint_report=ValidationReport.from_dict(d["constraint_report"]),
        solver_trace=tuple((int(r["iteration"]), float(r["cost"]),
                            float(r["worst_violation"])) for r in d["trace"]),
    )


def load_result_json(path) -> EstimationResult:
    with open(path, "r", encoding="utf-8") as fh:
        return result_from_dict(json.load(fh))


def save_result_json(result: EstimationResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result_to_dict(result), fh, indent=2)
        fh.write("\n")


def save_trace_csv(result: EstimationResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "cost", "worst_violation"])
        for it, cost, worst in result.solver_trace:
            writer.writerow([it, repr(float(cost)), repr(float(worst))])
