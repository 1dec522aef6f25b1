"""Dense strictly convex QP solver with dual recovery and KKT certification.

Solves  minimize 0.5 z'Qz + c'z  subject to  Gz >= b  by an active-set
method on the dual (Goldfarb-Idnani family): start at the unconstrained
minimizer, repeatedly pick the most violated row, and take dual steps
that either admit it into the working set (positive curvature) or drop a
blocking row first (dependent row). No feasible starting point is
needed, warm starts reuse the previous working set, and infeasibility is
certified by an unbounded dual ray. Problems here are tiny (tens of
variables/rows), so factorizations are simply refreshed per step.
"""

import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

__all__ = ["QPProblem", "QPSolution", "solve", "warm_start"]

_SYM_TOL = 1e-12


@dataclass
class QPProblem:
    """minimize 0.5 z'Qz + c'z  s.t.  Gz >= b (row-wise)."""

    Q: np.ndarray
    c: np.ndarray
    G: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        self.c = np.asarray(self.c, dtype=float)
        n = self.c.shape[0]
        if self.Q.shape != (n, n):
            raise ValueError("Q must be square and match c")
        scale = max(1.0, float(np.abs(self.Q).max()))
        if float(np.abs(self.Q - self.Q.T).max()) > _SYM_TOL * scale:
            raise ValueError("Q must be symmetric")
        self.G = np.zeros((0, n)) if self.G is None else np.asarray(self.G, dtype=float)
        if self.G.size == 0:
            self.G = self.G.reshape(0, n)
        self.b = np.zeros(0) if self.b is None else np.asarray(self.b, dtype=float)
        if self.G.shape[1] != n or self.G.shape[0] != self.b.shape[0]:
            raise ValueError("G/b dimensions inconsistent with c")
        if not (
            np.all(np.isfinite(self.Q))
            and np.all(np.isfinite(self.c))
            and np.all(np.isfinite(self.G))
            and np.all(np.isfinite(self.b))
        ):
            raise ValueError("QP data must be finite")

    @property
    def n_vars(self):
        return self.c.shape[0]

    @property
    def n_rows(self):
        return self.b.shape[0]


@dataclass
class QPSolution:
    """Optimizer, multipliers, status, KKT residuals, and solve stats."""

    z: np.ndarray
    duals: np.ndarray
    status: str  # optimal | max_iterations | infeasible
    objective: float
    kkt: dict
    iterations: int
    active_set: list
    solve_time_s: float


def _kkt_residuals(problem, z, duals):
    # Complementarity is a bilinear product, so it is reported relative
    # to the multiplier scale; the other residuals are absolute.
    stationarity = problem.Q @ z + problem.c - problem.G.T @ duals
    slack = problem.G @ z - problem.b if problem.n_rows else np.zeros(0)
    dual_scale = max(1.0, float(np.abs(duals).max())) if duals.size else 1.0
    return {
        "stationarity": float(np.abs(stationarity).max()) if z.size else 0.0,
        "primal": float(max(0.0, -slack.min())) if slack.size else 0.0,
        "dual": float(max(0.0, -duals.min())) if duals.size else 0.0,
        "complementarity": float(abs(duals @ slack)) / dual_scale
        if slack.size
        else 0.0,
    }


def _objective(problem, z):
    return float(0.5 * z @ (problem.Q @ z) + problem.c @ z)


def solve(problem, tol=1e-8, max_iter=200, initial_active_set=None, debug=False):
    """Solve the QP; Q must be positive definite.

    Returns status "optimal" with every KKT residual within tol, or
    "max_iterations" / "infeasible" (the latter only arises when hard
    rows conflict, e.g. slack variables pinned by the caller).
    """
    t0 = time.perf_counter()
    try:
        chol = cho_factor(problem.Q, lower=True)
    except np.linalg.LinAlgError as exc:
        raise ValueError("Q must be positive definite") from exc

    z_free = cho_solve(chol, -problem.c)
    r = problem.n_rows
    if r == 0:
        return QPSolution(
            z=z_free,
            duals=np.zeros(0),
            status="optimal",
            objective=_objective(problem, z_free),
            kkt=_kkt_residuals(problem, z_free, np.zeros(0)),
            iterations=0,
            active_set=[],
            solve_time_s=time.perf_counter() - t0,
        )

    # Dual data: gradient(lam) = w - M lam, M = G Q^-1 G', w = b - G z_free.
    # Row i's dual gradient equals its primal violation b_i - g_i . z(lam).
    M = problem.G @ cho_solve(chol, problem.G.T)
    w = problem.b - problem.G @ z_free

    lam = np.zeros(r)
    working = []  # row indices with gradient pinned to zero
    iterations = 0
    infeasible = False
    last_dual_obj = -np.inf

    def dual_objective():
        return float(-0.5 * lam @ (M @ lam) + w @ lam)

    # Warm assembly: solve the given working set outright, dropping rows
    # whose multipliers come out negative; fall back to cold on trouble.
    if initial_active_set:
        working = [i for i in dict.fromkeys(initial_active_set) if 0 <= int(i) < r]
        while working:
            iterations += 1
            sub = M[np.ix_(working, working)]
            rhs = w[working]
            try:
                s = np.linalg.solve(sub, rhs)
            except np.linalg.LinAlgError:
                s = None
            if s is None or float(np.abs(sub @ s - rhs).max()) > tol * max(
                1.0, float(np.abs(rhs).max())
            ):
                working = []
                break
            if float(s.min()) >= 0.0:
                lam[working] = s
                break
            working.pop(int(np.argmin(s)))
        if not working:
            lam[:] = 0.0

    converged = False
    while iterations <= max_iter and not infeasible:
        gradient = w - M @ lam
        for i in working:
            gradient[i] = -np.inf
        entering = int(np.argmax(gradient))
        if gradient[entering] <= tol:
            converged = True
            break

        # Admit row `entering`: move lam along (e_j, -step_dir on the
        # working set), which keeps working-set gradients at zero.
        while iterations <= max_iter:
            iterations += 1
            g_j = float(w[entering] - M[entering] @ lam)
            if g_j <= tol:
                break
            if working:
                sub = M[np.ix_(working, working)]
                col = M[working, entering]
                try:
                    step_dir = np.linalg.solve(sub, col)
                except np.linalg.LinAlgError:
                    step_dir, *_ = np.linalg.lstsq(sub, col, rcond=None)
                curvature = float(M[entering, entering] - col @ step_dir)
            else:
                step_dir = np.zeros(0)
                curvature = float(M[entering, entering])

            curv_floor = 1e-12 * max(1.0, float(M[entering, entering]))
            t_full = g_j / curvature if curvature > curv_floor else np.inf

            t_block = np.inf
            blocker = -1
            if step_dir.size:
                dir_floor = 1e-13 * max(1.0, float(np.abs(step_dir).max()))
                for pos, row_idx in enumerate(working):
                    if step_dir[pos] > dir_floor:
                        ratio = lam[row_idx] / step_dir[pos]
                        if ratio < t_block:
                            t_block = ratio
                            blocker = pos
            if not np.isfinite(t_full) and not np.isfinite(t_block):
                # Unbounded dual ray with nonnegative multipliers: the
                # primal constraint set is inconsistent.
                infeasible = True
                break
            if t_full <= t_block:
                lam[entering] += t_full
                if working:
                    lam[working] = np.maximum(lam[working] - t_full * step_dir, 0.0)
                working.append(entering)
                break
            lam[entering] += t_block
            lam[working] = np.maximum(lam[working] - t_block * step_dir, 0.0)
            dropped = working.pop(blocker)
            lam[dropped] = 0.0

        if debug and not infeasible:
            obj = dual_objective()
            assert obj >= last_dual_obj - 1e-9 * max(1.0, abs(obj)), (
                "dual objective regressed across active-set iterations"
            )
            last_dual_obj = obj

    z = cho_solve(chol, problem.G.T @ lam - problem.c)
    kkt = _kkt_residuals(problem, z, lam)
    if infeasible:
        status = "infeasible"
    elif converged and all(v <= tol for v in kkt.values()):
        status = "optimal"
    else:
        status = "max_iterations"
    return QPSolution(
        z=z,
        duals=lam,
        status=status,
        objective=_objective(problem, z),
        kkt=kkt,
        iterations=iterations,
        active_set=[i for i in working if lam[i] > 0.0],
        solve_time_s=time.perf_counter() - t0,
    )


def warm_start(problem, previous_active_set, tol=1e-8, max_iter=200, debug=False):
    """Solve starting from a previous cycle's active set.

    A stale set (indices out of range for the current row count) is
    silently discarded and the solve falls back to a cold start.
    """
    if previous_active_set and any(
        i < 0 or i >= problem.n_rows for i in previous_active_set
    ):
        previous_active_set = None
    return solve(
        problem,
        tol=tol,
        max_iter=max_iter,
        initial_active_set=previous_active_set,
        debug=debug,
    )
