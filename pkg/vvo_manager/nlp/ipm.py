"""
Primal-dual interior point solver.

Every inequality side and every finite variable bound becomes a row of h(x) <= 0 with a slack z > 0.
Each iteration takes a Newton step on the perturbed KKT conditions

    grad f + Jc' lam + Jh' mu = 0,   c = 0,   h + z = 0,   z * mu = gamma

reduced to the (x, lam) system. Bound rows are linear and start with h + z = 0, so the iterates stay
strictly inside the variable bounds.
"""
from dataclasses import dataclass
from logging import getLogger
from time import perf_counter
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse import bmat, coo_matrix, csr_matrix, diags, identity, issparse, vstack
from scipy.sparse.linalg import splu

from vvo_manager.nlp.hessian import BfgsHessian, FiniteDifferenceHessian, Hessian
from vvo_manager.nlp.problem import KktResiduals, NlpOptions, NlpProblem, NlpSolution, NlpStatus

logger = getLogger(__name__)

FIXED_TOLERANCE = 1e-10
BOUND_PUSH = 1e-2
CURVATURE_MIN = 1e-8
REGULARISATION_FIRST = 1e-4
REGULARISATION_GROWTH = 8.0
REGULARISATION_MAX = 1e40
CONSTRAINT_REGULARISATION = 1e-8
MERIT_RATIO = (0.95, 1.05)


def _inf_norm(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if len(values) else 0.0


@dataclass(eq=False)
class _Point:
    x: np.ndarray
    f: float
    df: np.ndarray
    c: np.ndarray
    jc: csr_matrix
    g: np.ndarray
    jg: csr_matrix
    h: np.ndarray
    jh: csr_matrix

    @property
    def finite(self) -> bool:
        return bool(np.isfinite(self.f) and np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.h)) and np.all(np.isfinite(self.df)))


class _ReducedProblem:
    """
    The problem restricted to its free variables, with all one sided constraints stacked into h(x) <= 0
    """

    def __init__(self, problem: NlpProblem):
        self.problem = problem
        lower, upper = problem.x_lower, problem.x_upper
        width = upper - lower
        fixed = np.isfinite(width) & (width <= FIXED_TOLERANCE * np.maximum(1.0, np.abs(lower)))
        self.free = np.flatnonzero(~fixed)
        self.n = len(self.free)
        self.template = 0.5 * (np.where(fixed, lower, 0.0) + np.where(fixed, upper, 0.0))
        position = -np.ones(problem.n_vars, dtype=int)
        position[self.free] = np.arange(self.n)
        self.lower, self.upper = lower[self.free], upper[self.free]

        self._eq_keep, self._eq_rows, self._eq_cols = self._restrict(problem.eq_structure, position)
        self._ineq_keep, self._ineq_rows, self._ineq_cols = self._restrict(problem.ineq_structure, position)

        self.ineq_up = np.flatnonzero(np.isfinite(problem.ineq_upper))
        self.ineq_lo = np.flatnonzero(np.isfinite(problem.ineq_lower))
        self.bound_up = np.flatnonzero(np.isfinite(self.upper))
        self.bound_lo = np.flatnonzero(np.isfinite(self.lower))
        self.n_general = len(self.ineq_up) + len(self.ineq_lo)
        self.niq = self.n_general + len(self.bound_up) + len(self.bound_lo)
        self.neq = problem.n_eq

        n_bounds = len(self.bound_up) + len(self.bound_lo)
        self._bound_block = coo_matrix(
            (
                np.concatenate([np.ones(len(self.bound_up)), -np.ones(len(self.bound_lo))]),
                (np.arange(n_bounds), np.concatenate([self.bound_up, self.bound_lo]).astype(int)),
            ),
            shape=(n_bounds, self.n),
        ).tocsr()

    @staticmethod
    def _restrict(structure, position):
        rows, cols = structure
        keep = position[cols] >= 0
        return keep, rows[keep], position[cols[keep]]

    def full(self, x: np.ndarray) -> np.ndarray:
        values = self.template.copy()
        values[self.free] = x
        return values

    def project(self, start: np.ndarray) -> np.ndarray:
        """Move a point strictly inside the variable bounds"""
        x = np.array(start, dtype=float)[self.free]
        has_lower, has_upper = np.isfinite(self.lower), np.isfinite(self.upper)
        both = has_lower & has_upper
        lower, upper = np.where(has_lower, self.lower, 0.0), np.where(has_upper, self.upper, 0.0)
        x = np.where(np.isfinite(x), x, np.where(both, 0.5 * (lower + upper), 0.0))
        lower_push = BOUND_PUSH * np.maximum(1.0, np.abs(lower))
        upper_push = BOUND_PUSH * np.maximum(1.0, np.abs(upper))
        lower_push = np.where(both, np.minimum(lower_push, BOUND_PUSH * (upper - lower)), lower_push)
        upper_push = np.where(both, np.minimum(upper_push, BOUND_PUSH * (upper - lower)), upper_push)
        x = np.where(has_lower, np.maximum(x, lower + lower_push), x)
        x = np.where(has_upper, np.minimum(x, upper - upper_push), x)
        return x

    def general_rows(self, g: np.ndarray) -> np.ndarray:
        problem = self.problem
        return np.concatenate([g[self.ineq_up] - problem.ineq_upper[self.ineq_up], problem.ineq_lower[self.ineq_lo] - g[self.ineq_lo]])

    def stacked_rows(self, g: np.ndarray, x: np.ndarray) -> np.ndarray:
        """General inequality rows followed by the upper and lower variable bound rows, all feasible at <= 0"""
        bounds = [x[self.bound_up] - self.upper[self.bound_up], self.lower[self.bound_lo] - x[self.bound_lo]]
        return np.concatenate([self.general_rows(g)] + bounds)

    def evaluate(self, x: np.ndarray) -> _Point:
        problem = self.problem
        full = self.full(x)
        f = problem.evaluate_objective(full)
        df = problem.evaluate_gradient(full)[self.free]
        c = problem.evaluate_eq(full)
        jc_values = np.asarray(problem.eq_jacobian(full), dtype=float) if problem.n_eq else np.zeros(0)
        problem._checked(jc_values, len(problem.eq_structure[0]), "equality Jacobian")  # pylint: disable=protected-access
        jc = coo_matrix((jc_values[self._eq_keep], (self._eq_rows, self._eq_cols)), shape=(self.neq, self.n)).tocsr()
        g = problem.evaluate_ineq(full)
        jg_values = np.asarray(problem.ineq_jacobian(full), dtype=float) if problem.n_ineq else np.zeros(0)
        problem._checked(jg_values, len(problem.ineq_structure[0]), "inequality Jacobian")  # pylint: disable=protected-access
        jg = coo_matrix((jg_values[self._ineq_keep], (self._ineq_rows, self._ineq_cols)), shape=(problem.n_ineq, self.n)).tocsr()
        h = self.stacked_rows(g, x)
        jh = vstack([jg[self.ineq_up], -jg[self.ineq_lo], self._bound_block], format="csr")
        return _Point(x=x, f=f, df=df, c=c, jc=jc, g=g, jg=jg, h=h, jh=jh)

    def evaluate_values(self, x: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
        """Objective, equalities and stacked inequality rows without derivatives"""
        problem = self.problem
        full = self.full(x)
        g = problem.evaluate_ineq(full)
        h = self.stacked_rows(g, x)
        return problem.evaluate_objective(full), problem.evaluate_eq(full), h

    def general_multipliers(self, mu: np.ndarray) -> np.ndarray:
        """Net multiplier per inequality row of the original problem (positive when the upper side binds)"""
        net = np.zeros(self.problem.n_ineq)
        n_up = len(self.ineq_up)
        np.add.at(net, self.ineq_up, mu[:n_up])
        np.subtract.at(net, self.ineq_lo, mu[n_up : self.n_general])
        return net

    def hessian_pattern(self) -> csr_matrix:
        problem = self.problem
        n = self.n
        if problem.hessian_structure is not None:
            position = -np.ones(problem.n_vars, dtype=int)
            position[self.free] = np.arange(n)
            rows, cols = (position[part] for part in problem.hessian_structure)
            keep = (rows >= 0) & (cols >= 0)
            return coo_matrix((np.ones(int(keep.sum())), (rows[keep], cols[keep])), shape=(n, n)).tocsr()
        # Without a declared structure the objective may couple any pair of variables
        return csr_matrix(np.ones((n, n)))


class InteriorPointSolver:
    """
    Solves one NlpProblem, the instance holds all iteration state
    """

    def __init__(self, problem: NlpProblem, options: NlpOptions = None):
        self.problem = problem
        self.options = options or NlpOptions()
        self.reduced = _ReducedProblem(problem)
        self.hessian = self._make_hessian()
        self.objective_scale = 1.0
        self.barrier_history: List[float] = []
        self.restorations = 0
        self._last_regularisation = 0.0

    def _make_hessian(self) -> Hessian:
        mode = "finite-difference" if self.options.hessian == "auto" else self.options.hessian
        logger.debug("Using {} Hessian for {} free variables".format(mode, self.reduced.n))
        if mode == "bfgs":
            return BfgsHessian(self.reduced.n)
        return FiniteDifferenceHessian(self.reduced.hessian_pattern())

    # Lagrangian helpers
    def _lagrangian_gradient(self, point: _Point, lam: np.ndarray, mu: np.ndarray) -> np.ndarray:
        return self.objective_scale * point.df + point.jc.T @ lam + point.jh.T @ mu

    def _lagrangian_gradient_function(self, lam: np.ndarray, mu: np.ndarray):
        reduced = self.reduced
        net = reduced.general_multipliers(mu)

        def gradient(x: np.ndarray) -> np.ndarray:
            full = reduced.full(x)
            problem = reduced.problem
            value = self.objective_scale * problem.evaluate_gradient(full)[reduced.free]
            if reduced.neq:
                value = value + (problem.evaluate_eq_jacobian(full)[:, reduced.free]).T @ lam
            if problem.n_ineq:
                value = value + (problem.evaluate_ineq_jacobian(full)[:, reduced.free]).T @ net
            return value

        return gradient

    def _kkt(self, point: _Point, lam: np.ndarray, mu: np.ndarray, z: np.ndarray, lx: np.ndarray) -> KktResiduals:
        multipliers = max(_inf_norm(lam), _inf_norm(mu))
        primal = max(_inf_norm(point.c), float(np.max(point.h)) if len(point.h) else 0.0, 0.0)
        return KktResiduals(
            stationarity=_inf_norm(lx) / (1 + multipliers),
            primal_feasibility=primal,
            complementarity=_inf_norm(z * mu) / (1 + multipliers),
        )

    def _newton_step(self, point: _Point, hessian, lx: np.ndarray, lam, mu, z, gamma) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """
        Solve the reduced KKT system, increasing the diagonal regularisation until the step has positive curvature
        :return: (dx, dlam) or None if no regularisation produced a usable step
        """
        n, neq = self.reduced.n, self.reduced.neq
        zinv = 1.0 / z
        jh = point.jh
        sigma = (jh.T @ diags(mu * zinv) @ jh).tocsr()
        augmented = (csr_matrix(hessian) if not issparse(hessian) else hessian) + sigma
        rhs = -np.concatenate([lx + jh.T @ (zinv * (mu * point.h + gamma)), point.c])

        delta_w, delta_c = 0.0, 0.0
        while True:
            top = augmented + delta_w * identity(n, format="csr") if delta_w else augmented
            if neq:
                bottom = -delta_c * identity(neq, format="csr") if delta_c else None
                matrix = bmat([[top, point.jc.T], [point.jc, bottom]], format="csc")
            else:
                matrix = top.tocsc()
            solution = None
            try:
                solution = splu(matrix).solve(rhs)
            except RuntimeError:
                delta_c = CONSTRAINT_REGULARISATION
            if solution is not None and np.all(np.isfinite(solution)):
                dx = solution[:n]
                curvature = float(dx @ (augmented @ dx)) + delta_w * float(dx @ dx)
                if curvature >= CURVATURE_MIN * float(dx @ dx):
                    self._last_regularisation = delta_w
                    return dx, solution[n:]
            elif solution is not None:
                delta_c = CONSTRAINT_REGULARISATION
            if delta_w == 0:
                delta_w = max(REGULARISATION_FIRST, self._last_regularisation / 3)
            else:
                delta_w *= REGULARISATION_GROWTH
            if delta_w > REGULARISATION_MAX:
                return None

    def _merit(self, f: float, c: np.ndarray, h: np.ndarray, lam, mu, z, gamma) -> float:
        return self.objective_scale * f + float(lam @ c) + float(mu @ (h + z)) - gamma * float(np.sum(np.log(z)))

    def _feasibility_condition(self, c: np.ndarray, h: np.ndarray, x: np.ndarray, z: np.ndarray) -> float:
        violation = max(_inf_norm(c), float(np.max(h)) if len(h) else 0.0)
        return violation / (1 + max(_inf_norm(x), _inf_norm(z)))

    def _control_step(self, point: _Point, hessian, lx, dx, lam, mu, z, gamma) -> float:
        """
        Damp the Newton step when the full step worsens both feasibility and stationarity
        :return: float: step scale in (0, 1]
        """
        options = self.options
        try:
            trial = self.reduced.evaluate(point.x + dx)
        except (ArithmeticError, ValueError):
            trial = None
        multipliers = 1 + max(_inf_norm(lam), _inf_norm(mu))
        if trial is not None and trial.finite:
            feasibility = self._feasibility_condition(point.c, point.h, point.x, z)
            gradient = _inf_norm(lx) / multipliers
            trial_feasibility = self._feasibility_condition(trial.c, trial.h, trial.x, z)
            trial_gradient = _inf_norm(self._lagrangian_gradient(trial, lam, mu)) / multipliers
            if not (trial_feasibility > feasibility and trial_gradient > gradient):
                return 1.0
        merit = self._merit(point.f, point.c, point.h, lam, mu, z, gamma)
        alpha = 1.0
        for _ in range(options.max_step_reductions):
            step = alpha * dx
            f1, c1, h1 = self.reduced.evaluate_values(point.x + step)
            merit1 = self._merit(f1, c1, h1, lam, mu, z, gamma)
            predicted = float(lx @ step) + 0.5 * float(step @ (hessian @ step))
            ratio = (merit1 - merit) / predicted if predicted != 0 else np.inf
            if MERIT_RATIO[0] < ratio < MERIT_RATIO[1]:
                break
            alpha /= 2
        return alpha

    def _fraction_to_boundary(self, values: np.ndarray, steps: np.ndarray) -> float:
        shrinking = steps < 0
        if not np.any(shrinking):
            return 1.0
        return min(1.0, self.options.fraction_to_boundary * float(np.min(values[shrinking] / -steps[shrinking])))

    def _initial_slacks(self, h: np.ndarray, gamma: float) -> Tuple[np.ndarray, np.ndarray]:
        n_general = self.reduced.n_general
        z = np.ones(len(h))
        z[:n_general] = np.maximum(-h[:n_general], 1.0)
        z[n_general:] = -h[n_general:]
        mu = np.where(gamma / z > 1.0, gamma / z, 1.0)
        return z, mu

    def _restore(self, x: np.ndarray) -> Tuple[np.ndarray, bool]:
        """
        Levenberg-Marquardt on the violated constraints, keeping x inside its bounds
        :return: (point, whether the constraint violation was brought down)
        """
        reduced, tol = self.reduced, self.options.tol

        def violations(point: _Point):
            general = point.h[: reduced.n_general]
            active = general > 0
            residual = np.concatenate([point.c, np.where(active, general, 0.0)])
            if not reduced.n_general:
                return residual, point.jc
            rows = vstack([point.jg[reduced.ineq_up], -point.jg[reduced.ineq_lo]], format="csr")
            return residual, vstack([point.jc, diags(active.astype(float)) @ rows], format="csr")

        point = reduced.evaluate(x)
        residual, jacobian = violations(point)
        start = _inf_norm(residual)
        if start <= tol:
            logger.debug("Feasibility restoration: violation {:.3e} is already within tolerance".format(start))
            return point.x, True
        for _ in range(self.options.restoration_iterations):
            if _inf_norm(residual) <= tol:
                break
            normal = (jacobian @ jacobian.T + 1e-10 * (1 + _inf_norm(residual)) * identity(jacobian.shape[0])).tocsc()
            try:
                dx = -(jacobian.T @ splu(normal).solve(residual))
            except RuntimeError:
                break
            norm = float(residual @ residual)
            alpha, improved = 1.0, False
            while alpha > self.options.min_step:
                candidate = reduced.project(reduced.full(point.x + alpha * dx))
                trial = reduced.evaluate(candidate)
                trial_residual, trial_jacobian = violations(trial)
                if trial.finite and float(trial_residual @ trial_residual) < (1 - 1e-4 * alpha) * norm:
                    point, residual, jacobian, improved = trial, trial_residual, trial_jacobian, True
                    break
                alpha /= 2
            if not improved:
                break
        final = _inf_norm(residual)
        logger.debug("Feasibility restoration: violation {:.3e} -> {:.3e}".format(start, final))
        return point.x, final <= tol or final < 0.1 * start

    def _finish(self, status: NlpStatus, point: _Point, lam, mu, kkt: KktResiduals, iterations: int, started: float) -> NlpSolution:
        full = self.reduced.full(point.x)
        if status is NlpStatus.LOCALLY_OPTIMAL:
            violation = self.problem.constraint_violation(full)
            if violation > self.options.tol:
                logger.warning("Solver reported convergence but the constraint violation is {:.3e}".format(violation))
                status = NlpStatus.NUMERICAL_FAILURE
        scale = self.objective_scale
        solution = NlpSolution(
            x=full,
            status=status,
            kkt=kkt,
            objective=self.problem.evaluate_objective(full),
            iterations=iterations,
            wall_time=perf_counter() - started,
            eq_multipliers=lam / scale,
            ineq_multipliers=self.reduced.general_multipliers(mu) / scale,
            barrier_history=tuple(self.barrier_history),
            restorations=self.restorations,
        )
        logger.debug(
            "Solver finished with status {} after {} iterations in {:.2f}s, objective {:.8e}".format(
                status.value, iterations, solution.wall_time, solution.objective
            )
        )
        return solution

    def solve(self, start: np.ndarray) -> NlpSolution:
        # pylint: disable=too-many-locals,too-many-branches,too-many-statements
        options, reduced = self.options, self.reduced
        started = perf_counter()
        point = reduced.evaluate(reduced.project(start))
        if not point.finite:
            kkt = KktResiduals(np.inf, np.inf, np.inf)
            return self._finish(NlpStatus.NUMERICAL_FAILURE, point, np.zeros(reduced.neq), np.zeros(reduced.niq), kkt, 0, started)
        gradient_norm = _inf_norm(point.df)
        if gradient_norm > 0:
            self.objective_scale = min(1.0, options.objective_gradient_target / gradient_norm)

        gamma = 1.0
        z, mu = self._initial_slacks(point.h, gamma)
        lam = np.zeros(reduced.neq)
        self.barrier_history = [gamma]
        lx = self._lagrangian_gradient(point, lam, mu)
        kkt = self._kkt(point, lam, mu, z, lx)
        iteration = 0
        status = NlpStatus.MAX_ITERATIONS

        while True:
            if kkt.within(options.tol):
                status = NlpStatus.LOCALLY_OPTIMAL
                break
            if iteration >= options.max_iter:
                status = NlpStatus.MAX_ITERATIONS
                break
            iteration += 1

            hessian = self.hessian.matrix(point.x, self._lagrangian_gradient_function(lam, mu))
            step = self._newton_step(point, hessian, lx, lam, mu, z, gamma)
            trouble = step is None
            if not trouble:
                dx, dlam = step
                dz = -point.h - z - point.jh @ dx
                dmu = -mu + (gamma - mu * dz) / z
                if options.step_control:
                    alpha = self._control_step(point, hessian, lx, dx, lam, mu, z, gamma)
                    dx, dz, dlam, dmu = alpha * dx, alpha * dz, alpha * dlam, alpha * dmu
                alpha_p = self._fraction_to_boundary(z, dz)
                alpha_d = self._fraction_to_boundary(mu, dmu)
                trouble = alpha_p < options.min_step or alpha_d < options.min_step

            if not trouble:
                new_point = reduced.evaluate(point.x + alpha_p * dx)
                if not new_point.finite:
                    status = NlpStatus.NUMERICAL_FAILURE
                    break
                z = z + alpha_p * dz
                lam = lam + alpha_d * dlam
                mu = mu + alpha_d * dmu
                if reduced.niq:
                    gamma = min(gamma, options.centering * float(z @ mu) / reduced.niq)
                self.barrier_history.append(gamma)
                self.hessian.update(
                    new_point.x - point.x, self._lagrangian_gradient(new_point, lam, mu) - self._lagrangian_gradient(point, lam, mu)
                )
                point = new_point
                lx = self._lagrangian_gradient(point, lam, mu)
                kkt = self._kkt(point, lam, mu, z, lx)
                logger.debug(
                    "iter {:4d} obj {: .8e} inf_pr {:.2e} inf_du {:.2e} gamma {:.2e} alpha_p {:.2e} alpha_d {:.2e}".format(
                        iteration, point.f, kkt.primal_feasibility, kkt.stationarity, gamma, alpha_p, alpha_d
                    )
                )
                trouble = max(_inf_norm(lam), _inf_norm(mu)) > options.multiplier_limit
                if not trouble:
                    continue

            # The iteration stalled: switch BFGS to the finite difference Hessian, then try to regain feasibility
            if isinstance(self.hessian, BfgsHessian):
                logger.info("Iteration {} stalled with the BFGS Hessian, switching to finite differences".format(iteration))
                self.hessian = FiniteDifferenceHessian(reduced.hessian_pattern())
                continue
            if self.restorations >= options.max_restorations:
                status = NlpStatus.INFEASIBLE_DETECTED if kkt.primal_feasibility > options.tol else NlpStatus.NUMERICAL_FAILURE
                break
            self.restorations += 1
            logger.debug("Iteration {} stalled, starting feasibility restoration {}".format(iteration, self.restorations))
            x, restored = self._restore(point.x)
            if not restored:
                status = NlpStatus.INFEASIBLE_DETECTED
                break
            point = reduced.evaluate(x)
            z, _ = self._initial_slacks(point.h, gamma)
            mu = gamma / z
            lam = np.zeros(reduced.neq)
            self.hessian.reset()
            lx = self._lagrangian_gradient(point, lam, mu)
            kkt = self._kkt(point, lam, mu, z, lx)

        return self._finish(status, point, lam, mu, kkt, iteration, started)


def solve_nlp(problem: NlpProblem, start: np.ndarray, options: NlpOptions = None) -> NlpSolution:
    """
    Solve a nonlinear program to local optimality
    :param NlpProblem problem: The problem
    :param start: Starting values for all variables, moved inside the bounds if needed
    :param NlpOptions options: Tolerance, iteration limit and Hessian mode
    :return: NlpSolution
    """
    start = np.asarray(start, dtype=float)
    if start.shape != (problem.n_vars,):
        raise ValueError("start point needs {} values, got shape {}".format(problem.n_vars, start.shape))
    return InteriorPointSolver(problem, options).solve(start)
