"""
Container for smooth nonlinear programs

    minimise    f(x)
    subject to  c(x) = 0
                l_g <= g(x) <= u_g
                l_x <=  x   <= u_x

Jacobian callbacks return the values of a sparsity structure that is declared up front,
entry k of the returned vector belongs to (rows[k], cols[k]); repeated positions are summed.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from vvo_manager.conf import settings
from vvo_manager.exceptions import NlpDimensionError

Structure = Tuple[np.ndarray, np.ndarray]
VectorCallback = Callable[[np.ndarray], np.ndarray]


def empty_structure() -> Structure:
    return np.zeros(0, dtype=int), np.zeros(0, dtype=int)


def _no_rows(_: np.ndarray) -> np.ndarray:
    return np.zeros(0)


@dataclass(eq=False)
class NlpProblem:
    n_vars: int
    x_lower: np.ndarray
    x_upper: np.ndarray
    objective: Callable[[np.ndarray], float]
    gradient: VectorCallback
    n_eq: int = 0
    eq_values: VectorCallback = _no_rows
    eq_structure: Structure = field(default_factory=empty_structure)
    eq_jacobian: VectorCallback = _no_rows
    n_ineq: int = 0
    ineq_values: VectorCallback = _no_rows
    ineq_structure: Structure = field(default_factory=empty_structure)
    ineq_jacobian: VectorCallback = _no_rows
    ineq_lower: Optional[np.ndarray] = None
    ineq_upper: Optional[np.ndarray] = None
    # Pattern of the Lagrangian Hessian (lower, upper or both triangles), None means "derive it from the Jacobians"
    hessian_structure: Optional[Structure] = None
    variable_names: Optional[Sequence[str]] = None
    eq_names: Optional[Sequence[str]] = None
    ineq_names: Optional[Sequence[str]] = None

    def __post_init__(self):
        self.x_lower = np.asarray(self.x_lower, dtype=float)
        self.x_upper = np.asarray(self.x_upper, dtype=float)
        if self.x_lower.shape != (self.n_vars,) or self.x_upper.shape != (self.n_vars,):
            raise NlpDimensionError("variable bounds must have n_vars = {} entries".format(self.n_vars))
        if np.any(self.x_lower > self.x_upper):
            raise ValueError("variable lower bound exceeds upper bound at {}".format(int(np.argmax(self.x_lower > self.x_upper))))
        self.ineq_lower = np.full(self.n_ineq, -np.inf) if self.ineq_lower is None else np.asarray(self.ineq_lower, dtype=float)
        self.ineq_upper = np.full(self.n_ineq, np.inf) if self.ineq_upper is None else np.asarray(self.ineq_upper, dtype=float)
        if self.ineq_lower.shape != (self.n_ineq,) or self.ineq_upper.shape != (self.n_ineq,):
            raise NlpDimensionError("inequality bounds must have n_ineq = {} entries".format(self.n_ineq))
        if np.any(self.ineq_lower > self.ineq_upper):
            raise ValueError("inequality lower bound exceeds upper bound")
        self.eq_structure = self._check_structure(self.eq_structure, self.n_eq, "equality")
        self.ineq_structure = self._check_structure(self.ineq_structure, self.n_ineq, "inequality")
        if self.hessian_structure is not None:
            self.hessian_structure = self._check_structure(self.hessian_structure, self.n_vars, "hessian")

    def _check_structure(self, structure: Structure, n_rows: int, kind: str) -> Structure:
        rows, cols = (np.asarray(part, dtype=int) for part in structure)
        if rows.shape != cols.shape:
            raise NlpDimensionError("{} structure rows and columns differ in length".format(kind))
        if len(rows) and (rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= self.n_vars):
            raise NlpDimensionError("{} structure has entries outside the {}x{} matrix".format(kind, n_rows, self.n_vars))
        return rows, cols

    @staticmethod
    def _checked(values, size: int, what: str) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if values.shape != (size,):
            raise NlpDimensionError("{} returned shape {}, expected ({},)".format(what, values.shape, size))
        return values

    def evaluate_objective(self, x: np.ndarray) -> float:
        return float(self.objective(x))

    def evaluate_gradient(self, x: np.ndarray) -> np.ndarray:
        return self._checked(self.gradient(x), self.n_vars, "gradient")

    def evaluate_eq(self, x: np.ndarray) -> np.ndarray:
        return self._checked(self.eq_values(x), self.n_eq, "equality constraints")

    def evaluate_ineq(self, x: np.ndarray) -> np.ndarray:
        return self._checked(self.ineq_values(x), self.n_ineq, "inequality constraints")

    def evaluate_eq_jacobian(self, x: np.ndarray) -> csr_matrix:
        values = self._checked(self.eq_jacobian(x), len(self.eq_structure[0]), "equality Jacobian")
        return coo_matrix((values, self.eq_structure), shape=(self.n_eq, self.n_vars)).tocsr()

    def evaluate_ineq_jacobian(self, x: np.ndarray) -> csr_matrix:
        values = self._checked(self.ineq_jacobian(x), len(self.ineq_structure[0]), "inequality Jacobian")
        return coo_matrix((values, self.ineq_structure), shape=(self.n_ineq, self.n_vars)).tocsr()

    def constraint_violation(self, x: np.ndarray) -> float:
        """Largest violation of any constraint or bound at x, measured in the units of the constraint"""
        violations = [0.0]
        if self.n_eq:
            violations.append(np.max(np.abs(self.evaluate_eq(x))))
        if self.n_ineq:
            g = self.evaluate_ineq(x)
            violations.append(np.max(np.maximum(g - self.ineq_upper, 0.0)))
            violations.append(np.max(np.maximum(self.ineq_lower - g, 0.0)))
        if self.n_vars:
            violations.append(np.max(np.maximum(x - self.x_upper, 0.0)))
            violations.append(np.max(np.maximum(self.x_lower - x, 0.0)))
        return float(max(violations))

    def variable_name(self, index: int) -> str:
        return self.variable_names[index] if self.variable_names is not None else "x[{}]".format(index)

    def row_name(self, kind: str, index: int) -> str:
        names = self.eq_names if kind == "eq" else self.ineq_names
        return names[index] if names is not None else "{}[{}]".format(kind, index)


class NlpStatus(Enum):
    LOCALLY_OPTIMAL = "locally-optimal"
    MAX_ITERATIONS = "max-iterations"
    INFEASIBLE_DETECTED = "infeasible-detected"
    NUMERICAL_FAILURE = "numerical-failure"


@dataclass(frozen=True)
class NlpOptions:
    tol: float = settings.NLP_TOLERANCE
    max_iter: int = settings.NLP_MAX_ITERATIONS
    hessian: str = "auto"
    step_control: bool = True
    centering: float = settings.NLP_CENTERING
    fraction_to_boundary: float = settings.NLP_FRACTION_TO_BOUNDARY
    min_step: float = settings.NLP_MIN_STEP
    max_step_reductions: int = settings.NLP_MAX_STEP_REDUCTIONS
    max_restorations: int = settings.NLP_MAX_RESTORATIONS
    restoration_iterations: int = settings.NLP_RESTORATION_ITERATIONS
    objective_gradient_target: float = settings.NLP_OBJECTIVE_GRADIENT_TARGET
    multiplier_limit: float = settings.NLP_MULTIPLIER_LIMIT

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("solver tolerance must be positive")
        if self.max_iter < 0:
            raise ValueError("max_iter must not be negative")
        if self.hessian not in settings.NLP_HESSIAN_MODES:
            raise ValueError("unknown Hessian mode {}, expected one of {}".format(self.hessian, settings.NLP_HESSIAN_MODES))


@dataclass(frozen=True)
class KktResiduals:
    stationarity: float
    primal_feasibility: float
    complementarity: float

    def within(self, tol: float) -> bool:
        return max(self.stationarity, self.primal_feasibility, self.complementarity) <= tol


@dataclass(frozen=True, eq=False)
class NlpSolution:
    x: np.ndarray
    status: NlpStatus
    kkt: KktResiduals
    objective: float
    iterations: int
    wall_time: float
    eq_multipliers: np.ndarray
    ineq_multipliers: np.ndarray
    barrier_history: Tuple[float, ...] = ()
    restorations: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status is NlpStatus.LOCALLY_OPTIMAL
