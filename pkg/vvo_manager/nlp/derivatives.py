from dataclasses import dataclass
from logging import getLogger

import numpy as np

from vvo_manager.nlp.problem import NlpProblem

logger = getLogger(__name__)

RELATIVE_STEP = 1e-6


@dataclass(frozen=True)
class DerivativeCheck:
    """
    Worst disagreement between a declared derivative and its central difference
    kind is one of "gradient", "eq" or "ineq"; row is -1 for the gradient
    """

    max_error: float
    kind: str = ""
    row: int = -1
    col: int = -1
    analytic: float = 0.0
    approximation: float = 0.0
    variable: str = ""
    constraint: str = ""

    def __str__(self):
        if not self.kind:
            return "max relative derivative error {:.3e}".format(self.max_error)
        where = "objective" if self.kind == "gradient" else self.constraint
        return "max relative derivative error {:.3e} at d {} / d {} (analytic {:.8e}, finite difference {:.8e})".format(
            self.max_error, where, self.variable, self.analytic, self.approximation
        )


def check_derivatives(problem: NlpProblem, point: np.ndarray) -> DerivativeCheck:
    """
    Compare the objective gradient and both constraint Jacobians to central finite differences.
    Entries outside the declared structures are compared too, so a missing nonzero shows up as an error.
    :param NlpProblem problem: The problem to check
    :param point: Point to check at, should be strictly inside the variable bounds
    :return: DerivativeCheck: the worst relative error |analytic - fd| / max(1, |fd|) and where it occurred
    """
    x = np.asarray(point, dtype=float)
    gradient = problem.evaluate_gradient(x)
    blocks = [("gradient", gradient.reshape(1, -1))]
    if problem.n_eq:
        blocks.append(("eq", problem.evaluate_eq_jacobian(x).toarray()))
    if problem.n_ineq:
        blocks.append(("ineq", problem.evaluate_ineq_jacobian(x).toarray()))

    def values(at: np.ndarray):
        parts = {"gradient": np.array([problem.evaluate_objective(at)])}
        if problem.n_eq:
            parts["eq"] = problem.evaluate_eq(at)
        if problem.n_ineq:
            parts["ineq"] = problem.evaluate_ineq(at)
        return parts

    approximations = {kind: np.zeros_like(block) for kind, block in blocks}
    for col in range(problem.n_vars):
        step = RELATIVE_STEP * max(1.0, abs(x[col]))
        forward, backward = x.copy(), x.copy()
        forward[col] += step
        backward[col] -= step
        upper, lower = values(forward), values(backward)
        for kind, _ in blocks:
            approximations[kind][:, col] = (upper[kind] - lower[kind]) / (2 * step)

    worst = DerivativeCheck(max_error=0.0)
    for kind, analytic in blocks:
        approximation = approximations[kind]
        if not analytic.size:
            continue
        errors = np.abs(analytic - approximation) / np.maximum(1.0, np.abs(approximation))
        row, col = np.unravel_index(int(np.argmax(errors)), errors.shape)
        if errors[row, col] > worst.max_error:
            worst = DerivativeCheck(
                max_error=float(errors[row, col]),
                kind=kind,
                row=-1 if kind == "gradient" else int(row),
                col=int(col),
                analytic=float(analytic[row, col]),
                approximation=float(approximation[row, col]),
                variable=problem.variable_name(int(col)),
                constraint="" if kind == "gradient" else problem.row_name(kind, int(row)),
            )
    logger.debug(str(worst))
    return worst
