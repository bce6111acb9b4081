import numpy as np

from vvo_manager.nlp.problem import NlpProblem


def circle_problem(sense: float = 1.0, equality: bool = True) -> NlpProblem:
    """
    minimise sense * (x + y) on (equality) or inside (inequality) the unit circle
    """
    rows, cols = np.array([0, 0]), np.array([0, 1])
    constraint = {
        "values": lambda x: np.array([x[0] ** 2 + x[1] ** 2 - (1.0 if equality else 0.0)]),
        "structure": (rows, cols),
        "jacobian": lambda x: np.array([2 * x[0], 2 * x[1]]),
    }
    common = dict(
        n_vars=2,
        x_lower=np.full(2, -np.inf),
        x_upper=np.full(2, np.inf),
        objective=lambda x: sense * (x[0] + x[1]),
        gradient=lambda x: np.array([sense, sense]),
        variable_names=["x", "y"],
    )
    if equality:
        return NlpProblem(
            n_eq=1,
            eq_values=constraint["values"],
            eq_structure=constraint["structure"],
            eq_jacobian=constraint["jacobian"],
            eq_names=["circle"],
            **common
        )
    return NlpProblem(
        n_ineq=1,
        ineq_values=constraint["values"],
        ineq_structure=constraint["structure"],
        ineq_jacobian=constraint["jacobian"],
        ineq_upper=np.array([1.0]),
        ineq_names=["disc"],
        **common
    )


def quadratic_problem(target, lower=None, upper=None) -> NlpProblem:
    """minimise |x - target|^2 within bounds"""
    target = np.asarray(target, dtype=float)
    n = len(target)
    return NlpProblem(
        n_vars=n,
        x_lower=np.full(n, -np.inf) if lower is None else lower,
        x_upper=np.full(n, np.inf) if upper is None else upper,
        objective=lambda x: float(np.sum((x - target) ** 2)),
        gradient=lambda x: 2 * (x - target),
    )
