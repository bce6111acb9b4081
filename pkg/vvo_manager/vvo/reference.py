from dataclasses import dataclass
from logging import getLogger

import numpy as np

from vvo_manager.exceptions import ReferenceOpfError
from vvo_manager.network.model import Network, OperatingState
from vvo_manager.nlp.ipm import solve_nlp
from vvo_manager.nlp.problem import NlpOptions, NlpSolution
from vvo_manager.vvo.model import DeviceTreatment, build_vvo
from vvo_manager.vvo.scenario import DeviceSets, ObjectiveConfig

logger = getLogger(__name__)

COST_ONLY = ObjectiveConfig(lambda_v=0.0, lambda_q=0.0, lambda_p=0.0, lambda_c=1.0)


@dataclass(frozen=True, eq=False)
class ReferenceSolution:
    # The input network with p_ref and q_ref replaced by the ACOPF dispatch
    network: Network
    state: OperatingState
    objective: float
    wall_time: float
    solution: NlpSolution


def reference_sets(network: Network) -> DeviceSets:
    return DeviceSets(
        taps=tuple((branch.tap_ref,) for branch in network.branches),
        cbs=tuple((shunt.b_ref,) for shunt in network.shunts),
    )


def flat_start(network: Network) -> np.ndarray:
    """Zero angles, unit voltages clipped to their bounds, dispatch in the middle of the generator ranges"""
    arrays = network.arrays

    def middle(lower, upper):
        return np.where(np.isfinite(lower) & np.isfinite(upper), 0.5 * (lower + upper), 0.0)

    return np.concatenate(
        [
            np.zeros(arrays.n_bus),
            np.clip(np.ones(arrays.n_bus), arrays.vmin, arrays.vmax),
            middle(arrays.pmin, arrays.pmax),
            middle(arrays.qmin, arrays.qmax),
        ]
    )


def solve_reference_acopf(network: Network, options: NlpOptions = None) -> ReferenceSolution:
    """
    Cost minimal ACOPF with every device at its reference setting
    :param Network network: The network
    :param NlpOptions options: Solver options
    :return: ReferenceSolution: the network carrying the new reference dispatch and the optimal state
    :raises ReferenceOpfError: if the solver does not reach a locally optimal point
    """
    arrays = network.arrays
    problem = build_vvo(network, COST_ONLY, reference_sets(network), DeviceTreatment.fixed(arrays.tap_ref, arrays.b_ref))
    logger.info("Solving the reference ACOPF")
    solution = solve_nlp(problem, flat_start(network), options)
    if not solution.is_optimal:
        raise ReferenceOpfError(
            "reference ACOPF failed with status {} after {} iterations (primal infeasibility {:.3e})".format(
                solution.status.value, solution.iterations, solution.kkt.primal_feasibility
            )
        )
    state = problem.state_at(solution.x)
    logger.info("Reference ACOPF solved in {:.2f}s, cost {:.4f}".format(solution.wall_time, solution.objective))
    return ReferenceSolution(
        network=network.with_reference(state.pg, state.qg),
        state=state,
        objective=solution.objective,
        wall_time=solution.wall_time,
        solution=solution,
    )
