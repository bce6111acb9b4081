"""
Brute force reference for the rounding heuristic: solve the fixed-device problem for every combination
of discrete device settings and keep the best locally optimal one.
"""
from dataclasses import dataclass, field
from itertools import product
from logging import getLogger
from typing import List, Optional, Tuple

import numpy as np

from vvo_manager.exceptions import EnumerationLimitError
from vvo_manager.network.model import Network
from vvo_manager.nlp.ipm import solve_nlp
from vvo_manager.nlp.problem import NlpOptions, NlpStatus
from vvo_manager.vvo.model import DeviceTreatment, build_vvo
from vvo_manager.vvo.reference import ReferenceSolution, solve_reference_acopf
from vvo_manager.vvo.scenario import ScenarioConfig, scenario_sets

logger = getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OracleRecord:
    tap: np.ndarray
    cb: np.ndarray
    status: NlpStatus
    objective: float


@dataclass(frozen=True, eq=False)
class OracleResult:
    # Branch and shunt indices of the devices that were enumerated
    tap_branches: Tuple[int, ...]
    cb_shunts: Tuple[int, ...]
    records: List[OracleRecord] = field(default_factory=list)

    @property
    def best(self) -> Optional[OracleRecord]:
        optimal = [record for record in self.records if record.status is NlpStatus.LOCALLY_OPTIMAL]
        return min(optimal, key=lambda record: record.objective) if optimal else None

    def lookup(self, tap: np.ndarray, cb: np.ndarray) -> Optional[OracleRecord]:
        """The record enumerated for a given assignment of all devices"""
        for record in self.records:
            if np.array_equal(record.tap, tap) and np.array_equal(record.cb, cb):
                return record
        return None


def enumerate_oracle(
    network: Network,
    scenario: ScenarioConfig,
    limit: int,
    reference: Optional[ReferenceSolution] = None,
    options: NlpOptions = None,
) -> OracleResult:
    """
    Solve the fixed-device VVO problem for every discrete device combination
    :param Network network: The network as built from the case
    :param ScenarioConfig scenario: Objective weights and device ranges
    :param int limit: Maximum number of combinations to solve
    :param ReferenceSolution reference: Reference ACOPF, solved here if None
    :param NlpOptions options: Solver options
    :return: OracleResult: one record per combination
    :raises EnumerationLimitError: if the scenario allows more than limit combinations
    """
    reference = reference or solve_reference_acopf(network, options)
    network = reference.network
    sets = scenario_sets(network, scenario)
    count = sets.combinations()
    if count > limit:
        raise EnumerationLimitError("scenario has {} device combinations, more than the limit of {}".format(count, limit))

    tap_branches = tuple(k for k, values in enumerate(sets.taps) if len(values) > 1)
    cb_shunts = tuple(k for k, values in enumerate(sets.cbs) if len(values) > 1)
    base_tap = np.array([values[0] for values in sets.taps])
    base_cb = np.array([values[0] for values in sets.cbs])
    choices = [sets.taps[k] for k in tap_branches] + [sets.cbs[k] for k in cb_shunts]
    logger.info("Enumerating {} device combinations".format(count))

    result = OracleResult(tap_branches=tap_branches, cb_shunts=cb_shunts)
    for combination in product(*choices):
        tap, cb = base_tap.copy(), base_cb.copy()
        tap[list(tap_branches)] = combination[: len(tap_branches)]
        cb[list(cb_shunts)] = combination[len(tap_branches) :]
        problem = build_vvo(network, scenario.objective, sets, DeviceTreatment.fixed(tap, cb))
        solution = solve_nlp(problem, problem.initial_point(reference.state), options)
        result.records.append(OracleRecord(tap=tap, cb=cb, status=solution.status, objective=solution.objective))
        logger.debug("Combination {}: {} objective {:.8f}".format(combination, solution.status.value, solution.objective))
    best = result.best
    if best is not None:
        logger.info("Best enumerated objective {:.8f}".format(best.objective))
    else:
        logger.warning("No enumerated combination reached a locally optimal point")
    return result
