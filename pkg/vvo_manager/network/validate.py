from dataclasses import dataclass
from logging import getLogger
from math import isclose
from typing import List

import networkx as nx

from vvo_manager.network.model import Network

logger = getLogger(__name__)


@dataclass(frozen=True)
class Violation:
    entity: str
    message: str

    def __str__(self) -> str:
        return "{}: {}".format(self.entity, self.message) if self.entity else self.message


class ValidateNetwork:
    """
    Checks the invariants of a built network, every problem is recorded as a Violation
    """

    def __init__(self, network: Network):
        """
        :param Network network: The network to check
        """
        self.network = network
        self._violations: List[Violation] = []
        self._validators_ran = 0

    def __str__(self) -> str:
        return "Network validator, current_state: {}, amount of validators run: {}".format(
            "OK" if not self._violations else "NOT OK", self._validators_ran
        )

    @property
    def network_validation_successful(self) -> bool:
        return not self._violations

    @property
    def violations(self) -> List[Violation]:
        return list(self._violations)

    @property
    def validators_ran(self) -> int:
        return self._validators_ran

    def _fail(self, entity: str, message: str):
        violation = Violation(entity, message)
        logger.error("Network violation: {}".format(violation))
        self._violations.append(violation)

    def validate(self) -> List[Violation]:
        """
        Run all validation functions
        :return: list: the violations found, empty if the network is well formed
        """
        self._violations = []
        self.validate_buses()
        self.validate_generators()
        self.validate_branches()
        self.validate_shunts()
        self.validate_topology()
        return self.violations

    def validate_buses(self):
        self._validators_ran += 1
        for bus in self.network.buses:
            if not 0 < bus.vmin <= bus.vmax:
                self._fail("bus {}".format(bus.number), "voltage bounds must satisfy 0 < vmin <= vmax")
        slack_count = sum(1 for bus in self.network.buses if bus.is_slack)
        if slack_count == 0:
            self._fail("", "no slack bus")
        elif slack_count > 1:
            self._fail("", "multiple slack buses")

    def validate_generators(self):
        self._validators_ran += 1
        n_buses = len(self.network.buses)
        for index, gen in enumerate(self.network.generators):
            entity = "generator {}".format(index)
            if not 0 <= gen.bus < n_buses:
                self._fail(entity, "bus index {} out of range".format(gen.bus))
            if gen.pmin > gen.pmax:
                self._fail(entity, "pmin must not exceed pmax")
            if gen.qmin > gen.qmax:
                self._fail(entity, "qmin must not exceed qmax")
            if len(gen.cost) != 3:
                self._fail(entity, "cost must be a polynomial of degree at most 2")
            elif gen.cost[0] < 0:
                self._fail(entity, "quadratic cost coefficient must be non-negative")

    def validate_branches(self):
        self._validators_ran += 1
        n_buses = len(self.network.buses)
        for index, branch in enumerate(self.network.branches):
            entity = "branch {}".format(index)
            if not (0 <= branch.from_bus < n_buses and 0 <= branch.to_bus < n_buses):
                self._fail(entity, "endpoint out of range")
            if not branch.tap_set or any(tap <= 0 for tap in branch.tap_set):
                self._fail(entity, "tap_set entries must be strictly positive")
            if branch.tap_ref not in branch.tap_set:
                self._fail(entity, "tap_ref must be a member of tap_set")
            if not branch.is_transformer and tuple(branch.tap_set) != (1.0,):
                self._fail(entity, "line tap_set must equal {1}")
            if not branch.angle_min <= 0 <= branch.angle_max:
                self._fail(entity, "angle bounds must satisfy angle_min <= 0 <= angle_max")
            if branch.s_max < 0:
                self._fail(entity, "s_max must be non-negative")

    def validate_shunts(self):
        self._validators_ran += 1
        n_buses = len(self.network.buses)
        for index, shunt in enumerate(self.network.shunts):
            entity = "shunt {}".format(index)
            if not 0 <= shunt.bus < n_buses:
                self._fail(entity, "bus index {} out of range".format(shunt.bus))
            levels = [k * shunt.module_step for k in range(shunt.module_count + 1)]
            if not all(any(isclose(value, level, abs_tol=1e-12) for level in levels) for value in shunt.cb_set):
                self._fail(entity, "cb_set must only hold whole numbers of modules")
            if shunt.b_ref not in shunt.cb_set:
                self._fail(entity, "b_ref must be a member of cb_set")
            if not shunt.has_cb and tuple(shunt.cb_set) != (0.0,):
                self._fail(entity, "cb_set of a bus without CB must equal {0}")

    def validate_topology(self):
        self._validators_ran += 1
        adjacency = self.network.adjacency
        n_branches = len(self.network.branches)
        if sum(len(out) for out in adjacency.outgoing) != n_branches or sum(len(inc) for inc in adjacency.incoming) != n_branches:
            self._fail("", "adjacency is inconsistent with the branch endpoints")
        if self.network.buses and not is_connected(self.network):
            self._fail("", "network is not connected")


def is_connected(network: Network) -> bool:
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(len(network.buses)))
    graph.add_edges_from((branch.from_bus, branch.to_bus) for branch in network.branches)
    return nx.is_connected(graph)


def validate(network: Network) -> List[Violation]:
    """
    :param Network network: The network to check
    :return: list: every broken invariant, empty iff the network is well formed
    """
    return ValidateNetwork(network).validate()
