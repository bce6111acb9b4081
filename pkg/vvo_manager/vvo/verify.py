"""
Independent feasibility check of an operating state: physics from the acpf module, bounds and
device membership straight from the network data, nothing taken over from solver bookkeeping.
"""
from dataclasses import dataclass, field
from logging import getLogger
from typing import List, Optional

import numpy as np

from vvo_manager.acpf.physics import branch_flow_values, kcl_residual
from vvo_manager.conf import settings
from vvo_manager.network.model import Network, OperatingState
from vvo_manager.network.validate import Violation
from vvo_manager.vvo.scenario import DeviceSets

logger = getLogger(__name__)


@dataclass(frozen=True)
class StateCheck:
    max_kcl: float
    # external number of the bus with the largest mismatch, -1 for an empty network
    max_kcl_bus: int
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def full_device_sets(network: Network) -> DeviceSets:
    """Every setting the devices can take, without a scenario restriction"""
    return DeviceSets(
        taps=tuple(tuple(branch.tap_set) if branch.is_transformer else (1.0,) for branch in network.branches),
        cbs=tuple(tuple(shunt.cb_set) if shunt.has_cb else (0.0,) for shunt in network.shunts),
    )


def check_state(network: Network, state: OperatingState, sets: Optional[DeviceSets] = None, tol: float = None) -> StateCheck:
    """
    Verify an operating state against a network
    :param Network network: The network
    :param OperatingState state: The state to verify
    :param DeviceSets sets: Allowed device settings, the full device grids if None
    :param float tol: Tolerance on power balance and bounds, device settings must match exactly
    :return: StateCheck: largest mismatch and every violation found
    :raises ValueError: if the state dimensions do not fit the network
    """
    tol = settings.FEASIBILITY_TOLERANCE if tol is None else tol
    sets = sets or full_device_sets(network)
    arrays = network.arrays
    numbers = [bus.number for bus in network.buses]
    violations: List[Violation] = []

    residual = np.abs(kcl_residual(network, state))
    worst = int(np.argmax(residual)) if len(residual) else -1
    max_kcl = float(residual[worst]) if len(residual) else 0.0
    for i in np.flatnonzero(~(residual <= tol)):
        violations.append(Violation("bus {}".format(numbers[i]), "power balance mismatch {:.3e} p.u.".format(residual[i])))
    if abs(state.va[arrays.slack]) > tol:
        message = "slack angle {:.3e} is not zero".format(state.va[arrays.slack])
        violations.append(Violation("bus {}".format(numbers[arrays.slack]), message))

    def bounded(values, lower, upper, entity, quantity):
        for i in np.flatnonzero(~((values >= lower - tol) & (values <= upper + tol))):
            violations.append(
                Violation(entity(i), "{} {:.6f} outside [{:.6f}, {:.6f}]".format(quantity, values[i], lower[i], upper[i]))
            )

    def bus(i):
        return "bus {}".format(numbers[i])

    def generator(i):
        return "generator {} at bus {}".format(i, numbers[arrays.gen_bus[i]])

    def branch(k):
        return "branch {} ({}-{})".format(k, numbers[arrays.f[k]], numbers[arrays.t[k]])

    bounded(state.vm, arrays.vmin, arrays.vmax, bus, "vm")
    bounded(state.pg, arrays.pmin, arrays.pmax, generator, "pg")
    bounded(state.qg, arrays.qmin, arrays.qmax, generator, "qg")
    bounded(state.va[arrays.f] - state.va[arrays.t], arrays.angle_min, arrays.angle_max, branch, "angle difference")

    flows = branch_flow_values(arrays, state.vm, state.va, state.tap)
    for k in np.flatnonzero(arrays.s_max > 0):
        apparent = max(np.hypot(flows.pf[k], flows.qf[k]), np.hypot(flows.pt[k], flows.qt[k]))
        if apparent > arrays.s_max[k] + tol:
            violations.append(Violation(branch(k), "apparent power {:.6f} above limit {:.6f}".format(apparent, arrays.s_max[k])))

    for k, (value, allowed) in enumerate(zip(state.tap, sets.taps)):
        if value not in allowed:
            violations.append(Violation(branch(k), "tap {!r} is not one of its allowed settings".format(float(value))))
    for k, (value, allowed) in enumerate(zip(state.cb, sets.cbs)):
        if value not in allowed:
            entity = "shunt {} at bus {}".format(k, numbers[network.shunts[k].bus])
            violations.append(Violation(entity, "cb {!r} is not one of its allowed settings".format(float(value))))

    for violation in violations:
        logger.debug("State violation: {}".format(violation))
    return StateCheck(max_kcl=max_kcl, max_kcl_bus=numbers[worst] if worst >= 0 else -1, violations=violations)
