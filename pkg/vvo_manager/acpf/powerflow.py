from dataclasses import dataclass, field
from logging import getLogger
from typing import Optional

import numpy as np
from scipy.sparse.linalg import splu

from vvo_manager.acpf.physics import ColumnMap, PowerBalanceJacobian, branch_flow_values, power_balance, state_from_voltages
from vvo_manager.conf import settings
from vvo_manager.exceptions import NonConvergenceError, SingularJacobianError
from vvo_manager.network.model import Network, OperatingState

logger = getLogger(__name__)


@dataclass(frozen=True)
class PfOptions:
    tol: float = settings.POWER_FLOW_TOLERANCE
    max_iter: int = settings.POWER_FLOW_MAX_ITERATIONS
    flat_start: bool = True

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("power flow tolerance must be positive")


@dataclass(frozen=True, eq=False)
class PfSetpoints:
    """
    Per generator active power and per bus voltage magnitude (only read at generator buses)
    """

    pg: np.ndarray
    vm: np.ndarray


@dataclass(frozen=True, eq=False)
class PfControls:
    tap: np.ndarray
    cb: np.ndarray


@dataclass(frozen=True, eq=False)
class PfResult:
    state: OperatingState
    iterations: int
    mismatch: float = field(default=0.0)


def default_setpoints(network: Network) -> PfSetpoints:
    arrays = network.arrays
    vm = np.ones(arrays.n_bus)
    vm[arrays.gen_bus] = arrays.vg
    return PfSetpoints(pg=arrays.p_ref.copy(), vm=vm)


def reference_controls(network: Network) -> PfControls:
    arrays = network.arrays
    return PfControls(tap=arrays.tap_ref.copy(), cb=arrays.b_ref.copy())


def _share(total: np.ndarray, gen_bus: np.ndarray, weights: np.ndarray, n_bus: int) -> np.ndarray:
    """Split a per bus total over the generators of each bus in proportion to weights"""
    weights = np.where(weights > 0, weights, 0.0)
    bus_weight = np.bincount(gen_bus, weights=weights, minlength=n_bus)
    bus_count = np.bincount(gen_bus, minlength=n_bus)
    equal = bus_weight[gen_bus] <= 0
    fraction = np.where(equal, 1.0 / np.maximum(bus_count[gen_bus], 1), weights / np.where(equal, 1.0, bus_weight[gen_bus]))
    return total[gen_bus] * fraction


def solve_power_flow(
    network: Network,
    controls: PfControls,
    setpoints: PfSetpoints,
    options: PfOptions = PfOptions(),
    initial: Optional[OperatingState] = None,
) -> PfResult:
    """
    Newton-Raphson power flow in polar coordinates.
    Buses with a generator are PV buses, without reactive limit enforcement.
    :param Network network: The network
    :param PfControls controls: Tap per branch and CB susceptance per shunt
    :param PfSetpoints setpoints: Generator active power and PV bus voltage magnitudes
    :param PfOptions options: Tolerance and iteration limit
    :param OperatingState initial: Starting voltages, used unless options.flat_start is set
    :return: PfResult: physics consistent state and the number of iterations
    :raises NonConvergenceError: if the mismatch is not below tol after max_iter iterations
    :raises SingularJacobianError: if the Jacobian can not be factorised
    """
    arrays = network.arrays
    nb, slack = arrays.n_bus, arrays.slack
    is_pv = np.zeros(nb, dtype=bool)
    is_pv[arrays.gen_bus] = True
    is_pv[slack] = True

    angle_buses = np.array([i for i in range(nb) if i != slack], dtype=int)
    magnitude_buses = np.flatnonzero(~is_pv)
    va_cols = -np.ones(nb, dtype=int)
    va_cols[angle_buses] = np.arange(len(angle_buses))
    vm_cols = -np.ones(nb, dtype=int)
    vm_cols[magnitude_buses] = len(angle_buses) + np.arange(len(magnitude_buses))
    n_unknowns = len(angle_buses) + len(magnitude_buses)
    columns = ColumnMap(
        va=va_cols,
        vm=vm_cols,
        pg=-np.ones(arrays.n_gen, dtype=int),
        qg=-np.ones(arrays.n_gen, dtype=int),
        tap=-np.ones(arrays.n_branch, dtype=int),
        cb=-np.ones(arrays.n_shunt, dtype=int),
        n_cols=n_unknowns,
    )
    jacobian = PowerBalanceJacobian(arrays, columns)
    mismatch_rows = np.concatenate([angle_buses, nb + magnitude_buses])

    tap = np.asarray(controls.tap, dtype=float)
    cb = np.asarray(controls.cb, dtype=float)
    pg = np.asarray(setpoints.pg, dtype=float).copy()
    if options.flat_start or initial is None:
        vm = np.ones(nb)
        va = np.zeros(nb)
    else:
        vm = np.array(initial.vm, dtype=float)
        va = np.array(initial.va, dtype=float)
    vm[is_pv] = np.asarray(setpoints.vm, dtype=float)[is_pv]
    qg = np.zeros(arrays.n_gen)

    def mismatch() -> np.ndarray:
        dp, dq = power_balance(arrays, vm, va, pg, qg, tap, cb)
        return np.concatenate([dp, dq])[mismatch_rows]

    residual = mismatch()
    iteration = 0
    norm = np.max(np.abs(residual)) if len(residual) else 0.0
    while norm > options.tol:
        if iteration >= options.max_iter or not np.isfinite(norm):
            raise NonConvergenceError("power flow did not converge, mismatch {:.3e}".format(norm), iteration)
        iteration += 1
        matrix = jacobian.matrix(vm, va, tap, cb)[mismatch_rows].tocsc()
        try:
            step = splu(matrix).solve(-residual)
        except RuntimeError as e:
            raise SingularJacobianError("singular power flow Jacobian", iteration) from e
        if not np.all(np.isfinite(step)):
            raise SingularJacobianError("singular power flow Jacobian", iteration)
        va[angle_buses] += step[: len(angle_buses)]
        vm[magnitude_buses] += step[len(angle_buses) :]
        residual = mismatch()
        norm = np.max(np.abs(residual)) if len(residual) else 0.0
        logger.debug("Power flow iteration {}: max mismatch {:.3e}".format(iteration, norm))

    # Generator buses pick up whatever their balance needs: reactive power everywhere, active power at the slack
    flows = branch_flow_values(arrays, vm, va, tap)
    dp, dq = power_balance(arrays, vm, va, pg, np.zeros(arrays.n_gen), tap, cb, flows)
    qg = _share(-dq, arrays.gen_bus, arrays.qmax - arrays.qmin, nb)
    slack_gens = np.flatnonzero(arrays.gen_bus == slack)
    if len(slack_gens):
        pg[slack_gens[0]] -= dp[slack]
    logger.info("Power flow converged in {} iterations".format(iteration))
    return PfResult(state=state_from_voltages(network, vm, va, pg, qg, tap, cb), iterations=iteration, mismatch=float(norm))
