from logging import getLogger
from math import inf, radians
from typing import Dict, List, Tuple

import numpy as np
import networkx as nx

from vvo_manager.caseio import idx
from vvo_manager.caseio.devices import DeviceConfig, snap_tap
from vvo_manager.caseio.matpower import RawCase
from vvo_manager.exceptions import NetworkBuildError, UnsupportedCostModelError
from vvo_manager.network.model import Branch, Bus, Generator, Network, ShuntDevice

logger = getLogger(__name__)


def _angle_limit(value: float, unbounded: float) -> float:
    """MATPOWER leaves a side of the angle difference unbounded when it is 0 or at least 360 degrees"""
    if value == 0 or abs(value) >= 360:
        return unbounded
    return radians(value)


def _polynomial_cost(row: np.ndarray, base_mva: float, index: int) -> Tuple[float, float, float]:
    """
    Convert a polynomial gencost row (argument in MW) into (c2, c1, c0) with the argument in p.u.
    """
    n_coefficients = int(row[idx.NCOST])
    coefficients = [float(c) for c in row[idx.COST : idx.COST + n_coefficients]]
    while len(coefficients) > 3 and coefficients[0] == 0:
        coefficients.pop(0)
    if len(coefficients) > 3:
        raise UnsupportedCostModelError("generator {} has a cost polynomial of degree {}".format(index + 1, len(coefficients) - 1))
    c2, c1, c0 = [0.0] * (3 - len(coefficients)) + coefficients
    return c2 * base_mva ** 2, c1 * base_mva, c0


def _check_connected(n_buses: int, branches: List[Branch], numbers: np.ndarray, slack: int):
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(n_buses))
    graph.add_edges_from((branch.from_bus, branch.to_bus) for branch in branches)
    reachable = nx.node_connected_component(graph, slack)
    if len(reachable) != n_buses:
        unreachable = sorted(int(numbers[i]) for i in set(range(n_buses)) - reachable)
        raise NetworkBuildError(
            "disconnected network: {} of {} buses are not connected to the slack bus (e.g. bus {})".format(
                len(unreachable), n_buses, unreachable[0]
            )
        )


def build_network(case: RawCase, config: DeviceConfig = DeviceConfig()) -> Network:
    """
    Turn a parsed case into a per-unit network with the discrete device model attached
    :param RawCase case: The parsed MATPOWER tables
    :param DeviceConfig config: Capacitor bank and tap changer definition
    :return: Network
    :raises NetworkBuildError: on a disconnected network, a missing or duplicated slack bus or a zero impedance branch
    """
    base = case.base_mva
    bus_rows = case.bus[case.bus[:, idx.BUS_TYPE] != idx.NONE]
    numbers = bus_rows[:, idx.BUS_I].astype(int)
    index: Dict[int, int] = {int(number): i for i, number in enumerate(numbers)}
    if len(bus_rows) < len(case.bus):
        logger.info("Dropped {} isolated buses".format(len(case.bus) - len(bus_rows)))

    slack_rows = np.flatnonzero(bus_rows[:, idx.BUS_TYPE] == idx.REF)
    if len(slack_rows) != 1:
        raise NetworkBuildError("expected exactly one slack bus, found {}".format(len(slack_rows)))
    slack = int(slack_rows[0])

    buses = tuple(
        Bus(
            id=i,
            number=int(row[idx.BUS_I]),
            base_kv=float(row[idx.BASE_KV]),
            vmin=float(row[idx.VMIN]),
            vmax=float(row[idx.VMAX]),
            pd=float(row[idx.PD]) / base,
            qd=float(row[idx.QD]) / base,
            is_slack=i == slack,
        )
        for i, row in enumerate(bus_rows)
    )

    generators = []
    for gen_index, (row, cost_row) in enumerate(zip(case.gen, case.gencost)):
        bus_number = int(row[idx.GEN_BUS])
        if row[idx.GEN_STATUS] <= 0 or bus_number not in index:
            continue
        generators.append(
            Generator(
                bus=index[bus_number],
                pmin=float(row[idx.PMIN]) / base,
                pmax=float(row[idx.PMAX]) / base,
                qmin=float(row[idx.QMIN]) / base,
                qmax=float(row[idx.QMAX]) / base,
                cost=_polynomial_cost(cost_row, base, gen_index),
                p_ref=float(row[idx.PG]) / base,
                q_ref=float(row[idx.QG]) / base,
                vg=float(row[idx.VG]),
            )
        )

    tap_grid = config.tap_grid()
    branches = []
    for branch_index, row in enumerate(case.branch):
        f, t = int(row[idx.F_BUS]), int(row[idx.T_BUS])
        if row[idx.BR_STATUS] <= 0 or f not in index or t not in index:
            continue
        r, x = float(row[idx.BR_R]), float(row[idx.BR_X])
        if r == 0 and x == 0:
            raise NetworkBuildError("branch {} ({} - {}) has zero impedance".format(branch_index + 1, f, t))
        ratio = float(row[idx.TAP])
        is_transformer = ratio != 0
        tap_ref, tap_set = (snap_tap(ratio, config)[1], tap_grid) if is_transformer else (1.0, (1.0,))
        has_angles = case.branch.shape[1] > idx.ANGMAX
        branches.append(
            Branch.from_impedance(
                index[f],
                index[t],
                r,
                x,
                b=float(row[idx.BR_B]),
                shift=radians(float(row[idx.SHIFT])),
                tap_ref=tap_ref,
                tap_set=tap_set,
                s_max=float(row[idx.RATE_A]) / base,
                angle_min=_angle_limit(float(row[idx.ANGMIN]), -inf) if has_angles else -inf,
                angle_max=_angle_limit(float(row[idx.ANGMAX]), inf) if has_angles else inf,
                is_transformer=is_transformer,
            )
        )

    _check_connected(len(buses), branches, numbers, slack)

    shunts = []
    for i, row in enumerate(bus_rows):
        gs, bs = float(row[idx.GS]) / base, float(row[idx.BS]) / base
        if bs != 0:
            shunts.append(
                ShuntDevice(
                    bus=i,
                    gs=gs,
                    bs0=bs - config.b_ref,
                    module_step=config.cb_module_step,
                    module_count=config.cb_module_count,
                    b_ref=config.b_ref,
                    cb_set=config.cb_levels(),
                )
            )
        elif gs != 0:
            shunts.append(ShuntDevice(bus=i, gs=gs, bs0=0.0, module_step=config.cb_module_step, module_count=0, b_ref=0.0))

    network = Network(base_mva=base, buses=buses, generators=tuple(generators), branches=tuple(branches), shunts=tuple(shunts))
    stats = network.statistics()
    logger.info(
        "Built network with {} buses, {} generators, {} CBs and {} lines of which {} transformers".format(
            stats.buses, stats.generators, stats.cbs, stats.lines, stats.transformers
        )
    )
    return network
