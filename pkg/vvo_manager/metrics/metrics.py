"""
Solution quality metrics of an operating state.
Voltage deviations are in p.u., reactive power, active power deviations and losses are converted to MVAr/MW.
"""
from dataclasses import asdict, dataclass
from logging import getLogger
from typing import Any, Dict, Optional

import numpy as np

from vvo_manager.exceptions import ZeroReferenceCostError
from vvo_manager.network.model import Network, OperatingState

logger = getLogger(__name__)


@dataclass(frozen=True)
class MetricsReport:
    mae_v: float
    mae_q: float
    delta_pg: float
    pct_delta_cost: Optional[float]
    losses: float
    t_relax: Optional[float] = None
    t_fixed: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def mae_v(state: OperatingState) -> float:
    """Mean absolute deviation of the voltage magnitudes from 1 p.u."""
    if not len(state.vm):
        return 0.0
    return float(np.mean(np.abs(state.vm - 1.0)))


def mae_q(state: OperatingState, network: Network) -> float:
    if not len(state.qg):
        return 0.0
    return float(np.mean(np.abs(state.qg))) * network.base_mva


def delta_pg(state: OperatingState, network: Network) -> float:
    """Mean absolute deviation from the reference dispatch in MW"""
    if not len(state.pg):
        return 0.0
    return float(np.mean(np.abs(state.pg - network.arrays.p_ref))) * network.base_mva


def generation_cost(pg: np.ndarray, network: Network) -> float:
    arrays = network.arrays
    return float(np.sum(arrays.c2 * pg ** 2 + arrays.c1 * pg + arrays.c0))


def pct_delta_cost(state: OperatingState, network: Network) -> float:
    """
    Relative change of the generation cost against the reference dispatch
    :return: float: percent, negative when the state is cheaper
    :raises ZeroReferenceCostError: if the reference dispatch costs nothing
    """
    reference = generation_cost(network.arrays.p_ref, network)
    if reference == 0:
        raise ZeroReferenceCostError("the reference dispatch has zero cost, relative cost change is undefined")
    return 100.0 * (generation_cost(state.pg, network) - reference) / reference


def losses(state: OperatingState, network: Network) -> float:
    """Active power dissipated in the branches in MW"""
    return float(np.sum(state.pf + state.pt)) * network.base_mva


def compute_metrics(state: OperatingState, network: Network, t_relax: float = None, t_fixed: float = None) -> MetricsReport:
    try:
        cost_change = pct_delta_cost(state, network)
    except ZeroReferenceCostError as e:
        logger.warning("{}, leaving %Δc empty".format(e))
        cost_change = None
    return MetricsReport(
        mae_v=mae_v(state),
        mae_q=mae_q(state, network),
        delta_pg=delta_pg(state, network),
        pct_delta_cost=cost_change,
        losses=losses(state, network),
        t_relax=t_relax,
        t_fixed=t_fixed,
    )
