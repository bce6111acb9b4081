import numpy as np

from vvo_manager.caseio.build import build_network
from vvo_manager.caseio.matpower import load_case
from vvo_manager.conf import settings
from vvo_manager.network.model import Network, OperatingState


def four_bus_network() -> Network:
    return build_network(load_case(settings.TEST_CASE_4BUS))


def two_bus_network() -> Network:
    return build_network(load_case(settings.TEST_CASE_2BUS))


def flat_state(network: Network) -> OperatingState:
    nb, ng, nl, ns = len(network.buses), len(network.generators), len(network.branches), len(network.shunts)
    return OperatingState(
        vm=np.ones(nb),
        va=np.zeros(nb),
        pg=np.zeros(ng),
        qg=np.zeros(ng),
        pf=np.zeros(nl),
        qf=np.zeros(nl),
        pt=np.zeros(nl),
        qt=np.zeros(nl),
        tap=network.arrays.tap_ref.copy(),
        cb=network.arrays.b_ref.copy(),
    )
