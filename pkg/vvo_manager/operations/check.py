from logging import getLogger

from tabulate import tabulate

from vvo_manager.caseio.devices import DeviceConfig
from vvo_manager.conf import settings
from vvo_manager.exceptions import StateFormatError
from vvo_manager.network.snapshot import state_from_json
from vvo_manager.operations.run import load_network
from vvo_manager.utils.files import read_file_content
from vvo_manager.vvo.verify import check_state

logger = getLogger(__name__)


def check_state_file(case_path: str, state_path: str, devices: DeviceConfig = DeviceConfig(), tol: float = None) -> int:
    """
    Print the verification verdict of a state file against a case
    :param str case_path: The MATPOWER case
    :param str state_path: JSON state as written by --save-states
    :param DeviceConfig devices: Device model of the case
    :param float tol: Power balance and bound tolerance
    :return: int: 0 if the state is feasible, 2 if it has violations
    :raises StateFormatError: if the state file is malformed or does not fit the case
    """
    network = load_network(case_path, devices)
    state = state_from_json(read_file_content(state_path))
    if not state.matches(network):
        raise StateFormatError(
            "state {} has {} buses, {} generators, {} branches and {} shunts, the case has {}, {}, {} and {}".format(
                state_path,
                len(state.vm),
                len(state.pg),
                len(state.tap),
                len(state.cb),
                len(network.buses),
                len(network.generators),
                len(network.branches),
                len(network.shunts),
            )
        )
    result = check_state(network, state, tol=tol)
    print("max |kcl residual|: {:.3e} p.u. at bus {}".format(result.max_kcl, result.max_kcl_bus))
    if result.violations:
        print(tabulate([[v.entity, v.message] for v in result.violations], headers=["Entity", "Violation"], tablefmt="pretty"))
        print("State is NOT feasible: {} violations".format(len(result.violations)))
        return settings.EXIT_CODE_NO_SOLUTION
    print("State is feasible")
    return settings.EXIT_CODE_SUCCESS
