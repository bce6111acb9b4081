from logging import getLogger
from typing import Optional

from tabulate import tabulate

from vvo_manager.caseio.build import build_network
from vvo_manager.caseio.devices import DeviceConfig
from vvo_manager.caseio.matpower import load_case
from vvo_manager.network.snapshot import dump_snapshot, network_to_json
from vvo_manager.network.validate import ValidateNetwork
from vvo_manager.operations.run import case_name

logger = getLogger(__name__)


def show_case(case_path: str, devices: DeviceConfig = DeviceConfig()) -> bool:
    """
    Print the device statistics of a case and whether the built network is valid
    :return: bool: True if the network passed validation
    """
    logger.info("Listing device statistics of {}".format(case_path))
    network = build_network(load_case(case_path), devices)
    stats = network.statistics()
    header = ["Case", "Buses", "Generators", "CBs", "Lines", "Transformers"]
    row = [case_name(case_path), stats.buses, stats.generators, stats.cbs, stats.lines, stats.transformers]
    print(tabulate([row], headers=header, tablefmt="pretty"))
    validator = ValidateNetwork(network)
    violations = validator.validate()
    print("Network validation: {}".format("OK" if not violations else "{} violations".format(len(violations))))
    for violation in violations:
        print("  {}".format(violation))
    return validator.network_validation_successful


def snapshot_case(case_path: str, devices: DeviceConfig = DeviceConfig(), output: Optional[str] = None):
    """
    Write the JSON snapshot of the network built from a case, to stdout if no output is given
    """
    network = build_network(load_case(case_path), devices)
    if output:
        dump_snapshot(network, output)
    else:
        print(network_to_json(network))
