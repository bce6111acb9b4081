"""
JSON snapshots of networks and operating states.

Complex numbers are written as [re, im] pairs, unbounded values as Infinity.
"""
import json
from dataclasses import asdict, fields
from logging import getLogger
from typing import Any, Dict, List

from vvo_manager.exceptions import StateFormatError
from vvo_manager.network.model import Branch, Bus, Generator, Network, OperatingState, ShuntDevice, STATE_FIELDS
from vvo_manager.utils.files import read_file_content, write_file_atomically

logger = getLogger(__name__)

_COMPLEX_FIELDS = ("yff", "yft", "ytf", "ytt")
_TUPLE_FIELDS = ("cost", "tap_set", "cb_set")


def _encode(entity) -> Dict[str, Any]:
    document = asdict(entity)
    for name in _COMPLEX_FIELDS:
        if name in document:
            document[name] = [document[name].real, document[name].imag]
    for name in _TUPLE_FIELDS:
        if name in document:
            document[name] = list(document[name])
    return document


def _decode(cls, document: Dict[str, Any]):
    values = {}
    for field in fields(cls):
        value = document[field.name]
        if field.name in _COMPLEX_FIELDS:
            value = complex(value[0], value[1])
        elif field.name in _TUPLE_FIELDS:
            value = tuple(float(item) for item in value)
        values[field.name] = value
    return cls(**values)


def network_to_dict(network: Network) -> Dict[str, Any]:
    return {
        "base_mva": network.base_mva,
        "buses": [_encode(bus) for bus in network.buses],
        "generators": [_encode(gen) for gen in network.generators],
        "branches": [_encode(branch) for branch in network.branches],
        "shunts": [_encode(shunt) for shunt in network.shunts],
    }


def network_from_dict(document: Dict[str, Any]) -> Network:
    return Network(
        base_mva=document["base_mva"],
        buses=tuple(_decode(Bus, item) for item in document["buses"]),
        generators=tuple(_decode(Generator, item) for item in document["generators"]),
        branches=tuple(_decode(Branch, item) for item in document["branches"]),
        shunts=tuple(_decode(ShuntDevice, item) for item in document["shunts"]),
    )


def network_to_json(network: Network) -> str:
    return json.dumps(network_to_dict(network), indent=2)


def network_from_json(text: str) -> Network:
    return network_from_dict(json.loads(text))


def dump_snapshot(network: Network, path: str):
    """
    Write the network snapshot to disk
    :param Network network: The network to write
    :param str path: Destination file, replaced atomically
    """
    logger.info("Writing network snapshot to {}".format(path))
    write_file_atomically(path, network_to_json(network))


def load_snapshot(path: str) -> Network:
    return network_from_json(read_file_content(path))


def state_to_dict(state: OperatingState) -> Dict[str, Any]:
    document: Dict[str, Any] = {name: getattr(state, name).tolist() for name in STATE_FIELDS}
    document["physics_consistent"] = state.physics_consistent
    return document


def state_to_json(state: OperatingState) -> str:
    return json.dumps(state_to_dict(state), indent=2)


def state_from_json(text: str) -> OperatingState:
    """
    :param str text: JSON document as written by state_to_json
    :return: OperatingState
    :raises StateFormatError: if the document is not a state
    """
    try:
        document = json.loads(text)
    except ValueError as e:
        raise StateFormatError("state file is not valid JSON: {}".format(e)) from e
    if not isinstance(document, dict):
        raise StateFormatError("state file must hold a JSON object")
    missing: List[str] = [name for name in STATE_FIELDS if name not in document]
    if missing:
        raise StateFormatError("state file is missing {}".format(", ".join(missing)))
    try:
        vectors = {name: [float(value) for value in document[name]] for name in STATE_FIELDS}
    except (TypeError, ValueError) as e:
        raise StateFormatError("state vectors must be lists of numbers: {}".format(e)) from e
    return OperatingState(physics_consistent=bool(document.get("physics_consistent", False)), **vectors)
