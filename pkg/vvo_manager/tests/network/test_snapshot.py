import json
from dataclasses import replace
from os.path import join
from tempfile import TemporaryDirectory

import numpy as np

from vvo_manager.exceptions import StateFormatError
from vvo_manager.network.snapshot import (
    dump_snapshot,
    load_snapshot,
    network_to_dict,
    network_to_json,
    state_from_json,
    state_to_json,
)
from vvo_manager.tests import VVOTestCase
from vvo_manager.tests.network import flat_state, four_bus_network, two_bus_network


class TestNetworkSnapshot(VVOTestCase):
    def setUp(self) -> None:
        self.network = four_bus_network()

    def test_network_to_dict_writes_complex_admittances_as_pairs(self):
        document = network_to_dict(self.network)
        yft = self.network.branches[1].yft
        self.assertEqual(document["branches"][1]["yft"], [yft.real, yft.imag])

    def test_network_to_json_writes_unbounded_values_as_infinity(self):
        text = network_to_json(two_bus_network())
        self.assertIn("Infinity", text)

    def test_dump_snapshot_can_be_loaded_again(self):
        with TemporaryDirectory() as directory:
            path = join(directory, "case4.json")
            dump_snapshot(self.network, path)
            self.assertEqual(load_snapshot(path), self.network)


class TestStateFromJson(VVOTestCase):
    def setUp(self) -> None:
        self.network = four_bus_network()
        self.state = replace(flat_state(self.network), vm=np.array([1.0, 1.01, 0.99, 1.02]))

    def test_state_from_json_reads_a_written_state(self):
        self.assertEqual(state_from_json(state_to_json(self.state)), self.state)

    def test_state_from_json_raises_state_format_error_on_invalid_json(self):
        with self.assertRaises(StateFormatError):
            state_from_json("{not json")

    def test_state_from_json_raises_state_format_error_on_non_objects(self):
        with self.assertRaises(StateFormatError):
            state_from_json("[1, 2, 3]")

    def test_state_from_json_names_the_missing_vectors(self):
        document = json.loads(state_to_json(self.state))
        del document["tap"]
        del document["cb"]
        with self.assertRaises(StateFormatError) as context:
            state_from_json(json.dumps(document))
        self.assertIn("tap, cb", str(context.exception))

    def test_state_from_json_raises_state_format_error_on_non_numeric_values(self):
        document = json.loads(state_to_json(self.state))
        document["vm"] = ["high", 1.0, 1.0, 1.0]
        with self.assertRaises(StateFormatError):
            state_from_json(json.dumps(document))
