import numpy as np

from vvo_manager.tests import VVOTestCase
from vvo_manager.vvo.rounding import round_devices, round_to_set
from vvo_manager.vvo.scenario import DeviceSets


class TestRoundToSet(VVOTestCase):
    def test_round_to_set_picks_the_nearest_member(self):
        self.assertEqual(round_to_set(0.17, (0.0, 0.1, 0.2), 0.1), 0.2)
        self.assertEqual(round_to_set(0.04, (0.0, 0.1, 0.2), 0.1), 0.0)

    def test_round_to_set_breaks_ties_toward_the_reference(self):
        self.assertEqual(round_to_set(0.15, (0.0, 0.1, 0.2, 0.3), 0.3), 0.2)
        self.assertEqual(round_to_set(0.15, (0.0, 0.1, 0.2, 0.3), 0.0), 0.1)

    def test_round_to_set_breaks_remaining_ties_toward_the_smaller_member(self):
        self.assertEqual(round_to_set(1.5, (1.0, 2.0), 1.5), 1.0)

    def test_round_to_set_clamps_values_outside_the_set(self):
        self.assertEqual(round_to_set(1.3, (0.9, 1.0, 1.1), 1.0), 1.1)
        self.assertEqual(round_to_set(-0.2, (0.0, 0.1), 0.1), 0.0)

    def test_round_to_set_single_member(self):
        self.assertEqual(round_to_set(0.7, (1.0,), 1.0), 1.0)


class TestRoundDevices(VVOTestCase):
    def test_round_devices_rounds_every_device_onto_its_set(self):
        sets = DeviceSets(taps=((1.0,), (0.99375, 1.0, 1.00625)), cbs=((0.0, 0.1, 0.2),))
        tap, cb = round_devices([1.0, 1.004], [0.149], sets, [1.0, 1.0], [0.1])
        np.testing.assert_array_equal(tap, [1.0, 1.00625])
        np.testing.assert_array_equal(cb, [0.1])

    def test_round_devices_returns_exact_members(self):
        sets = DeviceSets(taps=((0.98125, 0.9875),), cbs=())
        tap, cb = round_devices([0.9840000001], [], sets, [0.9875], [])
        self.assertIn(tap[0], sets.taps[0])
        self.assertEqual(len(cb), 0)
