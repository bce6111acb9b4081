from math import inf

from vvo_manager.caseio.build import build_network
from vvo_manager.caseio.devices import DeviceConfig
from vvo_manager.caseio.matpower import load_case
from vvo_manager.conf import settings
from vvo_manager.tests import VVOTestCase
from vvo_manager.tests.network import four_bus_network, two_bus_network
from vvo_manager.vvo.scenario import (
    INFINITY,
    DeviceSets,
    ObjectiveConfig,
    ScenarioConfig,
    clamped_cb_shunts,
    expand_ranges,
    scenario_sets,
    warn_cb_clamps,
)


class TestObjectiveConfig(VVOTestCase):
    def test_objective_config_defaults_to_unit_weights(self):
        objective = ObjectiveConfig()
        self.assertEqual((objective.lambda_v, objective.lambda_q, objective.lambda_p, objective.lambda_c), (1.0, 1.0, 1.0, 1.0))
        self.assertFalse(objective.pins_dispatch)

    def test_objective_config_pins_dispatch_for_infinite_lambda_p(self):
        objective = ObjectiveConfig(lambda_p=INFINITY)
        self.assertTrue(objective.pins_dispatch)
        self.assertEqual(objective.lambda_p_label(), "inf")

    def test_objective_config_labels_finite_lambda_p(self):
        self.assertEqual(ObjectiveConfig(lambda_p=5.0).lambda_p_label(), "5")
        self.assertEqual(ObjectiveConfig(lambda_p=0.5).lambda_p_label(), "0.5")

    def test_objective_config_rejects_negative_weights(self):
        with self.assertRaises(ValueError):
            ObjectiveConfig(lambda_v=-1.0)
        with self.assertRaises(ValueError):
            ObjectiveConfig(lambda_p=-1.0)

    def test_objective_config_rejects_infinite_weights_other_than_lambda_p(self):
        with self.assertRaises(ValueError):
            ObjectiveConfig(lambda_q=inf)

    def test_objective_config_rejects_nan_weights(self):
        with self.assertRaises(ValueError):
            ObjectiveConfig(lambda_c=float("nan"))

    def test_objective_config_default_targets(self):
        network = four_bus_network()
        objective = ObjectiveConfig()
        self.assertEqual(list(objective.voltage_targets(network)), [1.0] * 4)
        self.assertEqual(list(objective.reactive_targets(network)), [0.0, 0.0])

    def test_objective_config_custom_targets_need_one_value_per_entity(self):
        network = four_bus_network()
        self.assertEqual(list(ObjectiveConfig(v_ref=(1.0, 1.01, 1.0, 0.99)).voltage_targets(network)), [1.0, 1.01, 1.0, 0.99])
        with self.assertRaises(ValueError):
            ObjectiveConfig(v_ref=(1.0,)).voltage_targets(network)
        with self.assertRaises(ValueError):
            ObjectiveConfig(q_ref=(0.0,)).reactive_targets(network)


class TestScenarioConfig(VVOTestCase):
    def test_scenario_config_labels(self):
        scenario = ScenarioConfig(tap_dev_steps=16, cb_max_modules=3)
        self.assertEqual(scenario.tap_label(), "±16")
        self.assertEqual(scenario.cb_label(), "0-3")

    def test_scenario_config_rejects_negative_tap_deviations(self):
        with self.assertRaises(ValueError):
            ScenarioConfig(tap_dev_steps=-1)

    def test_scenario_config_leaves_the_tap_bound_to_the_device_model(self):
        self.assertEqual(ScenarioConfig(tap_dev_steps=20).tap_label(), "±20")

    def test_scenario_config_rejects_an_empty_cb_range(self):
        with self.assertRaises(ValueError):
            ScenarioConfig(cb_min_modules=3, cb_max_modules=2)


class TestScenarioSets(VVOTestCase):
    def setUp(self) -> None:
        self.network = four_bus_network()

    def test_scenario_sets_window_the_tap_grid_around_the_reference(self):
        sets = scenario_sets(self.network, ScenarioConfig(tap_dev_steps=3, cb_max_modules=2))
        self.assertEqual(sets.taps[1], (0.98125, 0.9875, 0.99375, 1.0, 1.00625, 1.0125, 1.01875))

    def test_scenario_sets_give_lines_a_unit_tap(self):
        sets = scenario_sets(self.network, ScenarioConfig())
        self.assertEqual(sets.taps[0], (1.0,))
        self.assertEqual(sets.taps[2], (1.0,))

    def test_scenario_sets_full_tap_range_stays_inside_the_window(self):
        sets = scenario_sets(self.network, ScenarioConfig(tap_dev_steps=16, cb_max_modules=3))
        self.assertEqual(len(sets.taps[1]), 33)
        self.assertEqual((sets.taps[1][0], sets.taps[1][-1]), (0.9, 1.1))

    def test_scenario_sets_limit_the_cb_modules(self):
        self.assertEqual(scenario_sets(self.network, ScenarioConfig(cb_max_modules=2)).cbs, ((0.0, 0.1, 0.2),))
        self.assertEqual(scenario_sets(self.network, ScenarioConfig(cb_max_modules=3)).cbs, ((0.0, 0.1, 0.2, 0.3),))

    def test_scenario_sets_honour_a_minimum_cb_module_count(self):
        sets = scenario_sets(self.network, ScenarioConfig(cb_min_modules=1, cb_max_modules=2))
        self.assertEqual(sets.cbs, ((0.1, 0.2),))

    def test_scenario_sets_clamp_cb_maximum_to_the_installed_modules(self):
        sets = scenario_sets(self.network, ScenarioConfig(cb_max_modules=10))
        self.assertEqual(sets.cbs, ((0.0, 0.1, 0.2, 0.3),))

    def test_scenario_sets_reject_deviations_beyond_the_tap_changer(self):
        with self.assertRaises(ValueError) as context:
            scenario_sets(self.network, ScenarioConfig(tap_dev_steps=17))
        self.assertIn("exceeds the 16 positions of the tap changer on branch 1", str(context.exception))

    def test_scenario_sets_follow_the_configured_tap_positions(self):
        network = build_network(load_case(settings.TEST_CASE_4BUS), DeviceConfig(tap_positions=20))
        sets = scenario_sets(network, ScenarioConfig(tap_dev_steps=20, cb_max_modules=3))
        self.assertEqual((sets.taps[1][0], sets.taps[1][-1]), (0.9, 1.1))
        self.assertEqual(len(sets.taps[1]), 33)
        with self.assertRaises(ValueError):
            scenario_sets(network, ScenarioConfig(tap_dev_steps=21))

    def test_scenario_sets_zero_deviation_keeps_only_the_reference(self):
        sets = scenario_sets(self.network, ScenarioConfig(tap_dev_steps=0, cb_max_modules=0))
        self.assertEqual(sets.taps[1], (1.0,))
        self.assertEqual(sets.cbs, ((0.0,),))
        self.assertEqual(sets.combinations(), 1)

    def test_scenario_sets_bounds_and_combinations(self):
        sets = scenario_sets(self.network, ScenarioConfig(tap_dev_steps=1, cb_max_modules=1))
        low, high = sets.tap_bounds()
        self.assertEqual(list(low), [1.0, 0.99375, 1.0])
        self.assertEqual(list(high), [1.0, 1.00625, 1.0])
        self.assertEqual([list(b) for b in sets.cb_bounds()], [[0.0], [0.1]])
        self.assertEqual(sets.combinations(), 6)

    def test_scenario_sets_without_devices(self):
        sets = scenario_sets(two_bus_network(), ScenarioConfig())
        self.assertEqual(sets, DeviceSets(taps=((1.0,),), cbs=()))
        self.assertEqual(sets.combinations(), 1)


class TestExpandRanges(VVOTestCase):
    def test_expand_ranges_default_grid(self):
        self.assertEqual(expand_ranges([3, 16], [2, 3]), [(3, 2), (3, 3), (16, 3)])

    def test_expand_ranges_sorts_and_deduplicates(self):
        self.assertEqual(expand_ranges([16, 3, 3], [3, 2]), [(3, 2), (3, 3), (16, 3)])

    def test_expand_ranges_single_values(self):
        self.assertEqual(expand_ranges([5], [1, 2, 3]), [(5, 1), (5, 2), (5, 3)])
        self.assertEqual(expand_ranges([1, 2], [3]), [(1, 3), (2, 3)])

    def test_expand_ranges_empty(self):
        self.assertEqual(expand_ranges([], [2]), [])


class TestWarnCbClamps(VVOTestCase):
    def setUp(self) -> None:
        self.network = four_bus_network()
        self.logger = self.set_up_patch("vvo_manager.vvo.scenario.logger")

    def test_clamped_cb_shunts_lists_shunts_with_fewer_modules(self):
        self.assertEqual(clamped_cb_shunts(self.network, 3), [])
        self.assertEqual(clamped_cb_shunts(self.network, 4), [0])

    def test_warn_cb_clamps_logs_once_for_the_whole_grid(self):
        warn_cb_clamps(self.network, [ScenarioConfig(cb_max_modules=k) for k in (5, 10, 2)])
        self.logger.warning.assert_called_once_with(
            "CB maximum 10 exceeds the installed modules of 1 shunts (fewest 3), their range is clamped to the module count"
        )

    def test_warn_cb_clamps_is_silent_within_the_installed_modules(self):
        warn_cb_clamps(self.network, [ScenarioConfig(cb_max_modules=2), ScenarioConfig(cb_max_modules=3)])
        self.assertFalse(self.logger.warning.called)

    def test_warn_cb_clamps_accepts_an_empty_grid(self):
        warn_cb_clamps(self.network, [])
        self.assertFalse(self.logger.warning.called)
