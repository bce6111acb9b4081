import numpy as np

from vvo_manager.acpf.physics import kcl_residual
from vvo_manager.acpf.powerflow import (
    PfControls,
    PfOptions,
    PfSetpoints,
    default_setpoints,
    reference_controls,
    solve_power_flow,
)
from vvo_manager.caseio.build import build_network
from vvo_manager.caseio.matpower import parse_matpower
from vvo_manager.conf import settings
from vvo_manager.exceptions import NonConvergenceError, PowerFlowError
from vvo_manager.tests import VVOTestCase
from vvo_manager.tests.acpf.test_physics import THETA2, V2
from vvo_manager.tests.network import four_bus_network, two_bus_network
from vvo_manager.utils.files import read_file_content


class TestSolvePowerFlow(VVOTestCase):
    def test_solve_power_flow_reproduces_the_two_bus_closed_form(self):
        network = two_bus_network()
        result = solve_power_flow(network, reference_controls(network), default_setpoints(network))
        self.assertAlmostEqual(result.state.vm[1], V2, places=9)
        self.assertAlmostEqual(result.state.va[1], THETA2, places=9)
        self.assertAlmostEqual(result.state.vm[1], 0.994936, places=6)

    def test_solve_power_flow_assigns_the_slack_the_balancing_power(self):
        network = two_bus_network()
        state = solve_power_flow(network, reference_controls(network), default_setpoints(network)).state
        self.assertAlmostEqual(state.pg[0], 1.0, places=9)
        self.assertAlmostEqual(state.qg[0], (1 - V2 ** 2) / 0.1, places=9)

    def test_solve_power_flow_returns_a_physics_consistent_state(self):
        network = four_bus_network()
        result = solve_power_flow(network, reference_controls(network), default_setpoints(network))
        self.assertTrue(result.state.physics_consistent)
        self.assertLess(np.max(np.abs(kcl_residual(network, result.state))), 1e-8)
        self.assertLessEqual(result.mismatch, settings.POWER_FLOW_TOLERANCE)
        self.assertGreater(result.iterations, 0)

    def test_solve_power_flow_holds_generator_bus_voltages_and_the_slack_angle(self):
        network = four_bus_network()
        state = solve_power_flow(network, reference_controls(network), default_setpoints(network)).state
        self.assertEqual(state.va[0], 0.0)
        self.assertEqual(state.vm[0], 1.0)
        self.assertEqual(state.vm[1], 1.0)
        self.assertEqual(state.pg[1], network.generators[1].p_ref)

    def test_solve_power_flow_raises_the_load_bus_voltage_with_more_cb_modules(self):
        network = four_bus_network()
        setpoints = default_setpoints(network)
        low = solve_power_flow(network, PfControls(tap=network.arrays.tap_ref, cb=np.array([0.0])), setpoints).state
        high = solve_power_flow(network, PfControls(tap=network.arrays.tap_ref, cb=np.array([0.3])), setpoints).state
        self.assertGreater(high.vm[3], low.vm[3])

    def test_solve_power_flow_starts_from_a_given_state(self):
        network = four_bus_network()
        first = solve_power_flow(network, reference_controls(network), default_setpoints(network))
        second = solve_power_flow(
            network, reference_controls(network), default_setpoints(network), PfOptions(flat_start=False), initial=first.state
        )
        self.assertEqual(second.iterations, 0)
        self.assertStatesClose(second.state, first.state)

    def test_solve_power_flow_raises_power_flow_error_on_an_overloaded_line(self):
        text = read_file_content(settings.TEST_CASE_2BUS).replace("\t2\t1\t100\t0", "\t2\t1\t1000\t0")
        network = build_network(parse_matpower(text))
        with self.assertRaises(PowerFlowError):
            solve_power_flow(network, reference_controls(network), default_setpoints(network))

    def test_solve_power_flow_raises_non_convergence_error_when_out_of_iterations(self):
        network = four_bus_network()
        with self.assertRaises(NonConvergenceError) as context:
            solve_power_flow(network, reference_controls(network), default_setpoints(network), PfOptions(max_iter=0))
        self.assertEqual(context.exception.iteration, 0)

    def test_pf_options_reject_non_positive_tolerance(self):
        with self.assertRaises(ValueError):
            PfOptions(tol=0)

    def test_default_setpoints_use_the_generator_voltage_setpoints(self):
        network = four_bus_network()
        setpoints = default_setpoints(network)
        self.assertIsInstance(setpoints, PfSetpoints)
        np.testing.assert_array_equal(setpoints.vm, [1.0, 1.0, 1.0, 1.0])
        np.testing.assert_allclose(setpoints.pg, [0.6, 0.3])
