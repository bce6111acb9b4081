from math import inf, radians

from vvo_manager.caseio.build import build_network
from vvo_manager.caseio.devices import DeviceConfig
from vvo_manager.caseio.matpower import load_case, parse_matpower
from vvo_manager.conf import settings
from vvo_manager.exceptions import NetworkBuildError
from vvo_manager.network.validate import validate
from vvo_manager.tests import VVOTestCase
from vvo_manager.tests.caseio.test_matpower import BRANCH, BUS, GEN, case_text


class TestBuildNetwork(VVOTestCase):
    def setUp(self) -> None:
        self.network = build_network(load_case(settings.TEST_CASE_4BUS))

    def test_build_network_counts_the_devices(self):
        stats = self.network.statistics()
        self.assertEqual((stats.buses, stats.generators, stats.cbs, stats.lines, stats.transformers), (4, 2, 1, 3, 1))

    def test_build_network_counts_every_in_service_branch_as_a_line(self):
        pairs = [(i, i + 1) for i in range(1, 14)] + [(1, 5), (2, 4), (2, 5), (4, 7), (4, 9), (5, 6), (6, 11)]
        ratios = {(4, 7): 0.978, (4, 9): 0.969, (5, 6): 0.932}
        rows = ["\t{}\t{}\t0.01\t0.1\t0\t0\t0\t0\t{}\t0\t1\t-360\t360;".format(f, t, ratios.get((f, t), 0)) for f, t in pairs]
        rows.append("\t1\t14\t0.01\t0.1\t0\t0\t0\t0\t0\t0\t0\t-360\t360;")
        buses = ["\t1\t3\t0\t0\t0\t0\t1\t1\t0\t230\t1\t1.1\t0.9;"]
        buses += ["\t{}\t1\t10\t2\t0\t0\t1\t1\t0\t230\t1\t1.1\t0.9;".format(i) for i in range(2, 15)]
        bus = "mpc.bus = [\n{}\n];\n".format("\n".join(buses))
        branch = "mpc.branch = [\n{}\n];\n".format("\n".join(rows))
        stats = build_network(parse_matpower(case_text(bus=bus, branch=branch))).statistics()
        self.assertEqual((stats.buses, stats.lines, stats.transformers), (14, 20, 3))

    def test_build_network_produces_a_valid_network(self):
        self.assertEqual(validate(self.network), [])

    def test_build_network_converts_loads_to_per_unit(self):
        bus = self.network.buses[3]
        self.assertAlmostEqual(bus.pd, 0.6)
        self.assertAlmostEqual(bus.qd, 0.25)

    def test_build_network_marks_the_slack_bus(self):
        self.assertEqual(self.network.slack_bus, 0)
        self.assertTrue(self.network.buses[0].is_slack)

    def test_build_network_converts_costs_to_per_unit_dispatch(self):
        c2, c1, c0 = self.network.generators[0].cost
        self.assertAlmostEqual(c2, 100.0)
        self.assertAlmostEqual(c1, 2000.0)
        self.assertEqual(c0, 0.0)
        self.assertAlmostEqual(self.network.generators[0].cost_at(0.6), 100.0 * 0.36 + 2000.0 * 0.6)

    def test_build_network_gives_transformers_the_full_tap_grid(self):
        transformer = self.network.branches[1]
        self.assertTrue(transformer.is_transformer)
        self.assertEqual(transformer.tap_ref, 1.0)
        self.assertEqual(transformer.tap_set, DeviceConfig().tap_grid())

    def test_build_network_gives_lines_a_unit_tap(self):
        line = self.network.branches[0]
        self.assertFalse(line.is_transformer)
        self.assertEqual(line.tap_set, (1.0,))

    def test_build_network_splits_the_shunt_into_fixed_part_and_cb(self):
        shunt = self.network.shunts[0]
        self.assertEqual(shunt.bus, 3)
        self.assertAlmostEqual(shunt.bs0, 0.0)
        self.assertEqual(shunt.b_ref, 0.1)
        self.assertEqual(shunt.cb_set, (0.0, 0.1, 0.2, 0.3))

    def test_build_network_converts_angle_limits_to_radians(self):
        branch = self.network.branches[0]
        self.assertAlmostEqual(branch.angle_min, radians(-30))
        self.assertAlmostEqual(branch.angle_max, radians(30))

    def test_build_network_converts_rate_a_to_per_unit(self):
        self.assertAlmostEqual(self.network.branches[0].s_max, 2.5)

    def test_build_network_reads_the_reference_dispatch(self):
        self.assertAlmostEqual(self.network.generators[1].p_ref, 0.3)
        self.assertAlmostEqual(self.network.generators[1].q_ref, 0.1)


class TestBuildNetworkEdgeCases(VVOTestCase):
    def test_build_network_leaves_unlimited_branches_unbounded(self):
        network = build_network(load_case(settings.TEST_CASE_2BUS))
        branch = network.branches[0]
        self.assertEqual(branch.s_max, 0.0)
        self.assertFalse(branch.is_thermally_limited)
        self.assertEqual((branch.angle_min, branch.angle_max), (-inf, inf))

    def test_build_network_snaps_off_grid_taps(self):
        branch = BRANCH.replace("\t0\t0\t1\t-360", "\t1.013\t0\t1\t-360")
        network = build_network(parse_matpower(case_text(branch=branch)))
        self.assertEqual(network.branches[0].tap_ref, 1.0125)

    def test_build_network_drops_out_of_service_generators(self):
        gen = GEN.replace("];", "\t2\t10\t0\t10\t-10\t1\t100\t0\t50\t0;\n];")
        gencost = "mpc.gencost = [\n\t2\t0\t0\t3\t0.01\t20\t0;\n\t2\t0\t0\t3\t0\t10\t0;\n];\n"
        network = build_network(parse_matpower(case_text(gen=gen, gencost=gencost)))
        self.assertEqual(len(network.generators), 1)

    def test_build_network_treats_pure_conductance_as_a_shunt_without_cb(self):
        bus = BUS.replace("\t100\t20\t0\t0\t", "\t100\t20\t5\t0\t")
        network = build_network(parse_matpower(case_text(bus=bus)))
        self.assertEqual(len(network.shunts), 1)
        self.assertFalse(network.shunts[0].has_cb)
        self.assertAlmostEqual(network.shunts[0].gs, 0.05)

    def test_build_network_raises_build_error_on_two_slack_buses(self):
        bus = BUS.replace("\t2\t1\t100", "\t2\t3\t100")
        with self.assertRaises(NetworkBuildError):
            build_network(parse_matpower(case_text(bus=bus)))

    def test_build_network_raises_build_error_on_disconnected_network(self):
        branch = BRANCH.replace("\t0\t1\t-360", "\t0\t0\t-360")
        with self.assertRaises(NetworkBuildError) as context:
            build_network(parse_matpower(case_text(branch=branch)))
        self.assertIn("bus 2", str(context.exception))

    def test_build_network_raises_build_error_on_zero_impedance(self):
        branch = BRANCH.replace("\t0.01\t0.1\t", "\t0\t0\t")
        with self.assertRaises(NetworkBuildError):
            build_network(parse_matpower(case_text(branch=branch)))
