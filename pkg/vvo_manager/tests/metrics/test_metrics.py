from dataclasses import replace

import numpy as np

from vvo_manager.exceptions import ZeroReferenceCostError
from vvo_manager.metrics.metrics import compute_metrics, delta_pg, generation_cost, losses, mae_q, mae_v, pct_delta_cost
from vvo_manager.tests import VVOTestCase
from vvo_manager.tests.network import flat_state, four_bus_network


class TestMetrics(VVOTestCase):
    def setUp(self) -> None:
        self.network = four_bus_network()
        self.state = replace(
            flat_state(self.network),
            vm=[1.0, 1.02, 0.97, 0.95],
            pg=[0.7, 0.3],
            qg=[0.2, -0.1],
            pf=[0.4, 0.3, 0.2],
            pt=[-0.39, -0.3, -0.19],
        )

    def test_mae_v_is_the_mean_absolute_deviation_from_one(self):
        self.assertAlmostEqual(mae_v(self.state), (0.0 + 0.02 + 0.03 + 0.05) / 4)

    def test_mae_q_is_in_mvar(self):
        self.assertAlmostEqual(mae_q(self.state, self.network), 15.0)

    def test_delta_pg_compares_to_the_reference_dispatch_in_mw(self):
        # p_ref is (0.6, 0.3)
        self.assertAlmostEqual(delta_pg(self.state, self.network), 5.0)

    def test_losses_sum_both_branch_ends_in_mw(self):
        self.assertAlmostEqual(losses(self.state, self.network), 2.0)

    def test_generation_cost(self):
        self.assertAlmostEqual(generation_cost(np.array([0.6, 0.3]), self.network), 100 * 0.36 + 1200 + 200 * 0.09 + 450)

    def test_pct_delta_cost_is_relative_to_the_reference_cost(self):
        reference = generation_cost(np.array([0.6, 0.3]), self.network)
        current = generation_cost(np.array([0.7, 0.3]), self.network)
        self.assertAlmostEqual(pct_delta_cost(self.state, self.network), 100 * (current - reference) / reference)

    def test_pct_delta_cost_raises_for_a_free_reference(self):
        network = self.network.with_reference([0.0, 0.0], [0.0, 0.0])
        with self.assertRaises(ZeroReferenceCostError):
            pct_delta_cost(self.state, network)

    def test_compute_metrics_collects_every_metric(self):
        report = compute_metrics(self.state, self.network, 1.5, 0.5)
        self.assertAlmostEqual(report.mae_q, 15.0)
        self.assertEqual((report.t_relax, report.t_fixed), (1.5, 0.5))
        self.assertEqual(set(report.to_dict()), {"mae_v", "mae_q", "delta_pg", "pct_delta_cost", "losses", "t_relax", "t_fixed"})

    def test_compute_metrics_leaves_the_cost_change_empty_for_a_free_reference(self):
        network = self.network.with_reference([0.0, 0.0], [0.0, 0.0])
        report = compute_metrics(self.state, network)
        self.assertIsNone(report.pct_delta_cost)
        self.assertAlmostEqual(report.delta_pg, 50.0)

    def test_metrics_of_an_empty_state_are_zero(self):
        state = replace(self.state, vm=[], qg=[], pg=[])
        self.assertEqual(mae_v(state), 0.0)
        self.assertEqual(mae_q(state, self.network), 0.0)
        self.assertEqual(delta_pg(state, self.network), 0.0)
