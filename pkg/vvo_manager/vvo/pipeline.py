"""
Relax, round and resolve.

1. solve the VVO problem with every device relaxed to the interval spanned by its restricted set
2. round the fractional device settings onto their sets
3. solve again with the rounded devices fixed, starting from the relaxed solution
The resolved state is then verified independently before the run counts as a success.
"""
from dataclasses import dataclass
from enum import Enum
from logging import getLogger
from typing import Any, Dict, Optional

import numpy as np

from vvo_manager.conf import settings
from vvo_manager.metrics.metrics import MetricsReport, compute_metrics
from vvo_manager.network.model import Network, OperatingState
from vvo_manager.network.snapshot import state_to_dict
from vvo_manager.nlp.ipm import solve_nlp
from vvo_manager.nlp.problem import NlpOptions
from vvo_manager.vvo.model import DeviceTreatment, build_vvo
from vvo_manager.vvo.reference import ReferenceSolution, solve_reference_acopf
from vvo_manager.vvo.rounding import round_devices
from vvo_manager.vvo.scenario import ScenarioConfig, scenario_sets
from vvo_manager.vvo.verify import check_state

logger = getLogger(__name__)


class PipelineStatus(Enum):
    SUCCESS = "success"
    NO_SOLUTION_FOUND = "no-solution-found"


class Stage(Enum):
    RELAXED = "relaxed"
    FIXED = "fixed"
    VERIFICATION = "verification"


@dataclass(frozen=True, eq=False)
class PipelineResult:
    scenario: ScenarioConfig
    status: PipelineStatus
    reference_state: OperatingState
    failed_stage: Optional[Stage] = None
    fractional_tap: Optional[np.ndarray] = None
    fractional_cb: Optional[np.ndarray] = None
    rounded_tap: Optional[np.ndarray] = None
    rounded_cb: Optional[np.ndarray] = None
    state: Optional[OperatingState] = None
    metrics: Optional[MetricsReport] = None
    objective: Optional[float] = None
    relaxed_objective: Optional[float] = None
    # Wall seconds of a stage, None unless that stage reached a locally optimal point
    t_relax: Optional[float] = None
    t_fixed: Optional[float] = None
    message: str = ""

    @property
    def succeeded(self) -> bool:
        return self.status is PipelineStatus.SUCCESS

    def to_dict(self) -> Dict[str, Any]:
        def listed(values):
            return None if values is None else [float(v) for v in values]

        objective = self.scenario.objective
        return {
            "scenario": {
                "lambda_v": objective.lambda_v,
                "lambda_q": objective.lambda_q,
                "lambda_p": objective.lambda_p_label(),
                "lambda_c": objective.lambda_c,
                "tap_dev_steps": self.scenario.tap_dev_steps,
                "cb_min_modules": self.scenario.cb_min_modules,
                "cb_max_modules": self.scenario.cb_max_modules,
            },
            "status": self.status.value,
            "failed_stage": self.failed_stage.value if self.failed_stage else None,
            "message": self.message,
            "fractional": {"tap": listed(self.fractional_tap), "cb": listed(self.fractional_cb)},
            "rounded": {"tap": listed(self.rounded_tap), "cb": listed(self.rounded_cb)},
            "objective": self.objective,
            "relaxed_objective": self.relaxed_objective,
            "metrics": self.metrics.to_dict() if self.metrics else None,
            "timings": {"t_relax": self.t_relax, "t_fixed": self.t_fixed},
            "state": state_to_dict(self.state) if self.state is not None else None,
        }


def run_pipeline(
    network: Network, scenario: ScenarioConfig, reference: Optional[ReferenceSolution] = None, options: NlpOptions = None
) -> PipelineResult:
    """
    Run relax, round and resolve for one scenario
    :param Network network: The network as built from the case
    :param ScenarioConfig scenario: Objective weights and device ranges
    :param ReferenceSolution reference: Reference ACOPF, solved here if None
    :param NlpOptions options: Solver options for both solves
    :return: PipelineResult: status no-solution-found names the stage that failed
    :raises ReferenceOpfError: if the reference ACOPF has to be solved here and fails
    """
    reference = reference or solve_reference_acopf(network, options)
    network = reference.network
    arrays = network.arrays
    sets = scenario_sets(network, scenario)
    logger.info(
        "Running scenario lambda_p={} taps {} cbs {}".format(scenario.objective.lambda_p_label(), scenario.tap_label(), scenario.cb_label())
    )

    relaxed = build_vvo(network, scenario.objective, sets, DeviceTreatment.relaxed())
    relaxed_solution = solve_nlp(relaxed, relaxed.initial_point(reference.state), options)
    common = {"scenario": scenario, "reference_state": reference.state}
    if not relaxed_solution.is_optimal:
        logger.warning("Relaxed VVO failed with status {} after {:.2f}s".format(relaxed_solution.status.value, relaxed_solution.wall_time))
        return PipelineResult(
            status=PipelineStatus.NO_SOLUTION_FOUND, failed_stage=Stage.RELAXED, message=relaxed_solution.status.value, **common
        )

    fractional_tap, fractional_cb = relaxed.device_values(relaxed_solution.x)
    rounded_tap, rounded_cb = round_devices(fractional_tap, fractional_cb, sets, arrays.tap_ref, arrays.b_ref)
    common.update(
        t_relax=relaxed_solution.wall_time,
        fractional_tap=fractional_tap,
        fractional_cb=fractional_cb,
        rounded_tap=rounded_tap,
        rounded_cb=rounded_cb,
        relaxed_objective=relaxed_solution.objective,
    )
    logger.debug("Rounded {} taps and {} cbs".format(int(np.sum(arrays.is_transformer)), len(rounded_cb)))

    fixed = build_vvo(network, scenario.objective, sets, DeviceTreatment.fixed(rounded_tap, rounded_cb))
    fixed_solution = solve_nlp(fixed, fixed.initial_point(relaxed.state_at(relaxed_solution.x)), options)
    if not fixed_solution.is_optimal:
        logger.warning("Fixed-device VVO failed with status {} after {:.2f}s".format(fixed_solution.status.value, fixed_solution.wall_time))
        return PipelineResult(
            status=PipelineStatus.NO_SOLUTION_FOUND, failed_stage=Stage.FIXED, message=fixed_solution.status.value, **common
        )
    common["t_fixed"] = fixed_solution.wall_time

    state = fixed.state_at(fixed_solution.x)
    check = check_state(network, state, sets, settings.FEASIBILITY_TOLERANCE)
    if not check.ok:
        logger.warning("Resolved state failed verification: {}".format(check.violations[0]))
        return PipelineResult(
            status=PipelineStatus.NO_SOLUTION_FOUND,
            failed_stage=Stage.VERIFICATION,
            message=str(check.violations[0]),
            state=state,
            objective=fixed_solution.objective,
            **common
        )

    metrics = compute_metrics(state, network, common["t_relax"], common["t_fixed"])
    logger.info(
        "Scenario solved: MAE_v {:.4f} MAE_q {:.2f} T_r {:.1f}s T_f {:.1f}s".format(
            metrics.mae_v, metrics.mae_q, common["t_relax"], common["t_fixed"]
        )
    )
    return PipelineResult(
        status=PipelineStatus.SUCCESS, state=state, metrics=metrics, objective=fixed_solution.objective, **common
    )
