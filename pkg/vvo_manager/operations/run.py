from logging import getLogger
from os.path import basename, join, splitext
from typing import List, Optional

from vvo_manager.caseio.build import build_network
from vvo_manager.caseio.matpower import load_case
from vvo_manager.conf import settings
from vvo_manager.config.config import RunSpec
from vvo_manager.metrics.metrics import compute_metrics
from vvo_manager.metrics.report import OracleComparison, ReportRow, render_oracle_table, render_table
from vvo_manager.network.model import Network, OperatingState
from vvo_manager.network.snapshot import state_to_json
from vvo_manager.network.validate import ValidateNetwork
from vvo_manager.nlp.problem import NlpStatus
from vvo_manager.operations.grid import run_scenario_grid
from vvo_manager.utils.files import write_file_atomically
from vvo_manager.vvo.oracle import enumerate_oracle
from vvo_manager.vvo.pipeline import PipelineResult
from vvo_manager.vvo.reference import ReferenceSolution, solve_reference_acopf
from vvo_manager.vvo.scenario import ScenarioConfig, warn_cb_clamps

logger = getLogger(__name__)


def case_name(path: str) -> str:
    """pglib_opf_case118_ieee.m -> 118_ieee"""
    name = splitext(basename(path))[0]
    for prefix in ("pglib_opf_case", "case"):
        if name.startswith(prefix) and len(name) > len(prefix):
            return name[len(prefix) :]
    return name


def load_network(path: str, devices) -> Network:
    """
    Parse and build a case, validating the result
    :raises ValueError: if the network has invariant violations
    """
    network = build_network(load_case(path), devices)
    validator = ValidateNetwork(network)
    validator.validate()
    if not validator.network_validation_successful:
        raise ValueError("network built from {} is not valid: {}".format(path, validator.violations[0]))
    return network


def baseline_row(name: str, reference: ReferenceSolution, spec: RunSpec) -> ReportRow:
    metrics = compute_metrics(reference.state, reference.network, t_relax=reference.wall_time)
    ref_modules = spec.devices.cb_ref_modules
    return ReportRow(
        case=name,
        lambda_p="--",
        tap_range="±0",
        cb_range="{}-{}".format(ref_modules, ref_modules),
        status="reference",
        metrics=metrics,
        t_relax=reference.wall_time,
        is_baseline=True,
    )


def result_row(name: str, result: PipelineResult) -> ReportRow:
    scenario = result.scenario
    return ReportRow(
        case=name,
        lambda_p=scenario.objective.lambda_p_label(),
        tap_range=scenario.tap_label(),
        cb_range=scenario.cb_label(),
        status=result.status.value,
        metrics=result.metrics,
        t_relax=result.t_relax,
        t_fixed=result.t_fixed,
        failed_stage=result.failed_stage.value if result.failed_stage else None,
    )


def _cell_label(scenario: ScenarioConfig) -> str:
    lambda_p = scenario.objective.lambda_p_label()
    return "lp{}_t{}_c{}-{}".format(lambda_p, scenario.tap_dev_steps, scenario.cb_min_modules, scenario.cb_max_modules)


def save_states(directory: str, name: str, reference: OperatingState, results: List[PipelineResult]):
    write_file_atomically(join(directory, "{}_reference.json".format(name)), state_to_json(reference))
    for result in results:
        if result.succeeded:
            write_file_atomically(join(directory, "{}_{}.json".format(name, _cell_label(result.scenario))), state_to_json(result.state))


def compare_with_oracle(
    network: Network, reference: ReferenceSolution, results: List[PipelineResult], spec: RunSpec
) -> List[OracleComparison]:
    """
    Enumerate every scenario and set the pipeline objective next to the enumeration
    :raises EnumerationLimitError: if a scenario has more combinations than spec.enumerate_limit
    """
    comparisons = []
    for result in results:
        oracle = enumerate_oracle(network, result.scenario, spec.enumerate_limit, reference, spec.solver)
        same = oracle.lookup(result.rounded_tap, result.rounded_cb) if result.rounded_tap is not None else None
        best = oracle.best
        scenario = result.scenario
        comparisons.append(
            OracleComparison(
                label="{} {} {}".format(scenario.objective.lambda_p_label(), scenario.tap_label(), scenario.cb_label()),
                pipeline_objective=result.objective if result.succeeded else None,
                same_assignment_objective=same.objective if same is not None and same.status is NlpStatus.LOCALLY_OPTIMAL else None,
                best_objective=best.objective if best is not None else None,
                combinations=len(oracle.records),
            )
        )
    return comparisons


def _write(path: Optional[str], content: str):
    if path:
        logger.info("Writing report to {}".format(path))
        write_file_atomically(path, content)
    else:
        print(content, end="")


def run_case(spec: RunSpec) -> int:
    """
    Solve the reference ACOPF and the scenario grid of a run spec and write the report
    :param RunSpec spec: The validated run spec
    :return: int: 0 if every cell succeeded, 2 if a cell found no solution
    :raises ReferenceOpfError: if the reference ACOPF fails, nothing is written then
    """
    name = case_name(spec.case)
    network = load_network(spec.case, spec.devices)
    reference = solve_reference_acopf(network, spec.solver)
    scenarios = spec.scenarios()
    warn_cb_clamps(network, scenarios)
    results = run_scenario_grid(network, scenarios, reference, spec.solver, spec.jobs)

    rows = [baseline_row(name, reference, spec)] + [result_row(name, result) for result in results]
    report = render_table(rows, spec.output_format)
    oracle_report = None
    if spec.enumerate:
        oracle_report = render_oracle_table(compare_with_oracle(network, reference, results, spec))
        if spec.output_format == "text":
            report, oracle_report = report + "\n" + oracle_report, None

    _write(spec.output_path, report)
    if oracle_report is not None:
        _write("{}.oracle.txt".format(spec.output_path) if spec.output_path else None, oracle_report)
    if spec.states_dir:
        save_states(spec.states_dir, name, reference.state, results)

    failed = [result for result in results if not result.succeeded]
    if failed:
        logger.warning("{} of {} scenario cells found no solution".format(len(failed), len(results)))
        return settings.EXIT_CODE_NO_SOLUTION
    logger.info("All {} scenario cells succeeded".format(len(results)))
    return settings.EXIT_CODE_SUCCESS
