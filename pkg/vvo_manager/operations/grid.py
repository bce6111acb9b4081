from concurrent.futures import ProcessPoolExecutor
from logging import getLogger
from typing import List, Optional, Sequence, Tuple

from vvo_manager.network.model import Network
from vvo_manager.nlp.problem import NlpOptions
from vvo_manager.vvo.pipeline import PipelineResult, run_pipeline
from vvo_manager.vvo.reference import ReferenceSolution
from vvo_manager.vvo.scenario import ScenarioConfig

logger = getLogger(__name__)


def _run_cell(job: Tuple[Network, ScenarioConfig, ReferenceSolution, Optional[NlpOptions]]) -> PipelineResult:
    network, scenario, reference, options = job
    return run_pipeline(network, scenario, reference, options)


def run_scenario_grid(
    network: Network, scenarios: Sequence[ScenarioConfig], reference: ReferenceSolution, options: NlpOptions = None, jobs: int = 1
) -> List[PipelineResult]:
    """
    Run the pipeline for every scenario, each cell with its own solver state
    :param Network network: The network
    :param scenarios: The grid cells
    :param ReferenceSolution reference: The shared reference ACOPF
    :param NlpOptions options: Solver options
    :param int jobs: Number of worker processes, 1 runs the cells in this process
    :return: list: PipelineResult per scenario, in scenario order
    """
    cells = [(network, scenario, reference, options) for scenario in scenarios]
    if jobs <= 1 or len(cells) <= 1:
        return [_run_cell(cell) for cell in cells]
    workers = min(jobs, len(cells))
    logger.info("Running {} grid cells on {} worker processes".format(len(cells), workers))
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(_run_cell, cells))
