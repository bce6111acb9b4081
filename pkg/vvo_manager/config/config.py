from copy import deepcopy
from dataclasses import dataclass, field
from logging import getLogger
from os import getcwd
from os.path import abspath, dirname, realpath
from typing import Any, Dict, List, Optional, Tuple

import psutil

from vvo_manager.caseio.devices import DeviceConfig
from vvo_manager.conf import settings
from vvo_manager.nlp.problem import NlpOptions
from vvo_manager.utils.files import get_yaml_content
from vvo_manager.vvo.scenario import ObjectiveConfig, ScenarioConfig

logger = getLogger(__name__)


def get_run_spec(path: Optional[str] = None) -> dict:
    """
    Produces the run spec that can be validated by ValidateRunSpec
    :param str path: YAML run spec to load, None to start from an empty spec (command line flags only)
    :return: dict: The run spec, with the directory relative case paths resolve against
    """
    logger.debug("Getting run spec")
    config = get_yaml_content(path) if path else {}
    if not isinstance(config, dict):
        config = {"_invalid": config}
    config["config_dir"] = dirname(realpath(path)) if path else getcwd()
    return config


def apply_overrides(config: dict, overrides: Dict[str, Any]) -> dict:
    """
    Put command line values on top of a run spec, None values leave the spec alone
    :param dict config: The run spec from get_run_spec()
    :param dict overrides: Flag values keyed by the argparse destination
    :return: dict: The updated run spec
    """
    config = deepcopy(config)

    def section(name: str) -> dict:
        if not isinstance(config.get(name), dict):
            config[name] = {}
        return config[name]

    if overrides.get("case") is not None:
        config["case"] = abspath(overrides["case"])
    if overrides.get("lambda_p") is not None:
        section("grid")["lambda_p"] = overrides["lambda_p"]
    if overrides.get("tap_dev") is not None or overrides.get("cb_max") is not None:
        grid = section("grid")
        grid.pop("ranges", None)
        for key in ("tap_dev", "cb_max"):
            if overrides.get(key) is not None:
                grid[key] = overrides[key]
    for key in ("tol", "max_iter", "hessian"):
        if overrides.get(key) is not None:
            section("solver")[key] = overrides[key]
    if overrides.get("output") is not None:
        section("output")["path"] = abspath(overrides["output"])
    if overrides.get("format") is not None:
        section("output")["format"] = overrides["format"]
    if overrides.get("save_states") is not None:
        config["states_dir"] = abspath(overrides["save_states"])
    for key in ("jobs", "enumerate_limit"):
        if overrides.get(key) is not None:
            config[key] = overrides[key]
    if overrides.get("enumerate"):
        config["enumerate"] = True
    return config


def resolve_jobs(jobs: int) -> int:
    """0 means one worker per physical core"""
    if jobs == 0:
        return psutil.cpu_count(logical=False) or 1
    return jobs


@dataclass(frozen=True)
class RunSpec:
    case: str
    lambda_p: Tuple[float, ...] = tuple(settings.DEFAULT_LAMBDA_P)
    ranges: Tuple[Tuple[int, int], ...] = tuple(settings.DEFAULT_RANGES)
    objective: Dict[str, float] = field(default_factory=lambda: dict(settings.DEFAULT_OBJECTIVE))
    devices: DeviceConfig = field(default_factory=DeviceConfig)
    solver: NlpOptions = field(default_factory=NlpOptions)
    output_path: Optional[str] = None
    output_format: str = "text"
    jobs: int = settings.DEFAULT_JOBS
    enumerate: bool = False
    enumerate_limit: int = settings.DEFAULT_ENUMERATE_LIMIT
    states_dir: Optional[str] = None

    @classmethod
    def from_config(cls, config: dict) -> "RunSpec":
        """
        :param dict config: A run spec updated by ValidateRunSpec
        """
        return cls(
            case=config["case"],
            lambda_p=tuple(config["grid"]["lambda_p"]),
            ranges=tuple(tuple(pair) for pair in config["grid"]["ranges"]),
            objective=dict(config["objective"]),
            devices=DeviceConfig(**config["devices"]),
            solver=NlpOptions(**config["solver"]),
            output_path=config["output"]["path"],
            output_format=config["output"]["format"],
            jobs=resolve_jobs(config["jobs"]),
            enumerate=config["enumerate"],
            enumerate_limit=config["enumerate_limit"],
            states_dir=config["states_dir"],
        )

    def scenarios(self) -> List[ScenarioConfig]:
        """One scenario per grid cell, grouped by lambda_p"""
        return [
            ScenarioConfig(objective=ObjectiveConfig(lambda_p=lambda_p, **self.objective), tap_dev_steps=tap_dev, cb_max_modules=cb_max)
            for lambda_p in self.lambda_p
            for tap_dev, cb_max in self.ranges
        ]
