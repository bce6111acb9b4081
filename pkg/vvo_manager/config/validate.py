from copy import deepcopy
from dataclasses import fields
from logging import getLogger
from math import inf, isnan
from os.path import isabs, isdir, isfile, join, dirname, abspath
from typing import Any, List, Optional

from vvo_manager.caseio.devices import DeviceConfig
from vvo_manager.conf import settings
from vvo_manager.vvo.scenario import expand_ranges

logger = getLogger(__name__)

INFINITY_TOKENS = ("inf", ".inf", "infinity", "∞")
OBJECTIVE_KEYS = ("lambda_v", "lambda_q", "lambda_c")
SOLVER_DEFAULTS = {"tol": settings.NLP_TOLERANCE, "max_iter": settings.NLP_MAX_ITERATIONS, "hessian": "auto"}


def _as_list(value: Any) -> List[Any]:
    """Accepts a list, a scalar or a comma separated string"""
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def parse_weight(value: Any) -> Optional[float]:
    """
    :return: float: the weight, inf for the infinity tokens, None if the value is not a non-negative number
    """
    if isinstance(value, bool):
        return None
    if isinstance(value, str):
        if value.strip().lower() in INFINITY_TOKENS:
            return inf
        try:
            value = float(value)
        except ValueError:
            return None
    if not isinstance(value, (int, float)) or isnan(value) or value < 0:
        return None
    return float(value)


def _as_count(value: Any) -> Optional[int]:
    if isinstance(value, bool):
        return None
    if isinstance(value, str) and value.strip().isdigit():
        return int(value)
    if isinstance(value, int) and value >= 0:
        return value
    return None


class ValidateRunSpec:
    """
    Validates the run spec generated by get_run_spec() and fills in defaults for missing values
    """

    def __init__(self, config: dict):
        """
        :param dict config: The run spec generated by get_run_spec(), possibly with command line overrides
        """
        self._all_ok = True
        self._validators_ran = 0
        self._new_config = deepcopy(config)
        self.default_message = ". Please check your run spec"
        self.config = config

    def __str__(self) -> str:
        return "VVO run spec validator, current_state: {}, amount of validators run: {}".format(
            "OK" if self._all_ok else "NOT OK", self._validators_ran
        )

    @property
    def config_validation_successful(self) -> bool:
        """
        This property can be called to see if any unrecoverable errors in the run spec have been found
        """
        return self._all_ok

    @property
    def updated_config(self) -> dict:
        """
        This property contains the normalised run spec, with defaults for everything that was left out
        """
        return self._new_config

    @property
    def validators_ran(self) -> int:
        return self._validators_ran

    def _error(self, message: str):
        logger.error("{}{}".format(message, self.default_message))
        self._all_ok = False

    def _section(self, name: str) -> Optional[dict]:
        value = self.config.get(name, {})
        if value is None:
            return {}
        if not isinstance(value, dict):
            self._error("Run spec item '{}' is not a dict".format(name))
            return None
        return value

    def validate(self):
        """
        Run all validation functions
        """
        self._all_ok = True
        if "_invalid" in self.config:
            self._error("Run spec is not a YAML mapping")
            return
        self.validate_case()
        self.validate_grid()
        self.validate_objective()
        self.validate_devices()
        self.validate_solver()
        self.validate_output()
        self.validate_execution()

    def validate_case(self):
        self._validators_ran += 1
        if not self.config.get("case"):
            self._error("Run spec item 'case' missing, pass a MATPOWER case with --case or in the run spec")
            return
        if not isinstance(self.config["case"], str):
            self._error("Run spec item 'case: {}' is not a path".format(self.config["case"]))
            return
        path = self.config["case"]
        if not isabs(path):
            path = join(self.config.get("config_dir", settings.CONFIG_FILE_DIR), path)
        if not isfile(path):
            self._error("Case file {} does not exist".format(path))
            return
        self._new_config["case"] = path

    def validate_grid(self):
        # pylint: disable=too-many-branches
        self._validators_ran += 1
        grid = self._section("grid")
        if grid is None:
            return
        lambda_p = []
        for value in _as_list(grid.get("lambda_p", settings.DEFAULT_LAMBDA_P)):
            weight = parse_weight(value)
            if weight is None:
                self._error("lambda_p value '{}' is not a non-negative number or 'inf'".format(value))
            else:
                lambda_p.append(weight)

        ranges = []
        if "ranges" in grid:
            for pair in _as_list(grid["ranges"]):
                if not isinstance(pair, (list, tuple)) or len(pair) != 2 or None in (_as_count(pair[0]), _as_count(pair[1])):
                    self._error("Grid range '{}' is not a [tap deviation, CB maximum] pair of counts".format(pair))
                    continue
                ranges.append((_as_count(pair[0]), _as_count(pair[1])))
        elif "tap_dev" in grid or "cb_max" in grid:
            tap_devs = [_as_count(value) for value in _as_list(grid.get("tap_dev", [t for t, _ in settings.DEFAULT_RANGES]))]
            cb_maxes = [_as_count(value) for value in _as_list(grid.get("cb_max", [c for _, c in settings.DEFAULT_RANGES]))]
            if None in tap_devs or None in cb_maxes:
                self._error("Grid tap_dev and cb_max must be lists of non-negative counts")
            else:
                ranges = expand_ranges(tap_devs, cb_maxes)
        else:
            ranges = list(settings.DEFAULT_RANGES)

        positions = self._tap_positions()
        for tap_dev, _ in ranges:
            if positions is not None and tap_dev > positions:
                self._error("Tap deviation {} exceeds the {} positions of the tap changer".format(tap_dev, positions))
        if not lambda_p or not ranges:
            self._error("The scenario grid is empty")
        self._new_config["grid"] = {"lambda_p": lambda_p, "ranges": ranges}

    def _tap_positions(self) -> Optional[int]:
        """The configured tap changer positions, None when the devices section is invalid and reported on its own"""
        devices = self.config.get("devices") or {}
        if not isinstance(devices, dict):
            return None
        return _as_count(devices.get("tap_positions", DeviceConfig.tap_positions))

    def validate_objective(self):
        self._validators_ran += 1
        objective = self._section("objective")
        if objective is None:
            return
        validated = {}
        for key in OBJECTIVE_KEYS:
            weight = parse_weight(objective.get(key, settings.DEFAULT_OBJECTIVE[key]))
            if weight is None or weight == inf:
                self._error("Objective weight {} must be a finite non-negative number".format(key))
            validated[key] = weight
        for key in objective:
            if key not in OBJECTIVE_KEYS:
                self._error("Unknown objective weight '{}', lambda_p is set through the grid".format(key))
        self._new_config["objective"] = validated

    def validate_devices(self):
        self._validators_ran += 1
        devices = self._section("devices")
        if devices is None:
            return
        known = {f.name for f in fields(DeviceConfig)}
        unknown = [key for key in devices if key not in known]
        if unknown:
            self._error("Unknown device settings {}, expected some of {}".format(unknown, sorted(known)))
            return
        try:
            DeviceConfig(**devices)
        except (TypeError, ValueError) as e:
            self._error("Device settings are invalid: {}".format(e))
            return
        self._new_config["devices"] = dict(devices)

    def validate_solver(self):
        self._validators_ran += 1
        solver = self._section("solver")
        if solver is None:
            return
        validated = dict(SOLVER_DEFAULTS)
        validated.update(solver)
        unknown = [key for key in solver if key not in SOLVER_DEFAULTS]
        if unknown:
            self._error("Unknown solver settings {}, expected some of {}".format(unknown, sorted(SOLVER_DEFAULTS)))
        if not isinstance(validated["tol"], (int, float)) or isinstance(validated["tol"], bool) or validated["tol"] <= 0:
            self._error("Solver tol '{}' must be a positive number".format(validated["tol"]))
        if _as_count(validated["max_iter"]) is None or isinstance(validated["max_iter"], str):
            self._error("Solver max_iter '{}' must be a non-negative integer".format(validated["max_iter"]))
        if validated["hessian"] not in settings.NLP_HESSIAN_MODES:
            self._error("Solver hessian '{}' must be one of {}".format(validated["hessian"], settings.NLP_HESSIAN_MODES))
        self._new_config["solver"] = validated

    def validate_output(self):
        self._validators_ran += 1
        output = self._section("output")
        if output is None:
            return
        validated = {"path": output.get("path"), "format": output.get("format", "text")}
        if validated["format"] not in settings.REPORT_FORMATS:
            self._error("Output format '{}' must be one of {}".format(validated["format"], settings.REPORT_FORMATS))
        path = validated["path"]
        if path is not None:
            if not isinstance(path, str):
                self._error("Output path '{}' is not a path".format(path))
            elif not isdir(dirname(abspath(path))):
                self._error("Directory of output path {} does not exist".format(path))
        self._new_config["output"] = validated

    def validate_execution(self):
        self._validators_ran += 1
        jobs = self.config.get("jobs", settings.DEFAULT_JOBS)
        if _as_count(jobs) is None or isinstance(jobs, str):
            self._error("jobs '{}' must be a non-negative integer (0 uses every physical core)".format(jobs))
        self._new_config["jobs"] = jobs
        if not isinstance(self.config.get("enumerate", False), bool):
            self._error("enumerate must be true or false")
        self._new_config["enumerate"] = self.config.get("enumerate", False)
        limit = self.config.get("enumerate_limit", settings.DEFAULT_ENUMERATE_LIMIT)
        if _as_count(limit) is None or isinstance(limit, str) or limit < 1:
            self._error("enumerate_limit '{}' must be a positive integer".format(limit))
        self._new_config["enumerate_limit"] = limit
        states_dir = self.config.get("states_dir")
        if states_dir is not None and not isdir(states_dir):
            self._error("states_dir {} is not a directory".format(states_dir))
        self._new_config["states_dir"] = states_dir
