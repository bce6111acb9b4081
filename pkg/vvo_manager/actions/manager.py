from logging import getLogger
from typing import Any, Dict, Optional, Tuple

from vvo_manager.caseio.devices import DeviceConfig
from vvo_manager.conf import settings
from vvo_manager.config.config import RunSpec, apply_overrides, get_run_spec
from vvo_manager.config.validate import ValidateRunSpec
from vvo_manager.actions.help import display_help_for_action
from vvo_manager.exceptions import (
    CaseParseError,
    EnumerationLimitError,
    NetworkBuildError,
    PowerFlowError,
    ReferenceOpfError,
    StateFormatError,
)
from vvo_manager.operations.check import check_state_file
from vvo_manager.operations.run import run_case
from vvo_manager.operations.show import show_case, snapshot_case
from vvo_manager.utils.version import show_version

logger = getLogger(__name__)

# Failures that end an action with the error exit code instead of a traceback
HANDLED_ERRORS = (
    CaseParseError,
    NetworkBuildError,
    PowerFlowError,
    ReferenceOpfError,
    EnumerationLimitError,
    StateFormatError,
    IOError,
    ValueError,
)


class ActionManager:
    """
    The VVO Action Manager class
    Use this class to initiate specific VVO actions in a controlled manner
    """

    def __init__(self, config_path: str = None, overrides: Dict[str, Any] = None, state_path: str = None):
        """
        :param str config_path: The path to a YAML run spec, or 'help'
        :param dict overrides: Command line values that take precedence over the run spec
        :param str state_path: The state file for the check action
        """
        self.config_path = config_path
        self.overrides = overrides or {}
        self.state_path = state_path
        self.config: Optional[dict] = None

    def execute(self, action: str) -> int:
        """
        Execute an action
        :param str action: The name of the action to execute
        :raises NotImplementedError: If the action is unknown
        :return: int: returncode of the action
        """
        if action not in settings.VALID_ACTIONS:
            raise NotImplementedError("{} is not a valid action".format(action))
        # Check if the operator only wants to see the help text
        if self.config_path and self.config_path.lower() == "help":
            display_help_for_action(action)
            return settings.EXIT_CODE_SUCCESS
        try:
            if action in settings.CONFIG_REQUIRED_ACTIONS and not self.parse_config():
                logger.critical("Run spec NOT OK, can't proceed")
                return settings.EXIT_CODE_ERROR
            logger.info("Initiating {} action".format(action))
            return getattr(self, "preform_{}_action".format(action))()
        except HANDLED_ERRORS as e:
            logger.critical("{} action failed: {}".format(action, e))
            return settings.EXIT_CODE_ERROR

    def parse_config(self) -> bool:
        """
        Loads the run spec, applies the command line overrides and validates the result
        :return: bool: True if the run spec is usable, False otherwise
        """
        config = apply_overrides(get_run_spec(self.config_path), self.overrides)
        check_result, self.config = self.check_and_update_config(config)
        return check_result

    @staticmethod
    def check_and_update_config(config: dict) -> Tuple[bool, dict]:
        """
        Validates a run spec, the validator fills in defaults for missing values
        :return: bool: True if the run spec validated successfully, False otherwise / dict: The updated run spec
        """
        validator = ValidateRunSpec(config)
        validator.validate()
        if not validator.config_validation_successful:
            logger.error("The run spec seems to have unrecoverable issues, please fix them before proceeding")
            return False, dict()
        logger.debug("Run spec validation successful")
        return True, validator.updated_config

    @property
    def devices(self) -> DeviceConfig:
        return DeviceConfig(**self.config["devices"])

    def preform_run_action(self) -> int:
        return run_case(RunSpec.from_config(self.config))

    def preform_check_action(self) -> int:
        if not self.state_path:
            raise StateFormatError("the check action needs a state file (--state)")
        return check_state_file(self.config["case"], self.state_path, self.devices)

    def preform_show_action(self) -> int:
        if show_case(self.config["case"], self.devices):
            return settings.EXIT_CODE_SUCCESS
        return settings.EXIT_CODE_ERROR

    def preform_snapshot_action(self) -> int:
        snapshot_case(self.config["case"], self.devices, self.config["output"]["path"])
        return settings.EXIT_CODE_SUCCESS

    @staticmethod
    def preform_version_action() -> int:
        show_version()
        return settings.EXIT_CODE_SUCCESS
