from logging import getLogger
from os.path import join

from vvo_manager.conf import settings

logger = getLogger(__name__)


def default_grid_text() -> str:
    """
    :return: str: The default scenario grid, in the labels used by the report
    """
    lambdas = ", ".join("inf" if value == float("inf") else "{:g}".format(value) for value in settings.DEFAULT_LAMBDA_P)
    ranges = ", ".join("±{} 0-{}".format(tap_dev, cb_max) for tap_dev, cb_max in settings.DEFAULT_RANGES)
    return "Default grid: lambda_p {} crossed with tap/CB ranges {}.".format(lambdas, ranges)


def display_help_for_action(action: str) -> None:
    """
    Print a help text for the supplied action
    Actions that read a case also point to the run spec documentation, 'run' lists its default grid
    :param str action: The action to display the help text for
    """
    if action not in settings.HELP_TEXT_ACTION_MAPPING:
        logger.warning("No help text available for action {}".format(action))
        return
    logger.debug("Displaying help text for action {}".format(action))
    lines = [settings.HELP_TEXT_ACTION_MAPPING[action].strip()]
    if action == "run":
        lines.append(default_grid_text())
    if action in settings.CONFIG_REQUIRED_ACTIONS:
        lines.append("Run spec format: {}".format(join(settings.CONFIG_FILE_DIR, "README.md")))
    print("\n".join(lines))
