import logging
import logging.config
from argparse import Namespace

from vvo_manager.conf import settings


def get_logging_verbosity(args: Namespace, default_verbosity: int = settings.LOGGING_DEFAULT_VERBOSITY) -> int:
    """
    Get the logging verbosity based upon any passed verbosity arguments
    :param args: Namespace, the parsed command line arguments
    :param default_verbosity: int, the initial verbosity to manipulate
    :return: int: The logging verbosity setting
    """
    logging_verbs = {0: logging.CRITICAL, 1: logging.ERROR, 2: logging.WARNING, 3: logging.INFO, 4: logging.DEBUG}
    mod = default_verbosity + args.verbose - args.quiet
    return logging_verbs[max(min(len(logging_verbs) - 1, mod), 0)]


def setup_console_logging(verbosity: int = logging.INFO, solver_log: bool = False) -> None:
    """
    :param int verbosity: Verbosity level logging.<verbosity>
    :param bool solver_log: Emit the per iteration lines of the interior point solver
    """
    config = dict(settings.LOGGING)
    config["handlers"] = {name: dict(handler) for name, handler in settings.LOGGING["handlers"].items()}
    config["handlers"]["console"]["level"] = verbosity
    config["loggers"] = dict(settings.LOGGING["loggers"])
    if solver_log:
        config["loggers"][settings.SOLVER_LOGGER_NAME] = {"level": "DEBUG"}
    logging.config.dictConfig(config)
