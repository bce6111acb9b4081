import sys
from logging import getLogger
from typing import Sequence

from vvo_manager.log import setup_console_logging, get_logging_verbosity
from vvo_manager.actions.manager import ActionManager
from vvo_manager.argeparser import parse_vvo_args, get_overrides

logger = getLogger(__name__)


def main(args: Sequence = None) -> int:
    """
    Program entry point
    :param list args: The pre-cooked arguments to pass to the ArgParser
    :return int: exit_code
    """
    args = parse_vvo_args(args)
    setup_console_logging(verbosity=get_logging_verbosity(args), solver_log=args.solver_log)
    # Let the action manager handle the rest
    manager = ActionManager(config_path=args.config, overrides=get_overrides(args), state_path=args.state)
    return manager.execute(args.action)


if __name__ == "__main__":
    sys.exit(main())
