from argparse import Namespace, ArgumentParser
from typing import Any, Dict, Sequence

from vvo_manager.conf import settings

# Destinations that are passed on to the run spec as overrides
OVERRIDE_OPTIONS = (
    "case",
    "lambda_p",
    "tap_dev",
    "cb_max",
    "tol",
    "max_iter",
    "hessian",
    "jobs",
    "output",
    "format",
    "enumerate",
    "enumerate_limit",
    "save_states",
)
RUN_ONLY_OPTIONS = ("lambda_p", "tap_dev", "cb_max", "enumerate", "enumerate_limit", "save_states", "jobs")


def parse_vvo_args(args: Sequence = None) -> Namespace:
    parser = ArgumentParser(description="VVO-manager - volt/VAR optimisation of transmission grids with discrete taps and capacitor banks")
    parser.add_argument(
        "action",
        choices=sorted(settings.VALID_ACTIONS),
        help="The action to preform, use '<action> help' for information about that action",
    )
    parser.add_argument("config", help="Optional YAML run spec, command line options take precedence", nargs="?", default=None)

    parser.add_argument("--case", help="The MATPOWER case file")
    parser.add_argument("--output", help="Write the report (or snapshot) to this file instead of stdout")
    parser.add_argument("--format", choices=settings.REPORT_FORMATS, help="Report format (default: text)")

    grid_group = parser.add_argument_group("Scenario grid options", "These options can be specified for the run action")
    grid_group.add_argument("--lambda-p", help="Comma separated active power deviation weights, 'inf' pins the dispatch (default: 1,5,inf)")
    grid_group.add_argument("--tap-dev", help="Comma separated maximum tap deviations in steps (default: 3,16)")
    grid_group.add_argument("--cb-max", help="Comma separated maximum numbers of active CB modules (default: 2,3)")
    grid_group.add_argument("--jobs", type=int, help="Grid cells solved in parallel, 0 uses every physical core")
    grid_group.add_argument("--enumerate", action="store_true", help="Compare every cell against a brute force enumeration")
    grid_group.add_argument("--enumerate-limit", type=int, help="Maximum number of device combinations to enumerate per cell")
    grid_group.add_argument("--save-states", help="Directory to write the resolved state of every successful cell to")

    solver_group = parser.add_argument_group("Solver options")
    solver_group.add_argument("--tol", type=float, help="KKT tolerance of the interior point solver (default: 1e-6)")
    solver_group.add_argument("--max-iter", type=int, help="Iteration limit of the interior point solver (default: 3000)")
    solver_group.add_argument("--hessian", choices=settings.NLP_HESSIAN_MODES, help="Lagrangian Hessian approximation")
    solver_group.add_argument("--solver-log", action="store_true", help="Log every interior point iteration")

    check_group = parser.add_argument_group("Check options", "These options can be specified for the check action")
    check_group.add_argument("--state", help="The JSON state file to check")

    logging_group = parser.add_argument_group("Verbosity options", "Control output verbosity (can be supplied multiple times)")
    logging_group.add_argument("-v", "--verbose", action="count", default=0, help="Be more verbose")
    logging_group.add_argument("-q", "--quiet", action="count", default=0, help="Be more quiet")
    return validate_argument_sanity(parser.parse_args(args=args), parser)


def validate_argument_sanity(args: Namespace, parser: ArgumentParser) -> Namespace:
    """
    Validates the passed arguments for sanity
    :param args: Namespace, The already processed user arguments
    :param parser: ArgumentParser, The parser object
    :return: Namespace, The validated arguments
    :raises: SystemExit, if arguments are not sane
    """
    if args.config and args.config.lower() == "help":
        return args
    if args.action in settings.CONFIG_REQUIRED_ACTIONS and not args.config and not args.case:
        parser.error("This action requires a case, pass --case or a run spec")
    if args.action == "check" and not args.state:
        parser.error("The check action requires a state file, pass --state")
    if args.state and args.action != "check":
        parser.error("The state option only makes sense with the 'check' action")
    for option in RUN_ONLY_OPTIONS:
        value = getattr(args, option)
        if value not in (None, False) and args.action != "run":
            parser.error("The {} option only makes sense with the 'run' action".format(option.replace("_", "-")))
    if args.jobs is not None and args.jobs < 0:
        parser.error("--jobs must not be negative")
    return args


def get_overrides(args: Namespace) -> Dict[str, Any]:
    """
    :return: dict: the run spec overrides given on the command line
    """
    return {option: getattr(args, option) for option in OVERRIDE_OPTIONS}
