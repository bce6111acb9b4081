import sys
from pathlib import Path
from os.path import join
from os import getenv

PYTHON_PACKAGE_NAME = "vvo-manager"
PROJECT_DIR = Path(__file__).resolve().parent.parent.parent
YAMLLINT_CONFIG_FILE = join(PROJECT_DIR, "yamllint.yaml")
CONFIG_FILE_DIR = join(PROJECT_DIR, "config")
CASE_FILE_DIR = join(CONFIG_FILE_DIR, "cases")
# Directory holding the pglib_opf_case*.m files, used by the acceptance tests
PGLIB_DIR = getenv("VVO_PGLIB_DIR", join(PROJECT_DIR, "pglib"))

# Log settings
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "console": {
            "()": "vvo_manager.utils.logging.formatters.ConsoleFormatter",
            "fmt": "%(asctime)s [%(name)8s] [%(levelname)s] %(message)s",
            "colored": sys.stderr.isatty,  # StreamHandler uses stderr by default
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "console",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "DEBUG",
    },
    # Silence debug heavy loggers here
    "loggers": {
        "vvo_manager.nlp.ipm": {"level": "INFO"},
    },
}
LOGGING_DEFAULT_VERBOSITY = 3  # logging.INFO
SOLVER_LOGGER_NAME = "vvo_manager.nlp.ipm"

# Exit codes
EXIT_CODE_SUCCESS = 0
EXIT_CODE_ERROR = 1
EXIT_CODE_NO_SOLUTION = 2

# Newton power flow
POWER_FLOW_TOLERANCE = 1e-10
POWER_FLOW_MAX_ITERATIONS = 50

# Interior point solver
NLP_TOLERANCE = 1e-6
NLP_MAX_ITERATIONS = 3000
NLP_HESSIAN_MODES = ["auto", "bfgs", "finite-difference"]
# "auto" uses the colored finite difference Hessian, "bfgs" falls back to it when an iteration stalls
NLP_CENTERING = 0.1
NLP_FRACTION_TO_BOUNDARY = 0.99995
NLP_MIN_STEP = 1e-8
NLP_MAX_STEP_REDUCTIONS = 20
NLP_MAX_RESTORATIONS = 3
NLP_RESTORATION_ITERATIONS = 50
NLP_OBJECTIVE_GRADIENT_TARGET = 100.0
NLP_MULTIPLIER_LIMIT = 1e10

# Feasibility tolerance used for verifying solver output
FEASIBILITY_TOLERANCE = 1e-6

# Default objective weights (lambda_p comes from the scenario grid)
DEFAULT_OBJECTIVE = {"lambda_v": 1.0, "lambda_q": 1.0, "lambda_c": 1.0}

# Default scenario grid: lambda_p values and (tap deviation steps, max CB modules) pairs
DEFAULT_LAMBDA_P = [1.0, 5.0, float("inf")]
DEFAULT_RANGES = [(3, 2), (3, 3), (16, 3)]
DEFAULT_ENUMERATE_LIMIT = 1000
DEFAULT_JOBS = int(getenv("VVO_JOBS", "1"))

REPORT_FORMATS = ["text", "csv", "json"]
REPORT_CSV_COLUMNS = [
    "case",
    "lambda_p",
    "tap_range",
    "cb_range",
    "mae_v",
    "mae_q",
    "t_relax_s",
    "t_fixed_s",
    "delta_pg_mw",
    "pct_delta_cost",
    "losses_mw",
    "status",
]
REPORT_TEXT_HEADERS = ["case", "λp", "T", "B", "MAE_v", "MAE_q", "T_r", "T_f", "Δpg", "%Δc", "losses", "status"]
REPORT_NA = "NA"

# Actions
CONFIG_REQUIRED_ACTIONS = ["run", "check", "show", "snapshot"]
VALID_ACTIONS = CONFIG_REQUIRED_ACTIONS + ["version"]
HELP_TEXT_ACTION_MAPPING = {
    "run": """Runs the volt/VAR scenario grid on a MATPOWER case.
Usage: vvo-manager run [run-spec.yaml] --case <case.m> [--lambda-p 1,5,inf] [--tap-dev 3,16] [--cb-max 2,3].
The reference ACOPF is solved first, after which every grid cell runs relax, round and resolve.
Exits 0 if every cell succeeded, 2 if any cell found no solution and 1 on errors.
Use --enumerate to compare each cell against a brute force enumeration of the discrete device settings.
    """,
    "check": """Checks an operating state against the physics and bounds of a case.
Usage: vvo-manager check --case <case.m> --state <state.json>.
Prints the largest power balance mismatch, every bound violation and every device setting that is not on its discrete grid.
Exits 0 if the state is feasible and 2 otherwise.
    """,
    "show": """Shows the device statistics of a case (buses, generators, CBs, lines, transformers) and validates the network.
    """,
    "snapshot": """Writes the JSON snapshot of the network built from a case to --output (or stdout).
    """,
    "version": """Shows the installed version of vvo-manager""",
}
