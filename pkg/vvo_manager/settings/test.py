from .base import *

# Keep the test runs single process
DEFAULT_JOBS = 1

TEST_CASE_2BUS = join(CASE_FILE_DIR, "case2_line.m")
TEST_CASE_4BUS = join(CASE_FILE_DIR, "case4_vvo.m")

# Fixture run spec
RUN_SPEC = {
    "case": "cases/case4_vvo.m",
    "grid": {"lambda_p": [1, "inf"], "ranges": [[1, 2], [3, 3]]},
    "objective": {"lambda_v": 1, "lambda_q": 1, "lambda_c": 1},
    "devices": {"cb_module_step": 0.1, "cb_module_count": 3},
    "solver": {"tol": 1e-6, "max_iter": 500, "hessian": "auto"},
    "output": {"path": "/tmp/vvo_report.txt", "format": "text"},
    "jobs": 1,
    "enumerate": False,
}

VALIDATED_RUN_SPEC = {
    "case": join(CONFIG_FILE_DIR, "cases", "case4_vvo.m"),
    "grid": {"lambda_p": [1.0, float("inf")], "ranges": [(1, 2), (3, 3)]},
    "objective": {"lambda_v": 1.0, "lambda_q": 1.0, "lambda_c": 1.0},
    "devices": {"cb_module_step": 0.1, "cb_module_count": 3},
    "solver": {"tol": 1e-6, "max_iter": 500, "hessian": "auto"},
    "output": {"path": "/tmp/vvo_report.txt", "format": "text"},
    "jobs": 1,
    "enumerate": False,
    "enumerate_limit": DEFAULT_ENUMERATE_LIMIT,
    "states_dir": None,
}
